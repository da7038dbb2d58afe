#pragma once

#include <cstdint>
#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion::eval {

/// Subject-grouped partition: every subject's snippets land in exactly one
/// test set, and never in that fold's training set.
struct FoldPlan {
    struct Fold {
        std::vector<SubjectId> test_subjects;
        std::vector<SubjectId> train_subjects;
    };
    std::vector<Fold> folds;
};

/// Deterministic seeded shuffle followed by a grouped partition into k
/// folds of near-equal subject counts (the first |subjects| mod k folds get
/// one extra). Throws std::invalid_argument when k < 2 or k > |subjects|
/// or subjects repeat.
FoldPlan make_fold_plan(std::vector<SubjectId> subjects, int k, std::uint64_t seed);

/// Asserts the plan invariants: pairwise-disjoint test sets covering all
/// subjects and empty train/test intersections. Throws std::invalid_argument
/// on violation; run_crossval calls this on every run.
void validate_fold_plan(const FoldPlan& plan);

}  // namespace fmfusion::eval
