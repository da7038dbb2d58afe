#include "fmfusion/eval/folds.hpp"

#include <set>
#include <stdexcept>

#include "fmfusion/rng.hpp"

namespace fmfusion::eval {

FoldPlan make_fold_plan(std::vector<SubjectId> subjects, int k, std::uint64_t seed) {
    const int n = static_cast<int>(subjects.size());
    if (k < 2) throw std::invalid_argument("fold count must be at least 2");
    if (k > n) throw std::invalid_argument("fold count exceeds subject count");
    std::set<SubjectId> uniq(subjects.begin(), subjects.end());
    if (static_cast<int>(uniq.size()) != n) {
        throw std::invalid_argument("subjects must be unique");
    }

    Rng rng(derive_seed(seed, {0xF01D5ull}));
    rng.shuffle(subjects);

    FoldPlan plan;
    plan.folds.resize(k);
    const int base = n / k, extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
        const int size = base + (f < extra ? 1 : 0);
        for (int i = 0; i < size; ++i) {
            plan.folds[f].test_subjects.push_back(subjects[pos++]);
        }
    }
    for (int f = 0; f < k; ++f) {
        for (int g = 0; g < k; ++g) {
            if (g == f) continue;
            for (const auto& s : plan.folds[g].test_subjects) {
                plan.folds[f].train_subjects.push_back(s);
            }
        }
    }
    validate_fold_plan(plan);
    return plan;
}

void validate_fold_plan(const FoldPlan& plan) {
    if (plan.folds.empty()) throw std::invalid_argument("fold plan is empty");
    std::set<SubjectId> all_test;
    std::size_t total = 0;
    for (const auto& fold : plan.folds) {
        std::set<SubjectId> test(fold.test_subjects.begin(), fold.test_subjects.end());
        if (test.size() != fold.test_subjects.size()) {
            throw std::invalid_argument("fold plan: repeated subject within a test set");
        }
        for (const auto& s : fold.train_subjects) {
            if (test.count(s)) {
                throw std::invalid_argument("fold plan: subject '" + s.value +
                                            "' in both train and test of a fold");
            }
        }
        total += test.size();
        all_test.insert(test.begin(), test.end());
    }
    if (all_test.size() != total) {
        throw std::invalid_argument("fold plan: test sets are not pairwise disjoint");
    }
    for (const auto& fold : plan.folds) {
        for (const auto& s : fold.train_subjects) {
            if (!all_test.count(s)) {
                throw std::invalid_argument("fold plan: train subject '" + s.value +
                                            "' missing from the test-set union");
            }
        }
    }
}

}  // namespace fmfusion::eval
