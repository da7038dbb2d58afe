#pragma once

#include <map>
#include <string>
#include <vector>

#include "fmfusion/eval/folds.hpp"
#include "fmfusion/eval/metrics.hpp"
#include "fmfusion/fusion.hpp"
#include "fmfusion/nn/train.hpp"
#include "fmfusion/types.hpp"

namespace fmfusion::eval {

/// One row of the final report: a single modality, a late-fused combination,
/// or the early-fusion network. Arms sharing a modality reuse the same
/// trained per-modality networks within a fold.
struct ArmSpec {
    std::string name;
    std::vector<Modality> modalities;  // subset of {MAT, IMU, VID}
    FusionMode mode = FusionMode::Late;  // relevant when modalities.size() >= 2
};

struct CrossvalConfig {
    FoldPlan plan;
    std::map<Modality, nn::ModelSpec> specs;  // one per network the arms need
    std::vector<ArmSpec> arms;
    nn::TrainConfig train_cfg;
    int repetitions = 20;  // training runs per network, best validation loss wins
    double threshold = 0.5;
    int jobs = 0;  // parallel workers; 0 = hardware concurrency
};

struct ArmResult {
    std::string name;
    std::vector<MetricSet> per_fold;
    MeanCi sens, spec, ba;
};

struct EvalReport {
    std::vector<ArmResult> arms;
    std::vector<std::vector<double>> pairwise_p;  // Wilcoxon on per-fold BA, diag 1
    std::vector<std::string> warnings;
};

/// The full protocol: per fold, normalization statistics are fitted on that
/// fold's training subjects only, every needed network is trained
/// `repetitions` times (derived seeds; a failed run is retried with the next
/// seed up to 3 times) and the run with the lowest validation loss predicts
/// the fold's test snippets. Per-fold metrics are aggregated with mean_ci
/// and compared pairwise across arms with the exact Wilcoxon test.
EvalReport run_crossval(const std::vector<Snippet>& snippets, const CrossvalConfig& cfg);

/// Recomputes the aggregate statistics and pairwise tests from per-fold
/// metric rows (used by the report command).
EvalReport aggregate_arms(std::vector<ArmResult> arms);

/// Per-(fold, network, repetition, attempt) training seed, derived from the
/// experiment master seed by a fixed counter scheme so any single run can be
/// re-executed in isolation.
std::uint64_t crossval_run_seed(std::uint64_t master, int fold, Modality net, int rep,
                                int attempt);

}  // namespace fmfusion::eval
