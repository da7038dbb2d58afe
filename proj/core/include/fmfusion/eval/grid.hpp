#pragma once

#include <cstdint>
#include <vector>

#include "fmfusion/nn/train.hpp"
#include "fmfusion/types.hpp"

namespace fmfusion::eval {

/// One point of the fine-tuning grid: three conv layers plus the FC width.
struct GridPoint {
    nn::ConvLayerSpec c1, c2, c3;
    int fc = 128;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// The full fine-tuning space: conv1 in {4,8}x{13,17,25}, conv2 in
/// {8,16,32,64}x{7,9,13,17,25}, conv3 in {8,16,32,64}x{9,13,17,25,33},
/// fc in {128,256}. Cardinality 6*20*20*2 = 4800, enumerated in that
/// nesting order.
std::vector<GridPoint> full_grid();

/// Deterministic random subset of the full grid, without replacement.
/// budget >= cardinality returns the full grid.
std::vector<GridPoint> sample_grid(int budget, std::uint64_t seed);

nn::ModelSpec grid_point_spec(const GridPoint& p, Modality m);

struct GridSearchConfig {
    Modality modality = Modality::VID;
    nn::TrainConfig train_cfg;  // validation_split is forced to 1/5
    int repeats = 3;
    int jobs = 0;
};

struct TunedSpec {
    GridPoint point;
    double mean_val_loss = 0.0;
};

/// Trains every grid point `repeats` times on the tuning snippets (per
/// repeat: a fixed random 1/5 validation split shared by all points, with
/// normalization statistics fitted on the training part) and returns the
/// points ranked by mean best-validation loss, ascending. cv_subjects, when
/// given, must be disjoint from the tuning subjects.
std::vector<TunedSpec> grid_search(const std::vector<Snippet>& tuning,
                                   const std::vector<GridPoint>& points,
                                   const GridSearchConfig& cfg,
                                   const std::vector<SubjectId>* cv_subjects = nullptr);

}  // namespace fmfusion::eval
