#pragma once

#include <Eigen/Core>
#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion {

enum class FusionMode { Late, Early };

/// Which modalities to combine and how. Late fusion averages the class
/// probabilities of per-modality networks (two or three); early fusion
/// trains one network on the temporally aligned concatenation of all three.
struct FusionConfig {
    FusionMode mode = FusionMode::Late;
    std::vector<Modality> modalities;
    double threshold = 0.5;
};

/// Throws std::invalid_argument on inconsistent settings (late with fewer
/// than two modalities, early without all three, FUSED listed explicitly,
/// duplicates).
void validate_fusion_config(const FusionConfig& cfg);

struct FusedDecision {
    double p_avg = 0.0;
    Label label = Label::FMminus;
};

/// Arithmetic mean of the probabilities; FM+ iff the mean is >= threshold
/// (the tie at exactly 0.5 goes to FM+, used consistently everywhere a
/// probability is thresholded).
FusedDecision late_fuse(const std::vector<double>& probs, double threshold = 0.5);

/// Linear-interpolation resampling over the common 5 s window; the first
/// and last source frames map exactly onto the first and last target frames.
Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& src, int target_frames);

/// Concatenates the three per-modality feature matrices at 250 frames
/// (MAT and IMU are down-sampled by linear interpolation), column order
/// MAT | IMU | VID, giving the 250x102 fused input.
FeatureMatrix early_fuse_features(const FeatureMatrix& mat, const FeatureMatrix& imu,
                                  const FeatureMatrix& vid);

}  // namespace fmfusion
