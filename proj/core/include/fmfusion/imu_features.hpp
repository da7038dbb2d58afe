#pragma once

#include <Eigen/Core>
#include <vector>

#include "fmfusion/types.hpp"
#include "fmfusion/video_features.hpp"  // NormStats

namespace fmfusion {

/// Everything before z-scoring: per-channel moving average (window 5,
/// truncated edges) followed by per-channel mean subtraction. 300x36.
Eigen::MatrixXd imu_prenorm(const RawImuFrames& raw);

/// Applies train-set z-scoring: accel channels with the accel stats, gyro
/// channels with the gyro stats (sensor-major column order per RawImuFrames).
FeatureMatrix apply_imu_stats(const Eigen::MatrixXd& prenorm, const NormStats& stats);

/// Full feature construction from raw IMU frames.
FeatureMatrix finalize_imu_features(const RawImuFrames& raw, const NormStats& stats);

/// Fits accel/gyro statistics from pre-normalization IMU matrices, pooled
/// over all snippets and channels of each kind separately. Population
/// standard deviation, floored at 1e-8. Throws on an empty list.
NormStats fit_imu_stats(const std::vector<Eigen::MatrixXd>& prenorms);

}  // namespace fmfusion
