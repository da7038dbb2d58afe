#pragma once

#include <Eigen/Core>
#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion {

/// Train-set normalization statistics, applied unchanged to test data.
/// Position/velocity pairs serve the video features; accel/gyro pairs serve
/// the IMU features. Means and standard deviations are pooled across all
/// snippets and all channels of a kind; standard deviations are floored at
/// 1e-8 so constant channels map to zero instead of blowing up.
struct NormStats {
    double pos_mean = 0.0, pos_std = 1.0;
    double vel_mean = 0.0, vel_std = 1.0;
    double acc_mean = 0.0, acc_std = 1.0;
    double gyro_mean = 0.0, gyro_std = 1.0;
};

inline constexpr double kStdFloor = 1e-8;

/// Outlier removal and smoothing: per-keypoint windowed medoid (window 5)
/// followed by a per-channel centered moving average (window 5), both with
/// symmetric window shrink at the snippet edges. The medoid stage plays the
/// median filter's role while staying equivariant under similarity
/// transforms of the keypoints. Input and output are 250x30 (x1,y1,...).
Eigen::MatrixXd smooth_keypoints(const Eigen::MatrixXd& raw);

/// Subtracts the across-frames mean center of the two hip keypoints from
/// every keypoint in every frame.
Eigen::MatrixXd center_on_hips(const Eigen::MatrixXd& pos);

/// Rotates all frames by the single angle that maps the across-frames mean
/// shoulder center onto the positive Y axis. If the shoulder center is at
/// the origin the rotation is skipped and a warning is recorded.
Eigen::MatrixXd rotate_to_vertical(const Eigen::MatrixXd& pos,
                                   std::vector<std::string>* warnings = nullptr);

/// Divides all coordinates by 3*|hc_y - sc_y| (hip and shoulder centers
/// recomputed after rotation) so the hip-to-shoulder distance becomes 1/3.
/// Throws NumericError when the torso height is degenerate (< 1e-9).
Eigen::MatrixXd scale_torso(const Eigen::MatrixXd& pos);

/// Everything before z-scoring: smooth -> center -> rotate -> scale ->
/// per-keypoint-channel mean subtraction -> finite-difference velocities
/// (central, one-sided at the ends, scaled by the 50 Hz frame interval).
/// Returns the 250x60 matrix [positions | velocities].
Eigen::MatrixXd video_prenorm(const RawVideoKeypoints& raw,
                              std::vector<std::string>* warnings = nullptr);

/// Applies the train-set z-scoring to a pre-normalization matrix: columns
/// 0..29 with pos stats, 30..59 with vel stats.
FeatureMatrix apply_video_stats(const Eigen::MatrixXd& prenorm, const NormStats& stats);

/// Full feature construction from scaled positions (the output of
/// scale_torso): mean-centering, velocities, z-scoring, concatenation in
/// the column order x^p1,y^p1,...,y^p15,x^v1,...,y^v15.
FeatureMatrix finalize_video_features(const Eigen::MatrixXd& scaled_pos, const NormStats& stats);

/// Fits pos/vel statistics from pre-normalization video matrices, pooled
/// over all snippets and channels (positions and velocities separately).
/// Uses the population standard deviation. Throws on an empty list.
NormStats fit_video_stats(const std::vector<Eigen::MatrixXd>& prenorms);

/// Optional extension (off the classifier path): per-keypoint accelerations
/// as finite differences of the velocity block, same scheme and scaling.
/// Returns 250x30.
Eigen::MatrixXd video_acceleration_block(const Eigen::MatrixXd& prenorm);

}  // namespace fmfusion
