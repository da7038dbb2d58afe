#pragma once

#include <Eigen/Core>

namespace fmfusion {

/// Centered moving average with window 5 (half-width 2). Near the ends the
/// window shrinks symmetrically (half-width min(2, i, n-1-i)) so it stays
/// centered and odd-sized; constants and linear ramps pass through unchanged
/// at every frame.
Eigen::VectorXd moving_average5(const Eigen::VectorXd& x);

/// Column-wise moving_average5.
Eigen::MatrixXd moving_average5_columns(const Eigen::MatrixXd& m);

/// Windowed medoid filter for a 2-D trajectory, window 5 with the same
/// symmetric shrink at the ends. Each output sample is the input sample of
/// the window minimizing the summed Euclidean distance to the others (ties
/// broken by earliest frame). This is the vector analogue of a median
/// filter: single-frame outliers are discarded, constants and straight
/// ramps are preserved, and the output is equivariant under translation,
/// rotation, and positive scaling of the trajectory.
void medoid_filter5(Eigen::Ref<Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y);

/// Column-wise finite-difference derivative: central differences on interior
/// frames, one-sided at the two boundary frames, scaled by 1/dt. The result
/// has one row per input frame.
Eigen::MatrixXd finite_difference(const Eigen::MatrixXd& series, double dt);

}  // namespace fmfusion
