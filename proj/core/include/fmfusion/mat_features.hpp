#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion {

/// Frames of one mat area, row-major flattened: cell (i, j) of frame f
/// (0-based) lives at data(f, i*cols + j).
struct AreaFrames {
    int rows = 0;
    int cols = 0;
    Eigen::MatrixXd data;  // frames x (rows*cols)

    double at(int frame, int i, int j) const { return data(frame, i * cols + j); }
};

/// Center-of-pressure track of one area: per-frame CoP coordinates (1-based
/// grid units) and mean pressure.
struct CoPTrack {
    Eigen::VectorXd x, y, p;
};

/// The six per-snippet series (top and bottom areas). After normalization
/// all values lie in [0, 1].
struct CoPSeries {
    Eigen::VectorXd x_t, y_t, p_t, x_b, y_b, p_b;
};

/// Crops rows 1-29, columns 4-29 (1-based, both ends inclusive; 29x26 = 754
/// cells) and splits into the top 12x26 and bottom 17x26 areas.
std::pair<AreaFrames, AreaFrames> crop_and_split(const RawMatFrames& raw);

/// Per-frame CoP per Eq.-style weighting: x = sum j*p / sum p,
/// y = sum i*p / sum p (i, j 1-based), p = sum p / (rows*cols). Frames with
/// zero total pressure get the previous frame's CoP (or the area centroid
/// when none exists yet) and p = 0; a warning is recorded once per area.
CoPTrack compute_cop(const AreaFrames& area, std::vector<std::string>* warnings = nullptr);

/// Min-shift and shared-range scaling: gamma is the max of the four
/// positional ranges, beta the max of the two pressure ranges; each series
/// is shifted by its own minimum and divided by the shared denominator.
/// Degenerate denominators (< 1e-9) zero the affected group and record a
/// warning. Input series are expected to be smoothed already.
CoPSeries normalize_cop(const CoPSeries& smoothed, std::vector<std::string>* warnings = nullptr);

/// Full pipeline: crop/split -> CoP -> moving average (window 5) ->
/// normalize -> columns (x_t, y_t, p_t, x_b, y_b, p_b).
FeatureMatrix finalize_mat_features(const RawMatFrames& raw,
                                    std::vector<std::string>* warnings = nullptr);

/// Optional extension (off the classifier path): first derivatives of the
/// six normalized series, same finite-difference scheme as the video
/// velocities, at the mat frame interval. Returns 500x6.
Eigen::MatrixXd mat_derivative_block(const FeatureMatrix& mat_features);

}  // namespace fmfusion
