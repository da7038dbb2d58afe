#include "fmfusion/video_features.hpp"

#include <cmath>

#include "fmfusion/errors.hpp"
#include "fmfusion/signal.hpp"

namespace fmfusion {

namespace {

// Across-frames mean center of a keypoint pair (1-based indices).
Eigen::Vector2d pair_center(const Eigen::MatrixXd& pos, int kp_a, int kp_b) {
    const int a = kp_a - 1, b = kp_b - 1;
    Eigen::Vector2d c;
    c.x() = 0.5 * (pos.col(2 * a).mean() + pos.col(2 * b).mean());
    c.y() = 0.5 * (pos.col(2 * a + 1).mean() + pos.col(2 * b + 1).mean());
    return c;
}

constexpr int kHipL = 10, kHipR = 11, kShoulderL = 4, kShoulderR = 5;

}  // namespace

Eigen::MatrixXd smooth_keypoints(const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd out = raw;
    for (int k = 0; k < kKeypoints; ++k) {
        medoid_filter5(out.col(2 * k), out.col(2 * k + 1));
    }
    return moving_average5_columns(out);
}

Eigen::MatrixXd center_on_hips(const Eigen::MatrixXd& pos) {
    const Eigen::Vector2d hc = pair_center(pos, kHipL, kHipR);
    Eigen::MatrixXd out = pos;
    for (int k = 0; k < kKeypoints; ++k) {
        out.col(2 * k).array() -= hc.x();
        out.col(2 * k + 1).array() -= hc.y();
    }
    return out;
}

Eigen::MatrixXd rotate_to_vertical(const Eigen::MatrixXd& pos, std::vector<std::string>* warnings) {
    const Eigen::Vector2d sc = pair_center(pos, kShoulderL, kShoulderR);
    const double norm = sc.norm();
    if (norm < 1e-9) {
        if (warnings) warnings->push_back("degenerate shoulder center, rotation skipped");
        return pos;
    }
    // Signed angle that takes sc onto the positive Y axis; acos alone would
    // leave the direction ambiguous.
    const double alpha = M_PI / 2.0 - std::atan2(sc.y(), sc.x());
    const double c = std::cos(alpha), s = std::sin(alpha);
    Eigen::MatrixXd out(pos.rows(), pos.cols());
    for (int k = 0; k < kKeypoints; ++k) {
        out.col(2 * k) = c * pos.col(2 * k) - s * pos.col(2 * k + 1);
        out.col(2 * k + 1) = s * pos.col(2 * k) + c * pos.col(2 * k + 1);
    }
    return out;
}

Eigen::MatrixXd scale_torso(const Eigen::MatrixXd& pos) {
    const Eigen::Vector2d hc = pair_center(pos, kHipL, kHipR);
    const Eigen::Vector2d sc = pair_center(pos, kShoulderL, kShoulderR);
    const double torso = std::abs(hc.y() - sc.y());
    if (torso < 1e-9) throw NumericError("degenerate torso: |hc_y - sc_y| below 1e-9");
    return pos / (3.0 * torso);
}

Eigen::MatrixXd video_prenorm(const RawVideoKeypoints& raw, std::vector<std::string>* warnings) {
    Eigen::MatrixXd pos = smooth_keypoints(raw.frames);
    pos = center_on_hips(pos);
    pos = rotate_to_vertical(pos, warnings);
    pos = scale_torso(pos);

    const Eigen::MatrixXd vel = finite_difference(pos, kVideoDt);
    Eigen::MatrixXd out(kVideoFrames, 4 * kKeypoints);
    // Positions are mean-centered per channel; velocities are near zero-mean
    // already and their z-scoring handles any offset.
    for (int c = 0; c < 2 * kKeypoints; ++c) {
        out.col(c) = pos.col(c).array() - pos.col(c).mean();
    }
    out.rightCols(2 * kKeypoints) = vel;
    return out;
}

FeatureMatrix apply_video_stats(const Eigen::MatrixXd& prenorm, const NormStats& stats) {
    if (prenorm.rows() != kVideoFrames || prenorm.cols() != 4 * kKeypoints) {
        throw std::invalid_argument("video prenorm matrix must be 250x60");
    }
    Eigen::MatrixXd out(prenorm.rows(), prenorm.cols());
    out.leftCols(2 * kKeypoints) =
        (prenorm.leftCols(2 * kKeypoints).array() - stats.pos_mean) / stats.pos_std;
    out.rightCols(2 * kKeypoints) =
        (prenorm.rightCols(2 * kKeypoints).array() - stats.vel_mean) / stats.vel_std;
    return FeatureMatrix(std::move(out), Modality::VID);
}

FeatureMatrix finalize_video_features(const Eigen::MatrixXd& scaled_pos, const NormStats& stats) {
    const Eigen::MatrixXd vel = finite_difference(scaled_pos, kVideoDt);
    Eigen::MatrixXd pre(kVideoFrames, 4 * kKeypoints);
    for (int c = 0; c < 2 * kKeypoints; ++c) {
        pre.col(c) = scaled_pos.col(c).array() - scaled_pos.col(c).mean();
    }
    pre.rightCols(2 * kKeypoints) = vel;
    return apply_video_stats(pre, stats);
}

namespace {

// Pooled population mean/std of a column block across a list of matrices.
std::pair<double, double> pooled_stats(const std::vector<Eigen::MatrixXd>& ms, int col0, int ncols) {
    double sum = 0.0, count = 0.0;
    for (const auto& m : ms) {
        sum += m.middleCols(col0, ncols).sum();
        count += static_cast<double>(m.rows()) * ncols;
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& m : ms) {
        ss += (m.middleCols(col0, ncols).array() - mean).square().sum();
    }
    const double sd = std::sqrt(ss / count);
    return {mean, std::max(sd, kStdFloor)};
}

}  // namespace

NormStats fit_video_stats(const std::vector<Eigen::MatrixXd>& prenorms) {
    if (prenorms.empty()) throw std::invalid_argument("fit_video_stats: empty training list");
    NormStats st;
    std::tie(st.pos_mean, st.pos_std) = pooled_stats(prenorms, 0, 2 * kKeypoints);
    std::tie(st.vel_mean, st.vel_std) = pooled_stats(prenorms, 2 * kKeypoints, 2 * kKeypoints);
    return st;
}

Eigen::MatrixXd video_acceleration_block(const Eigen::MatrixXd& prenorm) {
    if (prenorm.cols() != 4 * kKeypoints) {
        throw std::invalid_argument("expected a 250x60 video prenorm matrix");
    }
    return finite_difference(prenorm.rightCols(2 * kKeypoints), kVideoDt);
}

}  // namespace fmfusion
