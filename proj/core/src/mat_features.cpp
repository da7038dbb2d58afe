#include "fmfusion/mat_features.hpp"

#include <cmath>

#include "fmfusion/signal.hpp"

namespace fmfusion {

namespace {

// 1-based inclusive crop bounds within the 32x32 grid.
constexpr int kCropRowLo = 1, kCropRowHi = 29;
constexpr int kCropColLo = 4, kCropColHi = 29;
constexpr int kTopRows = 12;  // crop rows 1-12; bottom gets 13-29

}  // namespace

std::pair<AreaFrames, AreaFrames> crop_and_split(const RawMatFrames& raw) {
    const int crop_cols = kCropColHi - kCropColLo + 1;
    AreaFrames top{kTopRows, crop_cols,
                   Eigen::MatrixXd(raw.frames.rows(), kTopRows * crop_cols)};
    AreaFrames bottom{kCropRowHi - kTopRows, crop_cols,
                      Eigen::MatrixXd(raw.frames.rows(), (kCropRowHi - kTopRows) * crop_cols)};
    for (int f = 0; f < raw.frames.rows(); ++f) {
        for (int r = kCropRowLo; r <= kCropRowHi; ++r) {
            for (int c = kCropColLo; c <= kCropColHi; ++c) {
                const double v = raw.frames(f, (r - 1) * kMatGrid + (c - 1));
                const int cc = c - kCropColLo;
                if (r <= kTopRows) {
                    top.data(f, (r - 1) * crop_cols + cc) = v;
                } else {
                    bottom.data(f, (r - 1 - kTopRows) * crop_cols + cc) = v;
                }
            }
        }
    }
    return {std::move(top), std::move(bottom)};
}

CoPTrack compute_cop(const AreaFrames& area, std::vector<std::string>* warnings) {
    const Eigen::Index n = area.data.rows();
    CoPTrack t{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    bool have_last = false, warned = false;
    double last_x = 0.5 * (1 + area.cols), last_y = 0.5 * (1 + area.rows);
    for (Eigen::Index f = 0; f < n; ++f) {
        double total = 0.0, wx = 0.0, wy = 0.0;
        for (int i = 0; i < area.rows; ++i) {
            for (int j = 0; j < area.cols; ++j) {
                const double p = area.at(static_cast<int>(f), i, j);
                total += p;
                wx += (j + 1) * p;
                wy += (i + 1) * p;
            }
        }
        t.p[f] = total / (area.rows * area.cols);
        if (total > 0.0) {
            last_x = wx / total;
            last_y = wy / total;
            have_last = true;
        } else if (!warned) {
            if (warnings) {
                warnings->push_back(have_last ? "zero-pressure frame: CoP carried forward"
                                              : "zero-pressure frame: CoP set to area centroid");
            }
            warned = true;
        }
        t.x[f] = last_x;
        t.y[f] = last_y;
    }
    return t;
}

CoPSeries normalize_cop(const CoPSeries& s, std::vector<std::string>* warnings) {
    const auto range = [](const Eigen::VectorXd& v) { return v.maxCoeff() - v.minCoeff(); };
    const double gamma = std::max({range(s.x_t), range(s.y_t), range(s.x_b), range(s.y_b)});
    const double beta = std::max(range(s.p_t), range(s.p_b));

    CoPSeries out;
    const auto shift_scale = [](const Eigen::VectorXd& v, double denom) -> Eigen::VectorXd {
        return (v.array() - v.minCoeff()) / denom;
    };
    if (gamma < 1e-9) {
        if (warnings) warnings->push_back("degenerate positional range: CoP coordinates zeroed");
        out.x_t = Eigen::VectorXd::Zero(s.x_t.size());
        out.y_t = Eigen::VectorXd::Zero(s.y_t.size());
        out.x_b = Eigen::VectorXd::Zero(s.x_b.size());
        out.y_b = Eigen::VectorXd::Zero(s.y_b.size());
    } else {
        out.x_t = shift_scale(s.x_t, gamma);
        out.y_t = shift_scale(s.y_t, gamma);
        out.x_b = shift_scale(s.x_b, gamma);
        out.y_b = shift_scale(s.y_b, gamma);
    }
    if (beta < 1e-9) {
        if (warnings) warnings->push_back("degenerate pressure range: pressure series zeroed");
        out.p_t = Eigen::VectorXd::Zero(s.p_t.size());
        out.p_b = Eigen::VectorXd::Zero(s.p_b.size());
    } else {
        out.p_t = shift_scale(s.p_t, beta);
        out.p_b = shift_scale(s.p_b, beta);
    }
    return out;
}

FeatureMatrix finalize_mat_features(const RawMatFrames& raw, std::vector<std::string>* warnings) {
    const auto [top, bottom] = crop_and_split(raw);
    const CoPTrack ct = compute_cop(top, warnings);
    const CoPTrack cb = compute_cop(bottom, warnings);

    CoPSeries smoothed;
    smoothed.x_t = moving_average5(ct.x);
    smoothed.y_t = moving_average5(ct.y);
    smoothed.p_t = moving_average5(ct.p);
    smoothed.x_b = moving_average5(cb.x);
    smoothed.y_b = moving_average5(cb.y);
    smoothed.p_b = moving_average5(cb.p);

    const CoPSeries norm = normalize_cop(smoothed, warnings);
    Eigen::MatrixXd out(raw.frames.rows(), 6);
    out.col(0) = norm.x_t;
    out.col(1) = norm.y_t;
    out.col(2) = norm.p_t;
    out.col(3) = norm.x_b;
    out.col(4) = norm.y_b;
    out.col(5) = norm.p_b;
    return FeatureMatrix(std::move(out), Modality::MAT);
}

Eigen::MatrixXd mat_derivative_block(const FeatureMatrix& mat_features) {
    if (mat_features.tag() != Modality::MAT) {
        throw std::invalid_argument("mat_derivative_block expects MAT features");
    }
    return finite_difference(mat_features.data(), 5.0 / kMatFrames);
}

}  // namespace fmfusion
