#include "fmfusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace fmfusion {

void validate_fusion_config(const FusionConfig& cfg) {
    std::set<Modality> uniq(cfg.modalities.begin(), cfg.modalities.end());
    if (uniq.size() != cfg.modalities.size()) {
        throw std::invalid_argument("fusion modalities contain duplicates");
    }
    if (uniq.count(Modality::FUSED)) {
        throw std::invalid_argument("FUSED is the fusion output, not an input modality");
    }
    if (cfg.mode == FusionMode::Late && uniq.size() < 2) {
        throw std::invalid_argument("late fusion needs at least two modalities");
    }
    if (cfg.mode == FusionMode::Early && uniq.size() != 3) {
        throw std::invalid_argument("early fusion needs all three modalities (mat, imu, vid)");
    }
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) {
        throw std::invalid_argument("fusion threshold must be in [0,1]");
    }
}

FusedDecision late_fuse(const std::vector<double>& probs, double threshold) {
    if (probs.empty()) throw std::invalid_argument("late_fuse: empty probability list");
    const double p =
        std::accumulate(probs.begin(), probs.end(), 0.0) / static_cast<double>(probs.size());
    return FusedDecision{p, p >= threshold ? Label::FMplus : Label::FMminus};
}

Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& src, int target_frames) {
    const Eigen::Index n = src.rows();
    if (n < 2 || target_frames < 2) {
        throw std::invalid_argument("resample_linear needs at least two frames on both sides");
    }
    Eigen::MatrixXd out(target_frames, src.cols());
    const double step = static_cast<double>(n - 1) / static_cast<double>(target_frames - 1);
    for (int i = 0; i < target_frames; ++i) {
        const double pos = i * step;
        const Eigen::Index lo = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
        const double frac = pos - static_cast<double>(lo);
        out.row(i) = (1.0 - frac) * src.row(lo) + frac * src.row(lo + 1);
    }
    // Last target frame is the last source frame, exactly.
    out.row(target_frames - 1) = src.row(n - 1);
    return out;
}

FeatureMatrix early_fuse_features(const FeatureMatrix& mat, const FeatureMatrix& imu,
                                  const FeatureMatrix& vid) {
    if (mat.tag() != Modality::MAT || imu.tag() != Modality::IMU || vid.tag() != Modality::VID) {
        throw std::invalid_argument("early_fuse_features expects (MAT, IMU, VID) inputs");
    }
    Eigen::MatrixXd out(kVideoFrames, 102);
    out.leftCols(6) = resample_linear(mat.data(), kVideoFrames);
    out.middleCols(6, kImuChannels) = resample_linear(imu.data(), kVideoFrames);
    out.rightCols(60) = vid.data();
    return FeatureMatrix(std::move(out), Modality::FUSED);
}

}  // namespace fmfusion
