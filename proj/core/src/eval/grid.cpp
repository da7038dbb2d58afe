#include "fmfusion/eval/grid.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>

#include "fmfusion/errors.hpp"
#include "fmfusion/fusion.hpp"
#include "fmfusion/imu_features.hpp"
#include "fmfusion/mat_features.hpp"
#include "fmfusion/parallel.hpp"
#include "fmfusion/rng.hpp"
#include "fmfusion/video_features.hpp"

namespace fmfusion::eval {

std::vector<GridPoint> full_grid() {
    static const int conv1_k[] = {4, 8};
    static const int conv1_s[] = {13, 17, 25};
    static const int conv23_k[] = {8, 16, 32, 64};
    static const int conv2_s[] = {7, 9, 13, 17, 25};
    static const int conv3_s[] = {9, 13, 17, 25, 33};
    static const int fc_units[] = {128, 256};

    std::vector<GridPoint> points;
    points.reserve(4800);
    for (int k1 : conv1_k)
        for (int s1 : conv1_s)
            for (int k2 : conv23_k)
                for (int s2 : conv2_s)
                    for (int k3 : conv23_k)
                        for (int s3 : conv3_s)
                            for (int fc : fc_units) {
                                points.push_back({{k1, s1}, {k2, s2}, {k3, s3}, fc});
                            }
    return points;
}

std::vector<GridPoint> sample_grid(int budget, std::uint64_t seed) {
    std::vector<GridPoint> all = full_grid();
    if (budget <= 0) throw std::invalid_argument("grid budget must be positive");
    if (budget >= static_cast<int>(all.size())) return all;
    Rng rng(derive_seed(seed, {0x62D1ull}));
    rng.shuffle(all);
    all.resize(budget);
    return all;
}

nn::ModelSpec grid_point_spec(const GridPoint& p, Modality m) {
    const auto [frames, channels] = feature_shape(m);
    nn::ModelSpec spec;
    spec.conv_layers = {p.c1, p.c2, p.c3};
    spec.fc_units = p.fc;
    spec.input_frames = frames;
    spec.input_channels = channels;
    return spec;
}

std::vector<TunedSpec> grid_search(const std::vector<Snippet>& tuning,
                                   const std::vector<GridPoint>& points,
                                   const GridSearchConfig& cfg,
                                   const std::vector<SubjectId>* cv_subjects) {
    if (points.empty()) throw std::invalid_argument("grid search: empty point list");
    if (tuning.size() < 2) throw DataError("grid search: need at least two tuning snippets");
    if (cfg.repeats < 1) throw std::invalid_argument("grid search: repeats must be >= 1");

    if (cv_subjects) {
        std::set<std::string> cv;
        for (const auto& s : *cv_subjects) cv.insert(s.value);
        for (const auto& s : tuning) {
            if (cv.count(s.subject.value)) {
                throw std::invalid_argument("grid search: tuning subject '" + s.subject.value +
                                            "' overlaps the cross-validation set");
            }
        }
    }

    const int n = static_cast<int>(tuning.size());
    const bool fused = cfg.modality == Modality::FUSED;
    const bool need_vid = fused || cfg.modality == Modality::VID;
    const bool need_imu = fused || cfg.modality == Modality::IMU;
    const bool need_mat = fused || cfg.modality == Modality::MAT;
    for (const auto& s : tuning) {
        if ((need_vid && !s.video) || (need_imu && !s.imu) || (need_mat && !s.mat)) {
            throw DataError("tuning snippet '" + s.snippet_id + "' lacks a required modality");
        }
    }

    std::vector<Eigen::MatrixXd> vid_pre(n), imu_pre(n);
    std::vector<std::optional<FeatureMatrix>> mat_feats(n);
    parallel_for(
        n,
        [&](int i) {
            if (need_vid) vid_pre[i] = video_prenorm(*tuning[i].video);
            if (need_imu) imu_pre[i] = imu_prenorm(*tuning[i].imu);
            if (need_mat) mat_feats[i] = finalize_mat_features(*tuning[i].mat);
        },
        cfg.jobs);

    // Per repeat: one fixed 1/5 validation split shared by all points.
    nn::TrainConfig base_cfg = cfg.train_cfg;
    base_cfg.validation_split = 1.0 / 5.0;

    struct RepeatData {
        std::vector<FeatureMatrix> inputs;  // shuffled order: val part first
        std::vector<Label> labels;
        std::vector<int> train_idx, val_idx;
    };
    std::vector<RepeatData> repeats(cfg.repeats);
    for (int r = 0; r < cfg.repeats; ++r) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(cfg.train_cfg.seed, {0x7E57ull, static_cast<std::uint64_t>(r)}));
        rng.shuffle(order);
        const int n_val = std::clamp(static_cast<int>(std::lround(n / 5.0)), 1, n - 1);
        std::vector<int> train_part(order.begin() + n_val, order.end());

        NormStats stats;
        if (need_vid) {
            std::vector<Eigen::MatrixXd> pre;
            for (int i : train_part) pre.push_back(vid_pre[i]);
            const NormStats vs = fit_video_stats(pre);
            stats.pos_mean = vs.pos_mean;
            stats.pos_std = vs.pos_std;
            stats.vel_mean = vs.vel_mean;
            stats.vel_std = vs.vel_std;
        }
        if (need_imu) {
            std::vector<Eigen::MatrixXd> pre;
            for (int i : train_part) pre.push_back(imu_pre[i]);
            const NormStats is = fit_imu_stats(pre);
            stats.acc_mean = is.acc_mean;
            stats.acc_std = is.acc_std;
            stats.gyro_mean = is.gyro_mean;
            stats.gyro_std = is.gyro_std;
        }

        RepeatData& rd = repeats[r];
        for (int pos = 0; pos < n; ++pos) {
            (pos < n_val ? rd.val_idx : rd.train_idx).push_back(pos);
        }
        for (int i : order) {
            rd.labels.push_back(tuning[i].label);
            switch (cfg.modality) {
                case Modality::MAT: rd.inputs.push_back(*mat_feats[i]); break;
                case Modality::IMU: rd.inputs.push_back(apply_imu_stats(imu_pre[i], stats)); break;
                case Modality::VID: rd.inputs.push_back(apply_video_stats(vid_pre[i], stats)); break;
                case Modality::FUSED:
                    rd.inputs.push_back(early_fuse_features(
                        *mat_feats[i], apply_imu_stats(imu_pre[i], stats),
                        apply_video_stats(vid_pre[i], stats)));
                    break;
            }
        }
    }

    const int n_points = static_cast<int>(points.size());
    std::vector<double> losses(static_cast<std::size_t>(n_points) * cfg.repeats, 0.0);
    parallel_for(
        static_cast<int>(losses.size()),
        [&](int j) {
            const int pi = j / cfg.repeats;
            const int r = j % cfg.repeats;
            nn::TrainConfig tc = base_cfg;
            const nn::ModelSpec spec = grid_point_spec(points[pi], cfg.modality);
            for (int attempt = 0;; ++attempt) {
                tc.seed = derive_seed(cfg.train_cfg.seed,
                                      {0x62D5ull, static_cast<std::uint64_t>(pi),
                                       static_cast<std::uint64_t>(r),
                                       static_cast<std::uint64_t>(attempt)});
                try {
                    const nn::TrainedModel tm =
                        nn::train_with_split(spec, repeats[r].inputs, repeats[r].labels,
                                             repeats[r].train_idx, repeats[r].val_idx, tc);
                    losses[j] = tm.best_val_loss;
                    return;
                } catch (const NumericError& e) {
                    if (attempt >= 2) {
                        throw NumericError("grid point " + std::to_string(pi) + " repeat " +
                                           std::to_string(r) + ": 3 attempts failed: " + e.what());
                    }
                }
            }
        },
        cfg.jobs);

    std::vector<TunedSpec> ranked(n_points);
    for (int pi = 0; pi < n_points; ++pi) {
        double sum = 0.0;
        for (int r = 0; r < cfg.repeats; ++r) sum += losses[static_cast<std::size_t>(pi) * cfg.repeats + r];
        ranked[pi] = {points[pi], sum / cfg.repeats};
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const TunedSpec& a, const TunedSpec& b) {
                         return a.mean_val_loss < b.mean_val_loss;
                     });
    return ranked;
}

}  // namespace fmfusion::eval
