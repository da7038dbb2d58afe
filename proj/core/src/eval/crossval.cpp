#include "fmfusion/eval/crossval.hpp"

#include <algorithm>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "fmfusion/errors.hpp"
#include "fmfusion/eval/wilcoxon.hpp"
#include "fmfusion/imu_features.hpp"
#include "fmfusion/mat_features.hpp"
#include "fmfusion/parallel.hpp"
#include "fmfusion/rng.hpp"
#include "fmfusion/video_features.hpp"

namespace fmfusion::eval {

namespace {

int net_index(Modality m) {
    switch (m) {
        case Modality::MAT: return 0;
        case Modality::IMU: return 1;
        case Modality::VID: return 2;
        case Modality::FUSED: return 3;
    }
    return -1;
}

/// Networks the arm needs at prediction time.
std::vector<Modality> arm_networks(const ArmSpec& arm) {
    if (arm.modalities.size() >= 2 && arm.mode == FusionMode::Early) {
        return {Modality::FUSED};
    }
    return arm.modalities;
}

void validate_arms(const std::vector<ArmSpec>& arms) {
    if (arms.empty()) throw std::invalid_argument("crossval: no arms configured");
    std::set<std::string> names;
    for (const auto& arm : arms) {
        if (arm.name.empty()) throw std::invalid_argument("crossval: arm without a name");
        if (!names.insert(arm.name).second) {
            throw std::invalid_argument("crossval: duplicate arm name '" + arm.name + "'");
        }
        if (arm.modalities.empty()) {
            throw std::invalid_argument("crossval: arm '" + arm.name + "' has no modalities");
        }
        if (arm.modalities.size() > 1) {
            FusionConfig fc;
            fc.mode = arm.mode;
            fc.modalities = arm.modalities;
            validate_fusion_config(fc);
        } else if (arm.modalities.front() == Modality::FUSED) {
            throw std::invalid_argument("crossval: FUSED is not a raw modality");
        }
    }
}

struct WarningSink {
    std::set<std::string> seen;
    std::vector<std::string>* out;

    void add(const std::vector<std::string>& msgs) {
        for (const auto& m : msgs) {
            if (seen.insert(m).second) out->push_back(m);
        }
    }
};

}  // namespace

std::uint64_t crossval_run_seed(std::uint64_t master, int fold, Modality net, int rep,
                                int attempt) {
    return derive_seed(master, {0xC705ull, static_cast<std::uint64_t>(fold),
                                static_cast<std::uint64_t>(net_index(net)),
                                static_cast<std::uint64_t>(rep),
                                static_cast<std::uint64_t>(attempt)});
}

EvalReport aggregate_arms(std::vector<ArmResult> arms) {
    EvalReport report;
    for (auto& arm : arms) {
        std::vector<double> tprs, tnrs, bas;
        for (const auto& m : arm.per_fold) {
            tprs.push_back(m.tpr);
            tnrs.push_back(m.tnr);
            bas.push_back(m.ba);
        }
        arm.sens = mean_ci(tprs);
        arm.spec = mean_ci(tnrs);
        arm.ba = mean_ci(bas);
        report.arms.push_back(std::move(arm));
    }
    const std::size_t n = report.arms.size();
    report.pairwise_p.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<double> bi, bj;
            for (const auto& m : report.arms[i].per_fold) bi.push_back(m.ba);
            for (const auto& m : report.arms[j].per_fold) bj.push_back(m.ba);
            const double p = wilcoxon_signed_rank(bi, bj);
            report.pairwise_p[i][j] = p;
            report.pairwise_p[j][i] = p;
        }
    }
    return report;
}

EvalReport run_crossval(const std::vector<Snippet>& snippets, const CrossvalConfig& cfg) {
    validate_fold_plan(cfg.plan);
    validate_arms(cfg.arms);
    if (cfg.repetitions < 1) throw std::invalid_argument("crossval: repetitions must be >= 1");
    if (snippets.empty()) throw DataError("crossval: empty dataset");

    // Which networks and which raw modalities the experiment needs.
    std::set<Modality> nets;
    for (const auto& arm : cfg.arms) {
        for (Modality m : arm_networks(arm)) nets.insert(m);
    }
    std::set<Modality> raw_needed;
    for (Modality m : nets) {
        if (m == Modality::FUSED) {
            raw_needed.insert({Modality::MAT});
            raw_needed.insert({Modality::IMU});
            raw_needed.insert({Modality::VID});
        } else {
            raw_needed.insert(m);
        }
    }
    for (Modality m : nets) {
        const auto it = cfg.specs.find(m);
        if (it == cfg.specs.end()) {
            throw std::invalid_argument(std::string("crossval: missing model spec for ") +
                                        modality_name(m));
        }
        const auto [frames, channels] = feature_shape(m);
        if (it->second.input_frames != frames || it->second.input_channels != channels) {
            throw std::invalid_argument(std::string("crossval: model spec input shape for ") +
                                        modality_name(m) + " must be " + std::to_string(frames) +
                                        "x" + std::to_string(channels));
        }
    }

    // Subjects in the plan must cover the dataset's snippets.
    std::map<std::string, std::vector<int>> by_subject;
    for (int i = 0; i < static_cast<int>(snippets.size()); ++i) {
        const Snippet& s = snippets[i];
        if (raw_needed.count(Modality::VID) && !s.video) {
            throw DataError("snippet '" + s.snippet_id + "' lacks video data");
        }
        if (raw_needed.count(Modality::MAT) && !s.mat) {
            throw DataError("snippet '" + s.snippet_id + "' lacks mat data");
        }
        if (raw_needed.count(Modality::IMU) && !s.imu) {
            throw DataError("snippet '" + s.snippet_id + "' lacks imu data");
        }
        by_subject[s.subject.value].push_back(i);
    }

    EvalReport report;
    WarningSink warnings{{}, &report.warnings};
    std::mutex warn_mutex;

    // Fold-independent preprocessing: geometric/temporal stages and the
    // per-snippet mat normalization. Only the z-scoring depends on the fold.
    const int n = static_cast<int>(snippets.size());
    std::vector<Eigen::MatrixXd> vid_prenorm(n), imu_pre(n);
    std::vector<std::optional<FeatureMatrix>> mat_features(n);
    parallel_for(
        n,
        [&](int i) {
            std::vector<std::string> local;
            if (raw_needed.count(Modality::VID)) {
                vid_prenorm[i] = video_prenorm(*snippets[i].video, &local);
            }
            if (raw_needed.count(Modality::IMU)) imu_pre[i] = imu_prenorm(*snippets[i].imu);
            if (raw_needed.count(Modality::MAT)) {
                mat_features[i] = finalize_mat_features(*snippets[i].mat, &local);
            }
            if (!local.empty()) {
                std::lock_guard<std::mutex> lock(warn_mutex);
                warnings.add(local);
            }
        },
        cfg.jobs);

    const int k = static_cast<int>(cfg.plan.folds.size());
    std::vector<ArmResult> arm_results(cfg.arms.size());
    for (std::size_t a = 0; a < cfg.arms.size(); ++a) arm_results[a].name = cfg.arms[a].name;

    for (int f = 0; f < k; ++f) {
        const auto& fold = cfg.plan.folds[f];
        std::set<std::string> train_set, test_set;
        for (const auto& s : fold.train_subjects) train_set.insert(s.value);
        for (const auto& s : fold.test_subjects) test_set.insert(s.value);

        std::vector<int> train_ids, test_ids;
        for (const auto& [subj, ids] : by_subject) {
            if (train_set.count(subj)) train_ids.insert(train_ids.end(), ids.begin(), ids.end());
            if (test_set.count(subj)) test_ids.insert(test_ids.end(), ids.begin(), ids.end());
        }
        if (train_ids.empty() || test_ids.empty()) {
            throw DataError("fold " + std::to_string(f) + " has an empty train or test set");
        }
        const auto count_class = [&](const std::vector<int>& ids, Label l) {
            return std::count_if(ids.begin(), ids.end(),
                                 [&](int i) { return snippets[i].label == l; });
        };
        if (count_class(train_ids, Label::FMplus) == 0 ||
            count_class(train_ids, Label::FMminus) == 0) {
            throw DataError("fold " + std::to_string(f) + " training set has a single class");
        }

        // Fold-local statistics, fitted on training subjects only.
        NormStats stats;
        if (nets.count(Modality::VID) || nets.count(Modality::FUSED)) {
            std::vector<Eigen::MatrixXd> train_pre;
            train_pre.reserve(train_ids.size());
            for (int i : train_ids) train_pre.push_back(vid_prenorm[i]);
            const NormStats vs = fit_video_stats(train_pre);
            stats.pos_mean = vs.pos_mean;
            stats.pos_std = vs.pos_std;
            stats.vel_mean = vs.vel_mean;
            stats.vel_std = vs.vel_std;
        }
        if (nets.count(Modality::IMU) || nets.count(Modality::FUSED)) {
            std::vector<Eigen::MatrixXd> train_pre;
            train_pre.reserve(train_ids.size());
            for (int i : train_ids) train_pre.push_back(imu_pre[i]);
            const NormStats is = fit_imu_stats(train_pre);
            stats.acc_mean = is.acc_mean;
            stats.acc_std = is.acc_std;
            stats.gyro_mean = is.gyro_mean;
            stats.gyro_std = is.gyro_std;
        }

        // Final per-snippet features for this fold.
        std::vector<int> all_ids = train_ids;
        all_ids.insert(all_ids.end(), test_ids.begin(), test_ids.end());
        std::map<int, std::map<Modality, FeatureMatrix>> feats;
        const bool need_mat = raw_needed.count(Modality::MAT) > 0;
        const bool need_imu = raw_needed.count(Modality::IMU) > 0;
        const bool need_vid = raw_needed.count(Modality::VID) > 0;
        for (int i : all_ids) {
            auto& slot = feats[i];
            if (need_mat) slot.emplace(Modality::MAT, *mat_features[i]);
            if (need_imu) slot.emplace(Modality::IMU, apply_imu_stats(imu_pre[i], stats));
            if (need_vid) slot.emplace(Modality::VID, apply_video_stats(vid_prenorm[i], stats));
            if (nets.count(Modality::FUSED)) {
                slot.emplace(Modality::FUSED,
                             early_fuse_features(slot.at(Modality::MAT), slot.at(Modality::IMU),
                                                 slot.at(Modality::VID)));
            }
        }

        // Train every needed network `repetitions` times, in parallel.
        std::vector<Modality> net_list(nets.begin(), nets.end());
        std::vector<Label> train_labels;
        for (int i : train_ids) train_labels.push_back(snippets[i].label);
        std::map<Modality, std::vector<FeatureMatrix>> train_inputs;
        for (Modality m : net_list) {
            std::vector<FeatureMatrix> in;
            in.reserve(train_ids.size());
            for (int i : train_ids) in.push_back(feats.at(i).at(m));
            train_inputs.emplace(m, std::move(in));
        }

        const int jobs_n = static_cast<int>(net_list.size()) * cfg.repetitions;
        std::vector<std::optional<nn::TrainedModel>> runs(jobs_n);
        parallel_for(
            jobs_n,
            [&](int j) {
                const Modality m = net_list[j / cfg.repetitions];
                const int rep = j % cfg.repetitions;
                nn::TrainConfig tc = cfg.train_cfg;
                for (int attempt = 0;; ++attempt) {
                    tc.seed = crossval_run_seed(cfg.train_cfg.seed, f, m, rep, attempt);
                    try {
                        runs[j] = nn::train(cfg.specs.at(m), train_inputs.at(m), train_labels, tc);
                        return;
                    } catch (const NumericError& e) {
                        if (attempt >= 2) {
                            throw NumericError(std::string("fold ") + std::to_string(f) + " " +
                                               modality_name(m) + " rep " + std::to_string(rep) +
                                               ": 3 attempts failed: " + e.what());
                        }
                    }
                }
            },
            cfg.jobs);

        std::map<Modality, const nn::TrainedModel*> best;
        for (std::size_t mi = 0; mi < net_list.size(); ++mi) {
            const nn::TrainedModel* sel = nullptr;
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                const auto& run = runs[mi * cfg.repetitions + rep];
                if (!sel || run->best_val_loss < sel->best_val_loss) sel = &*run;
            }
            best[net_list[mi]] = sel;
        }

        // Evaluate every arm on this fold's test set.
        std::vector<Label> truth;
        for (int i : test_ids) truth.push_back(snippets[i].label);
        std::map<int, std::map<Modality, double>> probs;
        for (int i : test_ids) {
            for (Modality m : net_list) {
                probs[i][m] = nn::predict_proba(*best.at(m), feats.at(i).at(m));
            }
        }
        for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
            const ArmSpec& arm = cfg.arms[a];
            std::vector<Label> preds;
            preds.reserve(test_ids.size());
            for (int i : test_ids) {
                std::vector<double> ps;
                for (Modality m : arm_networks(arm)) ps.push_back(probs.at(i).at(m));
                preds.push_back(late_fuse(ps, cfg.threshold).label);
            }
            arm_results[a].per_fold.push_back(compute_metrics(preds, truth));
        }
    }

    EvalReport out = aggregate_arms(std::move(arm_results));
    out.warnings = std::move(report.warnings);
    return out;
}

}  // namespace fmfusion::eval
