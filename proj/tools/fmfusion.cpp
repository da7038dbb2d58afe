// fmfusion command line tool: synthetic datasets, feature extraction,
// training, subject-grouped cross-validation, grid-search tuning, report
// rendering. Exit codes: 0 ok, 1 usage error, 2 data error, 3 numeric
// failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "fmfusion/errors.hpp"
#include "fmfusion/eval/crossval.hpp"
#include "fmfusion/eval/folds.hpp"
#include "fmfusion/eval/grid.hpp"
#include "fmfusion/eval/report_io.hpp"
#include "fmfusion/fusion.hpp"
#include "fmfusion/imu_features.hpp"
#include "fmfusion/manifest.hpp"
#include "fmfusion/mat_features.hpp"
#include "fmfusion/nn/checkpoint.hpp"
#include "fmfusion/parallel.hpp"
#include "fmfusion/signal.hpp"
#include "fmfusion/synth.hpp"
#include "fmfusion/video_features.hpp"

namespace fs = std::filesystem;
using namespace fmfusion;

namespace {

/// Relative output paths resolve under $FMFUSION_OUT_ROOT when it is set.
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* root = std::getenv("FMFUSION_OUT_ROOT")) {
            return fs::path(root) / p;
        }
    }
    return p;
}

Modality parse_modality(const std::string& s) {
    if (s == "mat") return Modality::MAT;
    if (s == "imu") return Modality::IMU;
    if (s == "vid") return Modality::VID;
    if (s == "fused") return Modality::FUSED;
    throw CLI::ValidationError("--modality", "unknown modality '" + s + "'");
}

std::vector<Modality> parse_modality_list(const std::string& csv) {
    std::vector<Modality> mods;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) mods.push_back(parse_modality(item));
    }
    if (mods.empty()) throw CLI::ValidationError("--modality", "empty modality list");
    return mods;
}

std::vector<std::string> parse_id_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<Snippet> load_all_snippets(const DatasetManifest& manifest) {
    std::vector<Snippet> snippets(manifest.snippets.size());
    parallel_for(static_cast<int>(manifest.snippets.size()), [&](int i) {
        snippets[i] = load_snippet(manifest, manifest.snippets[i].snippet_id);
    });
    return snippets;
}

std::string spec_line(const eval::GridPoint& p) {
    std::ostringstream os;
    os << p.c1.n_kernels << "@" << p.c1.kernel_len << " " << p.c2.n_kernels << "@"
       << p.c2.kernel_len << " " << p.c3.n_kernels << "@" << p.c3.kernel_len << " fc"
       << p.fc;
    return os.str();
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    SynthConfig cfg;
    std::string out;
};

void run_synth(const SynthArgs& a) {
    const SynthDataset ds = synthesize_dataset(a.cfg);
    const fs::path dir = resolve_out(a.out);
    save_dataset(ds, dir);
    int plus = 0;
    for (const auto& s : ds.snippets) plus += s.label == Label::FMplus;
    std::cout << "wrote " << ds.snippets.size() << " snippets (" << plus << " FM+, "
              << ds.snippets.size() - plus << " FM-) from " << a.cfg.n_subjects
              << " subjects to " << dir.string() << "\n";
}

// ------------------------------------------------------------- preprocess

struct PreprocessArgs {
    std::string manifest;
    std::string out;
    std::string modalities = "mat,imu,vid";
    bool with_acc = false;
    bool with_deriv = false;
};

void run_preprocess(const PreprocessArgs& a) {
    const DatasetManifest manifest = load_manifest(a.manifest);
    if (manifest.snippets.empty()) throw DataError("manifest has no snippets");
    const std::vector<Modality> mods = parse_modality_list(a.modalities);
    const std::set<Modality> mod_set(mods.begin(), mods.end());
    if (mod_set.count(Modality::FUSED)) {
        throw CLI::ValidationError("--modality", "preprocess works on raw modalities");
    }
    const std::vector<Snippet> snippets = load_all_snippets(manifest);
    const fs::path dir = resolve_out(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir.string());

    const int n = static_cast<int>(snippets.size());
    std::vector<Eigen::MatrixXd> vid_pre(n), imu_pre(n);
    NormStats stats;
    if (mod_set.count(Modality::VID)) {
        parallel_for(n, [&](int i) { vid_pre[i] = video_prenorm(*snippets[i].video); });
        const NormStats vs = fit_video_stats(vid_pre);
        stats.pos_mean = vs.pos_mean;
        stats.pos_std = vs.pos_std;
        stats.vel_mean = vs.vel_mean;
        stats.vel_std = vs.vel_std;
    }
    if (mod_set.count(Modality::IMU)) {
        parallel_for(n, [&](int i) { imu_pre[i] = imu_prenorm(*snippets[i].imu); });
        const NormStats is = fit_imu_stats(imu_pre);
        stats.acc_mean = is.acc_mean;
        stats.acc_std = is.acc_std;
        stats.gyro_mean = is.gyro_mean;
        stats.gyro_std = is.gyro_std;
    }

    // Acceleration columns (when requested) get their own pooled z-scoring.
    double acc_mean = 0.0, acc_std = 1.0;
    if (a.with_acc && mod_set.count(Modality::VID)) {
        double sum = 0.0, count = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += video_acceleration_block(vid_pre[i]).sum();
            count += kVideoFrames * 2.0 * kKeypoints;
        }
        acc_mean = sum / count;
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            ss += (video_acceleration_block(vid_pre[i]).array() - acc_mean).square().sum();
        }
        acc_std = std::max(std::sqrt(ss / count), kStdFloor);
    }

    for (int i = 0; i < n; ++i) {
        const std::string& id = snippets[i].snippet_id;
        if (mod_set.count(Modality::MAT)) {
            const FeatureMatrix fm = finalize_mat_features(*snippets[i].mat);
            if (a.with_deriv) {
                Eigen::MatrixXd wide(kMatFrames, 12);
                wide.leftCols(6) = fm.data();
                wide.rightCols(6) = mat_derivative_block(fm);
                write_csv_matrix(wide, dir / (id + ".mat.csv"));
            } else {
                write_csv_matrix(fm.data(), dir / (id + ".mat.csv"));
            }
        }
        if (mod_set.count(Modality::IMU)) {
            write_csv_matrix(apply_imu_stats(imu_pre[i], stats).data(), dir / (id + ".imu.csv"));
        }
        if (mod_set.count(Modality::VID)) {
            const FeatureMatrix fm = apply_video_stats(vid_pre[i], stats);
            if (a.with_acc) {
                Eigen::MatrixXd wide(kVideoFrames, 90);
                wide.leftCols(60) = fm.data();
                wide.rightCols(30) =
                    (video_acceleration_block(vid_pre[i]).array() - acc_mean) / acc_std;
                write_csv_matrix(wide, dir / (id + ".vid.csv"));
            } else {
                write_csv_matrix(fm.data(), dir / (id + ".vid.csv"));
            }
        }
    }
    {
        std::ofstream out(dir / "stats.txt");
        out << "# pooled normalization statistics fitted on the full dataset\n";
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "pos_mean %.9g\npos_std %.9g\nvel_mean %.9g\nvel_std %.9g\n"
                      "acc_mean %.9g\nacc_std %.9g\ngyro_mean %.9g\ngyro_std %.9g\n",
                      stats.pos_mean, stats.pos_std, stats.vel_mean, stats.vel_std,
                      stats.acc_mean, stats.acc_std, stats.gyro_mean, stats.gyro_std);
        out << buf;
    }
    std::cout << "wrote features for " << n << " snippets to " << dir.string() << "\n";
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string manifest;
    std::string out;
    std::string modality = "vid";
    std::string preset;
    int reps = 1;
    std::uint64_t seed = 1;
    int max_epochs = 200;
    int jobs = 0;
};

void run_train(const TrainArgs& a) {
    const Modality mod = parse_modality(a.modality);
    const std::string preset = a.preset.empty()
                                   ? std::string(mod == Modality::MAT   ? "mat-1"
                                                 : mod == Modality::IMU ? "imu-1"
                                                 : mod == Modality::VID ? "vid-1"
                                                                        : "fused-1")
                                   : a.preset;
    const nn::ModelSpec spec = nn::preset_model_spec(preset);
    const auto [frames, channels] = feature_shape(mod);
    if (spec.input_frames != frames || spec.input_channels != channels) {
        throw CLI::ValidationError("--preset", "preset '" + preset + "' does not fit modality '" +
                                                   a.modality + "'");
    }

    const DatasetManifest manifest = load_manifest(a.manifest);
    const std::vector<Snippet> snippets = load_all_snippets(manifest);
    if (snippets.size() < 2) throw DataError("need at least two snippets to train");

    // Whole-dataset statistics; the crossval command is the leakage-
    // controlled path.
    const int n = static_cast<int>(snippets.size());
    const bool fused = mod == Modality::FUSED;
    std::vector<Eigen::MatrixXd> vid_pre(n), imu_pre(n);
    NormStats stats;
    if (fused || mod == Modality::VID) {
        parallel_for(n, [&](int i) { vid_pre[i] = video_prenorm(*snippets[i].video); });
        const NormStats vs = fit_video_stats(vid_pre);
        stats.pos_mean = vs.pos_mean;
        stats.pos_std = vs.pos_std;
        stats.vel_mean = vs.vel_mean;
        stats.vel_std = vs.vel_std;
    }
    if (fused || mod == Modality::IMU) {
        parallel_for(n, [&](int i) { imu_pre[i] = imu_prenorm(*snippets[i].imu); });
        const NormStats is = fit_imu_stats(imu_pre);
        stats.acc_mean = is.acc_mean;
        stats.acc_std = is.acc_std;
        stats.gyro_mean = is.gyro_mean;
        stats.gyro_std = is.gyro_std;
    }
    std::vector<FeatureMatrix> inputs;
    std::vector<Label> labels;
    for (int i = 0; i < n; ++i) {
        switch (mod) {
            case Modality::MAT: inputs.push_back(finalize_mat_features(*snippets[i].mat)); break;
            case Modality::IMU: inputs.push_back(apply_imu_stats(imu_pre[i], stats)); break;
            case Modality::VID: inputs.push_back(apply_video_stats(vid_pre[i], stats)); break;
            case Modality::FUSED:
                inputs.push_back(early_fuse_features(finalize_mat_features(*snippets[i].mat),
                                                     apply_imu_stats(imu_pre[i], stats),
                                                     apply_video_stats(vid_pre[i], stats)));
                break;
        }
        labels.push_back(snippets[i].label);
    }

    nn::TrainConfig tc;
    tc.max_epochs = a.max_epochs;
    std::vector<std::optional<nn::TrainedModel>> runs(a.reps);
    parallel_for(
        a.reps,
        [&](int rep) {
            nn::TrainConfig local = tc;
            local.seed = derive_seed(a.seed, {0x7124ull, static_cast<std::uint64_t>(rep)});
            runs[rep] = nn::train(spec, inputs, labels, local);
        },
        a.jobs);
    int best = 0;
    for (int r = 1; r < a.reps; ++r) {
        if (runs[r]->best_val_loss < runs[best]->best_val_loss) best = r;
    }
    nn::TrainedModel& tm = *runs[best];

    const fs::path dir = resolve_out(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir.string());
    nn::save_model(tm, dir / "model.ckpt");
    {
        std::ofstream log(dir / "train_log.csv");
        log << "epoch,train_loss,val_loss\n";
        char buf[96];
        for (std::size_t e = 0; e < tm.train_log.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g\n", e, tm.train_log[e].train_loss,
                          tm.train_log[e].val_loss);
            log << buf;
        }
    }
    std::cout << "trained " << preset << " on " << n << " snippets; best val loss "
              << tm.best_val_loss << " (epoch " << tm.best_epoch << ", run " << best << "/"
              << a.reps << "); checkpoint at " << (dir / "model.ckpt").string() << "\n";
}

// --------------------------------------------------------------- crossval

struct CrossvalArgs {
    std::string manifest;
    std::string out = "crossval-out";
    std::string modalities = "mat,imu,vid";
    std::string fusion = "none";
    int folds = 9;
    int reps = 20;
    std::uint64_t seed = 1;
    int max_epochs = 200;
    int jobs = 0;
    double threshold = 0.5;
    std::string preset_mat = "mat-1", preset_imu = "imu-1", preset_vid = "vid-1",
                preset_fused = "fused-1";
};

void run_crossval_cmd(const CrossvalArgs& a) {
    const std::vector<Modality> mods = parse_modality_list(a.modalities);
    for (Modality m : mods) {
        if (m == Modality::FUSED) {
            throw CLI::ValidationError("--modality", "list raw modalities; use --fusion early");
        }
    }

    eval::CrossvalConfig cfg;
    cfg.repetitions = a.reps;
    cfg.threshold = a.threshold;
    cfg.jobs = a.jobs;
    cfg.train_cfg.max_epochs = a.max_epochs;
    cfg.train_cfg.seed = a.seed;

    const auto arm_name = [](const std::vector<Modality>& ms) {
        std::string name;
        for (Modality m : ms) {
            if (!name.empty()) name += "+";
            name += modality_name(m);
        }
        return name;
    };

    if (a.fusion == "none") {
        for (Modality m : mods) cfg.arms.push_back({arm_name({m}), {m}, FusionMode::Late});
    } else if (a.fusion == "late") {
        FusionConfig fc{FusionMode::Late, mods, a.threshold};
        validate_fusion_config(fc);
        for (Modality m : mods) cfg.arms.push_back({arm_name({m}), {m}, FusionMode::Late});
        const std::string fused_name =
            mods.size() == 3 ? "ALL 3-Nets" : arm_name(mods) + " (late)";
        cfg.arms.push_back({fused_name, mods, FusionMode::Late});
    } else if (a.fusion == "early") {
        FusionConfig fc{FusionMode::Early, mods, a.threshold};
        validate_fusion_config(fc);
        cfg.arms.push_back({"ALL 1-Net", mods, FusionMode::Early});
    } else {
        throw CLI::ValidationError("--fusion", "want none, late, or early");
    }

    cfg.specs.emplace(Modality::MAT, nn::preset_model_spec(a.preset_mat));
    cfg.specs.emplace(Modality::IMU, nn::preset_model_spec(a.preset_imu));
    cfg.specs.emplace(Modality::VID, nn::preset_model_spec(a.preset_vid));
    cfg.specs.emplace(Modality::FUSED, nn::preset_model_spec(a.preset_fused));

    const DatasetManifest manifest = load_manifest(a.manifest);
    if (manifest.subjects.empty()) throw DataError("manifest has no subjects");
    cfg.plan = eval::make_fold_plan(manifest.subjects, a.folds, a.seed);

    const std::vector<Snippet> snippets = load_all_snippets(manifest);
    const eval::EvalReport report = eval::run_crossval(snippets, cfg);

    const fs::path dir = resolve_out(a.out);
    eval::write_report_files(report, dir);
    std::cout << eval::render_report(report);
    std::cout << "report files written to " << dir.string() << "\n";
}

// ------------------------------------------------------------------- tune

struct TuneArgs {
    std::string manifest;
    std::string out = "tune-out";
    std::string modality = "vid";
    int budget = 0;  // 0 = full 4800-point space
    int repeats = 3;
    int top = 10;
    std::uint64_t seed = 1;
    int max_epochs = 200;
    int jobs = 0;
    std::string holdout_subjects;
    std::string cv_subjects;
};

void run_tune(const TuneArgs& a) {
    const DatasetManifest manifest = load_manifest(a.manifest);
    std::vector<Snippet> all = load_all_snippets(manifest);

    std::vector<Snippet> tuning;
    if (!a.holdout_subjects.empty()) {
        const auto ids = parse_id_list(a.holdout_subjects);
        const std::set<std::string> keep(ids.begin(), ids.end());
        std::set<std::string> known;
        for (const auto& s : manifest.subjects) known.insert(s.value);
        for (const auto& id : ids) {
            if (!known.count(id)) throw DataError("holdout subject '" + id + "' not in manifest");
        }
        for (auto& s : all) {
            if (keep.count(s.subject.value)) tuning.push_back(std::move(s));
        }
    } else {
        tuning = std::move(all);
    }

    std::vector<SubjectId> cv_list;
    if (!a.cv_subjects.empty()) {
        for (const auto& id : parse_id_list(a.cv_subjects)) cv_list.emplace_back(id);
    }

    eval::GridSearchConfig cfg;
    cfg.modality = parse_modality(a.modality);
    cfg.repeats = a.repeats;
    cfg.jobs = a.jobs;
    cfg.train_cfg.max_epochs = a.max_epochs;
    cfg.train_cfg.seed = a.seed;

    const std::vector<eval::GridPoint> points =
        a.budget > 0 ? eval::sample_grid(a.budget, a.seed) : eval::full_grid();
    const std::vector<eval::TunedSpec> ranked =
        eval::grid_search(tuning, points, cfg, cv_list.empty() ? nullptr : &cv_list);

    const int emit = std::min<int>(a.top, static_cast<int>(ranked.size()));
    if (emit < a.top) {
        std::cerr << "warning: only " << emit << " configurations evaluated, fewer than --top "
                  << a.top << "\n";
    }
    const fs::path dir = resolve_out(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir.string());
    {
        std::ofstream out(dir / "ranked_specs.txt");
        out << "# " << a.modality << " grid search: evaluated " << points.size() << " configs x "
            << cfg.repeats << " repeats\n";
        char buf[160];
        for (int i = 0; i < emit; ++i) {
            std::snprintf(buf, sizeof buf, "%2d  %s  val_loss=%.9g\n", i + 1,
                          spec_line(ranked[i].point).c_str(), ranked[i].mean_val_loss);
            out << buf;
        }
    }
    {
        std::ofstream out(dir / "ranking.csv");
        out << "rank,k1,s1,k2,s2,k3,s3,fc,mean_val_loss\n";
        char buf[160];
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            const auto& p = ranked[i].point;
            std::snprintf(buf, sizeof buf, "%zu,%d,%d,%d,%d,%d,%d,%d,%.9g\n", i + 1,
                          p.c1.n_kernels, p.c1.kernel_len, p.c2.n_kernels, p.c2.kernel_len,
                          p.c3.n_kernels, p.c3.kernel_len, p.fc, ranked[i].mean_val_loss);
            out << buf;
        }
    }
    std::cout << "evaluated " << points.size() << " configs x " << cfg.repeats
              << " repeats on " << tuning.size() << " tuning snippets; top " << emit
              << " written to " << (dir / "ranked_specs.txt").string() << "\n";
}

// ----------------------------------------------------------------- report

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out = "report-out";
};

void run_report(const ReportArgs& a) {
    std::vector<eval::ArmResult> arms;
    std::set<std::string> names;
    for (const auto& in : a.inputs) {
        for (auto& arm : eval::read_perfold_csv(in)) {
            if (!names.insert(arm.name).second) {
                throw DataError("duplicate arm '" + arm.name + "' across input files");
            }
            arms.push_back(std::move(arm));
        }
    }
    if (arms.empty()) throw DataError("no per-fold rows found");
    const std::size_t folds = arms.front().per_fold.size();
    for (const auto& arm : arms) {
        if (arm.per_fold.size() != folds) {
            throw DataError("arm '" + arm.name + "' has a different fold count");
        }
    }
    const eval::EvalReport report = eval::aggregate_arms(std::move(arms));
    const fs::path dir = resolve_out(a.out);
    eval::write_report_files(report, dir);
    std::cout << eval::render_report(report);
    std::cout << "report files written to " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal infant movement classification experiments"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset on disk");
    synth->add_option("--out", synth_args.out, "Output directory for manifest and data files")
        ->required();
    synth->add_option("--subjects", synth_args.cfg.n_subjects, "Number of subjects")
        ->check(CLI::PositiveNumber);
    synth->add_option("--per-subject", synth_args.cfg.snippets_per_subject,
                      "Snippets per subject")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_args.cfg.seed, "Master random seed");
    synth->add_option("--separability", synth_args.cfg.separability,
                      "Class-signal amplitude in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--balance", synth_args.cfg.class_balance,
                      "Fraction of FM+ snippets per subject, in (0,1)")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--name", synth_args.cfg.name, "Dataset name in the manifest");
    synth->callback([&] { run_synth(synth_args); });

    PreprocessArgs pre_args;
    auto* pre = app.add_subcommand("preprocess",
                                   "Extract per-snippet feature matrices to CSV files");
    pre->add_option("--manifest", pre_args.manifest, "Dataset manifest file")->required();
    pre->add_option("--out", pre_args.out, "Output directory for feature files")->required();
    pre->add_option("--modality", pre_args.modalities,
                    "Comma list of raw modalities (mat,imu,vid)");
    pre->add_flag("--with-acc", pre_args.with_acc,
                  "Append keypoint acceleration columns to the video features");
    pre->add_flag("--with-deriv", pre_args.with_deriv,
                  "Append first-derivative columns to the mat features");
    pre->callback([&] { run_preprocess(pre_args); });

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train one network on a whole dataset");
    train->add_option("--manifest", train_args.manifest, "Dataset manifest file")->required();
    train->add_option("--out", train_args.out, "Output directory for checkpoint and log")
        ->required();
    train->add_option("--modality", train_args.modality, "mat, imu, vid, or fused");
    train->add_option("--preset", train_args.preset,
                      "Model preset name (default: the modality's -1 preset)");
    train->add_option("--reps", train_args.reps,
                      "Training repetitions; the best validation loss wins")
        ->check(CLI::PositiveNumber);
    train->add_option("--seed", train_args.seed, "Master random seed");
    train->add_option("--max-epochs", train_args.max_epochs, "Epoch cap")
        ->check(CLI::PositiveNumber);
    train->add_option("--jobs", train_args.jobs, "Parallel workers (0 = all cores)");
    train->callback([&] { run_train(train_args); });

    CrossvalArgs cv_args;
    auto* cv = app.add_subcommand("crossval",
                                  "Subject-grouped k-fold cross-validation with report");
    cv->add_option("--manifest", cv_args.manifest, "Dataset manifest file")->required();
    cv->add_option("--out", cv_args.out, "Output directory for report files");
    cv->add_option("--modality", cv_args.modalities, "Comma list of raw modalities to evaluate");
    cv->add_option("--fusion", cv_args.fusion,
                   "none (singles only), late (singles + averaged probabilities), or early "
                   "(one network on concatenated features)");
    cv->add_option("--folds", cv_args.folds, "Number of subject-grouped folds")
        ->check(CLI::PositiveNumber);
    cv->add_option("--reps", cv_args.reps, "Training repetitions per network per fold")
        ->check(CLI::PositiveNumber);
    cv->add_option("--seed", cv_args.seed, "Experiment master seed");
    cv->add_option("--max-epochs", cv_args.max_epochs, "Epoch cap per training run")
        ->check(CLI::PositiveNumber);
    cv->add_option("--jobs", cv_args.jobs, "Parallel workers (0 = all cores)");
    cv->add_option("--threshold", cv_args.threshold, "Decision threshold on the probability")
        ->check(CLI::Range(0.0, 1.0));
    cv->add_option("--preset-mat", cv_args.preset_mat, "MAT network preset");
    cv->add_option("--preset-imu", cv_args.preset_imu, "IMU network preset");
    cv->add_option("--preset-vid", cv_args.preset_vid, "VID network preset");
    cv->add_option("--preset-fused", cv_args.preset_fused, "Early-fusion network preset");
    cv->callback([&] { run_crossval_cmd(cv_args); });

    TuneArgs tune_args;
    auto* tune = app.add_subcommand("tune", "Grid-search fine tuning on a held-out subject set");
    tune->add_option("--manifest", tune_args.manifest, "Dataset manifest file")->required();
    tune->add_option("--out", tune_args.out, "Output directory for the ranked specs");
    tune->add_option("--modality", tune_args.modality, "mat, imu, vid, or fused");
    tune->add_option("--budget", tune_args.budget,
                     "Random subset size of the 4800-point grid (0 = full grid)")
        ->check(CLI::NonNegativeNumber);
    tune->add_option("--repeats", tune_args.repeats, "Training repeats per grid point")
        ->check(CLI::PositiveNumber);
    tune->add_option("--top", tune_args.top, "How many best specs to write")
        ->check(CLI::PositiveNumber);
    tune->add_option("--seed", tune_args.seed, "Master random seed");
    tune->add_option("--max-epochs", tune_args.max_epochs, "Epoch cap per training run")
        ->check(CLI::PositiveNumber);
    tune->add_option("--jobs", tune_args.jobs, "Parallel workers (0 = all cores)");
    tune->add_option("--holdout-subjects", tune_args.holdout_subjects,
                     "Comma list of subjects to tune on (default: all in the manifest)");
    tune->add_option("--cv-subjects", tune_args.cv_subjects,
                     "Comma list of cross-validation subjects that must stay disjoint");
    tune->callback([&] { run_tune(tune_args); });

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Re-render tables from perfold.csv files");
    report->add_option("--in", report_args.inputs, "One or more perfold.csv files")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_args.out, "Output directory for the rendered report");
    report->callback([&] { run_report(report_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
