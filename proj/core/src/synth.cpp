#include "fmfusion/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fmfusion/errors.hpp"
#include "fmfusion/rng.hpp"

namespace fmfusion {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Base skeleton offsets (y up, head up, units ~pixels). Keypoint order:
// nose, eyes, shoulders, elbows, wrists, hips, knees, ankles.
constexpr double kBaseSkeleton[kKeypoints][2] = {
    {0, 170},  {-10, 180}, {10, 180},  {-35, 120}, {35, 120},
    {-55, 80}, {55, 80},   {-70, 30},  {70, 30},   {-25, 0},
    {25, 0},   {-30, -70}, {30, -70},  {-35, -140}, {35, -140},
};

// 1-based keypoints that carry the fidgety oscillation; extremities move
// with full amplitude, the adjoining joints with half.
constexpr int kFullOscKp[] = {8, 9, 14, 15};   // wrists, ankles
constexpr int kHalfOscKp[] = {6, 7, 12, 13};   // elbows, knees

struct SubjectTraits {
    double torso_scale;
    double orient;
    double cx, cy;
    double baseline_amp;
    double noise_scale;
};

SubjectTraits draw_subject_traits(Rng& rng) {
    SubjectTraits t;
    t.torso_scale = rng.uniform(0.8, 1.25);
    t.orient = rng.uniform(-0.5, 0.5);
    t.cx = rng.uniform(880.0, 1040.0);
    t.cy = rng.uniform(480.0, 600.0);
    t.baseline_amp = rng.uniform(0.6, 1.4);
    t.noise_scale = rng.uniform(0.7, 1.3);
    return t;
}

double clamp_band(double f) { return std::clamp(f, 0.5, 3.0); }

RawVideoKeypoints synth_video(Rng& base, Rng& osc, const SubjectTraits& st, double osc_gain) {
    Eigen::MatrixXd frames(kVideoFrames, 2 * kKeypoints);

    // Baseline latents.
    const double drift_f = base.uniform(0.08, 0.3);
    const double drift_amp = base.uniform(5.0, 15.0) * st.baseline_amp;
    const double drift_p1 = base.uniform(0.0, kTwoPi);
    const double drift_p2 = base.uniform(0.0, kTwoPi);
    double sway_amp[kKeypoints], sway_f[kKeypoints], sway_px[kKeypoints], sway_py[kKeypoints];
    for (int k = 0; k < kKeypoints; ++k) {
        sway_amp[k] = base.uniform(2.0, 6.0) * st.baseline_amp;
        sway_f[k] = base.uniform(0.1, 0.4);
        sway_px[k] = base.uniform(0.0, kTwoPi);
        sway_py[k] = base.uniform(0.0, kTwoPi);
    }

    // Oscillation latents, drawn for every snippet; amplitude is gated by
    // osc_gain so the draw sequence never depends on the label.
    const double f0 = osc.uniform(0.5, 3.0);
    double osc_amp[kKeypoints] = {};
    double osc_f[kKeypoints], osc_phase[kKeypoints], osc_dir[kKeypoints];
    for (int k = 0; k < kKeypoints; ++k) {
        osc_f[k] = clamp_band(f0 * osc.uniform(0.8, 1.2));
        osc_phase[k] = osc.uniform(0.0, kTwoPi);
        osc_dir[k] = osc.uniform() < 0.5 ? -1.0 : 1.0;
        const double jitter = osc.uniform(0.8, 1.2);
        for (int kp : kFullOscKp) {
            if (kp - 1 == k) osc_amp[k] = 16.0 * jitter;
        }
        for (int kp : kHalfOscKp) {
            if (kp - 1 == k) osc_amp[k] = 8.0 * jitter;
        }
        osc_amp[k] *= st.torso_scale * osc_gain;
    }

    const double co = std::cos(st.orient), so = std::sin(st.orient);
    for (int f = 0; f < kVideoFrames; ++f) {
        const double t = f * kVideoDt;
        const double dx = drift_amp * std::sin(kTwoPi * drift_f * t + drift_p1);
        const double dy = drift_amp * std::sin(kTwoPi * 0.8 * drift_f * t + drift_p2);
        for (int k = 0; k < kKeypoints; ++k) {
            double bx = kBaseSkeleton[k][0] + sway_amp[k] * std::sin(kTwoPi * sway_f[k] * t + sway_px[k]);
            double by = kBaseSkeleton[k][1] + sway_amp[k] * std::sin(kTwoPi * sway_f[k] * t + sway_py[k]);
            bx += osc_amp[k] * std::cos(kTwoPi * osc_f[k] * t + osc_phase[k]);
            by += osc_amp[k] * osc_dir[k] * std::sin(kTwoPi * osc_f[k] * t + osc_phase[k]);
            bx *= st.torso_scale;
            by *= st.torso_scale;
            double x = st.cx + co * bx - so * by + dx;
            double y = st.cy + so * bx + co * by + dy;
            x += base.normal(0.0, 2.0 * st.noise_scale);
            y += base.normal(0.0, 2.0 * st.noise_scale);
            // Occasional tracking outlier; removed later by the medoid stage.
            if (base.uniform() < 0.01) {
                const double mag = base.uniform(30.0, 80.0);
                const double ang = base.uniform(0.0, kTwoPi);
                x += mag * std::cos(ang);
                y += mag * std::sin(ang);
            }
            frames(f, 2 * k) = x;
            frames(f, 2 * k + 1) = y;
        }
    }
    return RawVideoKeypoints{std::move(frames)};
}

struct Blob {
    double row0, col0;       // rest position, 1-based grid coordinates
    double sigma, peak;
    double drift_ar, drift_ac, drift_pr, drift_pc;
    double osc_amp, osc_f, osc_phase, osc_dir;
};

RawMatFrames synth_mat(Rng& base, Rng& osc, const SubjectTraits& st, double osc_gain) {
    Eigen::MatrixXd frames = Eigen::MatrixXd::Zero(kMatFrames, kMatGrid * kMatGrid);

    const double drift_f = base.uniform(0.08, 0.3);
    const double breath_f = base.uniform(0.25, 0.45);
    const double breath_p = base.uniform(0.0, kTwoPi);
    const double f0 = osc.uniform(0.5, 3.0);

    Blob blobs[2];
    for (int b = 0; b < 2; ++b) {
        Blob& bl = blobs[b];
        bl.row0 = b == 0 ? base.uniform(5.0, 9.0) : base.uniform(18.0, 24.0);
        bl.col0 = base.uniform(13.0, 19.0);
        bl.sigma = base.uniform(1.8, 2.6);
        bl.peak = (b == 0 ? base.uniform(22.0, 34.0) : base.uniform(28.0, 42.0)) * st.baseline_amp;
        bl.drift_ar = base.uniform(0.8, 1.8);
        bl.drift_ac = base.uniform(0.8, 1.8);
        bl.drift_pr = base.uniform(0.0, kTwoPi);
        bl.drift_pc = base.uniform(0.0, kTwoPi);
        bl.osc_amp = 3.0 * osc.uniform(0.8, 1.2) * osc_gain;
        bl.osc_f = clamp_band(f0 * osc.uniform(0.8, 1.2));
        bl.osc_phase = osc.uniform(0.0, kTwoPi);
        bl.osc_dir = osc.uniform() < 0.5 ? -1.0 : 1.0;
    }

    const double dt = 5.0 / kMatFrames;
    for (int f = 0; f < kMatFrames; ++f) {
        const double t = f * dt;
        const double breath = 1.0 + 0.08 * std::sin(kTwoPi * breath_f * t + breath_p);
        for (const Blob& bl : blobs) {
            const double r = bl.row0 + bl.drift_ar * std::sin(kTwoPi * drift_f * t + bl.drift_pr) +
                             bl.osc_amp * std::sin(kTwoPi * bl.osc_f * t + bl.osc_phase);
            const double c = bl.col0 + bl.drift_ac * std::sin(kTwoPi * 0.85 * drift_f * t + bl.drift_pc) +
                             bl.osc_amp * bl.osc_dir * std::cos(kTwoPi * bl.osc_f * t + bl.osc_phase);
            const double inv2s2 = 1.0 / (2.0 * bl.sigma * bl.sigma);
            const int r_lo = std::max(0, static_cast<int>(std::floor(r - 4 * bl.sigma)) - 1);
            const int r_hi = std::min(kMatGrid - 1, static_cast<int>(std::ceil(r + 4 * bl.sigma)));
            const int c_lo = std::max(0, static_cast<int>(std::floor(c - 4 * bl.sigma)) - 1);
            const int c_hi = std::min(kMatGrid - 1, static_cast<int>(std::ceil(c + 4 * bl.sigma)));
            for (int i = r_lo; i <= r_hi; ++i) {
                for (int j = c_lo; j <= c_hi; ++j) {
                    // Grid coordinates are 1-based in the blob model.
                    const double di = (i + 1) - r, dj = (j + 1) - c;
                    frames(f, i * kMatGrid + j) +=
                        bl.peak * breath * std::exp(-(di * di + dj * dj) * inv2s2);
                }
            }
        }
        for (int cell = 0; cell < kMatGrid * kMatGrid; ++cell) {
            frames(f, cell) = std::max(0.0, frames(f, cell) + base.normal(0.0, 0.6 * st.noise_scale));
        }
    }
    return RawMatFrames{std::move(frames)};
}

RawImuFrames synth_imu(Rng& base, Rng& osc, const SubjectTraits& st, double osc_gain) {
    Eigen::MatrixXd frames(kImuFrames, kImuChannels);
    const double dt = 5.0 / kImuFrames;
    const double drift_f = base.uniform(0.08, 0.3);
    const double f0 = osc.uniform(0.5, 3.0);
    // Fidgety motion shows mostly in the distal sensors (feet), less at the
    // shoulders. Sensor order: shoulders, hips, feet.
    const double sensor_weight[kImuSensors] = {0.6, 0.6, 1.0, 1.0, 1.3, 1.3};

    double offset[kImuChannels], drift_amp[kImuChannels], drift_phase[kImuChannels];
    double noise_sd[kImuChannels], osc_amp[kImuChannels], osc_f[kImuChannels], osc_phase[kImuChannels];
    for (int s = 0; s < kImuSensors; ++s) {
        const double gx = base.uniform(-2.0, 2.0), gy = base.uniform(-2.0, 2.0),
                     gz = base.uniform(7.0, 9.5);
        const double fs = clamp_band(f0 * osc.uniform(0.8, 1.2));
        for (int c = 0; c < 6; ++c) {
            const int col = 6 * s + c;
            const bool accel = c < 3;
            offset[col] = accel ? (c == 0 ? gx : c == 1 ? gy : gz) : 0.0;
            drift_amp[col] = (accel ? base.uniform(0.2, 0.6) : base.uniform(0.1, 0.35)) * st.baseline_amp;
            drift_phase[col] = base.uniform(0.0, kTwoPi);
            noise_sd[col] = (accel ? 0.25 : 0.2) * st.noise_scale;
            osc_amp[col] = (accel ? 1.5 : 1.1) * sensor_weight[s] * osc.uniform(0.7, 1.3) * osc_gain;
            osc_f[col] = fs;
            osc_phase[col] = osc.uniform(0.0, kTwoPi);
        }
    }
    for (int f = 0; f < kImuFrames; ++f) {
        const double t = f * dt;
        for (int col = 0; col < kImuChannels; ++col) {
            double v = offset[col] + drift_amp[col] * std::sin(kTwoPi * drift_f * t + drift_phase[col]);
            v += osc_amp[col] * std::sin(kTwoPi * osc_f[col] * t + osc_phase[col]);
            v += base.normal(0.0, noise_sd[col]);
            frames(f, col) = v;
        }
    }
    return RawImuFrames{std::move(frames)};
}

std::string subject_name(int idx) {
    std::ostringstream os;
    os << "S" << std::setw(3) << std::setfill('0') << idx + 1;
    return os.str();
}

}  // namespace

SynthDataset synthesize_dataset(const SynthConfig& cfg) {
    if (cfg.n_subjects <= 0) throw std::invalid_argument("n_subjects must be positive");
    if (cfg.snippets_per_subject <= 0) {
        throw std::invalid_argument("snippets_per_subject must be positive");
    }
    if (!(cfg.class_balance > 0.0 && cfg.class_balance < 1.0)) {
        throw std::invalid_argument("class_balance must be in (0,1)");
    }
    if (!(cfg.separability >= 0.0 && cfg.separability <= 1.0)) {
        throw std::invalid_argument("separability must be in [0,1]");
    }

    SynthDataset ds;
    ds.manifest.dataset_name = cfg.name;

    for (int s = 0; s < cfg.n_subjects; ++s) {
        const std::string sid = subject_name(s);
        ds.manifest.subjects.emplace_back(sid);

        Rng subj_rng(derive_seed(cfg.seed, {0x50B1ull, static_cast<std::uint64_t>(s)}));
        const SubjectTraits traits = draw_subject_traits(subj_rng);

        // Label assignment stream is independent of the content streams.
        const int m = cfg.snippets_per_subject;
        int n_plus = static_cast<int>(std::lround(cfg.class_balance * m));
        n_plus = std::clamp(n_plus, 0, m);
        std::vector<Label> labels(static_cast<std::size_t>(m), Label::FMminus);
        std::fill_n(labels.begin(), n_plus, Label::FMplus);
        Rng label_rng(derive_seed(cfg.seed, {0x1ABE1ull, static_cast<std::uint64_t>(s)}));
        label_rng.shuffle(labels);

        for (int i = 0; i < m; ++i) {
            const std::uint64_t h =
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i)});
            const Label label = labels[static_cast<std::size_t>(i)];
            const double gain = (label == Label::FMplus) ? cfg.separability : 0.0;

            Snippet sn;
            {
                std::ostringstream os;
                os << sid << "_" << std::setw(4) << std::setfill('0') << i;
                sn.snippet_id = os.str();
            }
            sn.subject = SubjectId(sid);
            sn.label = label;
            if (cfg.with_video) {
                // Per-(snippet, modality) visibility makes each modality an
                // independently corrupted copy of the class signal.
                Rng base(derive_seed(h, {1}));
                Rng osc(derive_seed(h, {2}));
                sn.video = synth_video(base, osc, traits, gain * osc.uniform(0.6, 1.0));
            }
            if (cfg.with_mat) {
                Rng base(derive_seed(h, {3}));
                Rng osc(derive_seed(h, {4}));
                sn.mat = synth_mat(base, osc, traits, gain * osc.uniform(0.6, 1.0));
            }
            if (cfg.with_imu) {
                Rng base(derive_seed(h, {5}));
                Rng osc(derive_seed(h, {6}));
                sn.imu = synth_imu(base, osc, traits, gain * osc.uniform(0.6, 1.0));
            }

            SnippetEntry e;
            e.snippet_id = sn.snippet_id;
            e.subject = sn.subject;
            e.label = label;
            if (cfg.with_video) e.video_path = "data/" + sid + "/" + sn.snippet_id + ".vid.csv";
            if (cfg.with_mat) e.mat_path = "data/" + sid + "/" + sn.snippet_id + ".mat.csv";
            if (cfg.with_imu) e.imu_path = "data/" + sid + "/" + sn.snippet_id + ".imu.csv";
            ds.manifest.snippets.push_back(std::move(e));
            ds.snippets.push_back(std::move(sn));
        }
    }
    return ds;
}

void save_dataset(const SynthDataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir.string());

    for (std::size_t i = 0; i < ds.snippets.size(); ++i) {
        const Snippet& sn = ds.snippets[i];
        const SnippetEntry& e = ds.manifest.snippets[i];
        fs::create_directories(dir / "data" / sn.subject.value, ec);
        if (ec) throw DataError("cannot create data directory under " + dir.string());
        if (e.video_path) write_csv_matrix(sn.video->frames, dir / *e.video_path);
        if (e.mat_path) write_csv_matrix(sn.mat->frames, dir / *e.mat_path);
        if (e.imu_path) write_csv_matrix(sn.imu->frames, dir / *e.imu_path);
    }
    save_manifest(ds.manifest, dir / "manifest.txt");
}

}  // namespace fmfusion
