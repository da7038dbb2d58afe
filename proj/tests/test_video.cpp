#include <doctest.h>

#include "fmfusion/errors.hpp"
#include "fmfusion/rng.hpp"
#include "fmfusion/synth.hpp"
#include "fmfusion/video_features.hpp"

using namespace fmfusion;

namespace {

constexpr int kColX = 0, kColY = 1;

int col_of(int keypoint1b, int coord) { return 2 * (keypoint1b - 1) + coord; }

// All keypoints at fixed positions; hips/shoulders set explicitly.
Eigen::MatrixXd static_skeleton(double hip_y = 0.0, double shoulder_y = 0.5) {
    Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(kVideoFrames, 30);
    pos.col(col_of(10, kColX)).setConstant(-1.0);
    pos.col(col_of(11, kColX)).setConstant(1.0);
    pos.col(col_of(10, kColY)).setConstant(hip_y);
    pos.col(col_of(11, kColY)).setConstant(hip_y);
    pos.col(col_of(4, kColX)).setConstant(-1.0);
    pos.col(col_of(5, kColX)).setConstant(1.0);
    pos.col(col_of(4, kColY)).setConstant(shoulder_y);
    pos.col(col_of(5, kColY)).setConstant(shoulder_y);
    return pos;
}

Eigen::MatrixXd random_keypoints(Rng& rng) {
    Eigen::MatrixXd m(kVideoFrames, 30);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, 40.0);
    }
    return m;
}

Eigen::MatrixXd similarity_transform(const Eigen::MatrixXd& pos, double theta, double scale,
                                     double tx, double ty) {
    const double c = std::cos(theta), s = std::sin(theta);
    Eigen::MatrixXd out(pos.rows(), pos.cols());
    for (int k = 0; k < kKeypoints; ++k) {
        out.col(2 * k) = scale * (c * pos.col(2 * k) - s * pos.col(2 * k + 1)).array() + tx;
        out.col(2 * k + 1) = scale * (s * pos.col(2 * k) + c * pos.col(2 * k + 1)).array() + ty;
    }
    return out;
}

}  // namespace

TEST_CASE("smooth_keypoints") {
    SUBCASE("constant series unchanged") {
        const Eigen::MatrixXd pos = static_skeleton();
        CHECK((smooth_keypoints(pos) - pos).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("single-frame spike removed") {
        Eigen::MatrixXd pos = static_skeleton();
        pos(10, col_of(1, kColX)) += 100.0;
        const Eigen::MatrixXd sm = smooth_keypoints(pos);
        CHECK((sm - static_skeleton()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("linear ramp preserved except at most 2 edge frames") {
        Eigen::MatrixXd pos = static_skeleton();
        for (int f = 0; f < kVideoFrames; ++f) pos(f, col_of(1, kColX)) = 0.25 * f;
        const Eigen::MatrixXd sm = smooth_keypoints(pos);
        for (int f = 2; f < kVideoFrames - 2; ++f) {
            CHECK(sm(f, col_of(1, kColX)) == doctest::Approx(0.25 * f).epsilon(1e-12));
        }
    }
}

TEST_CASE("center_on_hips") {
    SUBCASE("hips at (10,20) and (14,20) map their midpoint to the origin") {
        Eigen::MatrixXd pos = static_skeleton();
        pos.col(col_of(10, kColX)).setConstant(10.0);
        pos.col(col_of(10, kColY)).setConstant(20.0);
        pos.col(col_of(11, kColX)).setConstant(14.0);
        pos.col(col_of(11, kColY)).setConstant(20.0);
        const Eigen::MatrixXd c = center_on_hips(pos);
        for (int f = 0; f < kVideoFrames; ++f) {
            const double mx = 0.5 * (c(f, col_of(10, kColX)) + c(f, col_of(11, kColX)));
            const double my = 0.5 * (c(f, col_of(10, kColY)) + c(f, col_of(11, kColY)));
            CHECK(mx == doctest::Approx(0.0));
            CHECK(my == doctest::Approx(0.0));
        }
        // Also the claimed center itself: (12, 20) subtracted everywhere.
        CHECK(c(0, col_of(1, kColX)) == doctest::Approx(-12.0));
        CHECK(c(0, col_of(1, kColY)) == doctest::Approx(-20.0));
    }
    SUBCASE("already-centered input unchanged") {
        Eigen::MatrixXd pos = static_skeleton();  // hip center already (0, 0)
        CHECK((center_on_hips(pos) - pos).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("translation invariance") {
        Rng rng(4);
        const Eigen::MatrixXd pos = random_keypoints(rng);
        const Eigen::MatrixXd shifted = similarity_transform(pos, 0.0, 1.0, 17.0, -8.5);
        CHECK((center_on_hips(shifted) - center_on_hips(pos)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("rotate_to_vertical maps the shoulder center onto +Y") {
    const auto shoulder_center = [](const Eigen::MatrixXd& p) {
        return Eigen::Vector2d(
            0.5 * (p.col(col_of(4, kColX)).mean() + p.col(col_of(5, kColX)).mean()),
            0.5 * (p.col(col_of(4, kColY)).mean() + p.col(col_of(5, kColY)).mean()));
    };
    SUBCASE("already aligned: identity") {
        Eigen::MatrixXd pos = static_skeleton();
        pos.col(col_of(4, kColX)).setConstant(0.0);
        pos.col(col_of(5, kColX)).setConstant(0.0);
        pos.col(col_of(4, kColY)).setConstant(5.0);
        pos.col(col_of(5, kColY)).setConstant(5.0);
        CHECK((rotate_to_vertical(pos) - pos).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("sc=(5,0) rotates to (0,5)") {
        Eigen::MatrixXd pos = static_skeleton();
        pos.col(col_of(4, kColX)).setConstant(5.0);
        pos.col(col_of(5, kColX)).setConstant(5.0);
        pos.col(col_of(4, kColY)).setConstant(0.0);
        pos.col(col_of(5, kColY)).setConstant(0.0);
        const Eigen::Vector2d sc = shoulder_center(rotate_to_vertical(pos));
        CHECK(std::abs(sc.x()) < 1e-9);
        CHECK(sc.y() == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("sc=(3,4) rotates to (0,5), norm preserved") {
        Eigen::MatrixXd pos = static_skeleton();
        pos.col(col_of(4, kColX)).setConstant(3.0);
        pos.col(col_of(5, kColX)).setConstant(3.0);
        pos.col(col_of(4, kColY)).setConstant(4.0);
        pos.col(col_of(5, kColY)).setConstant(4.0);
        const Eigen::Vector2d sc = shoulder_center(rotate_to_vertical(pos));
        CHECK(std::abs(sc.x()) < 1e-9);
        CHECK(sc.y() == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("degenerate shoulder center skips rotation with a warning") {
        Eigen::MatrixXd pos = static_skeleton();
        pos.col(col_of(4, kColX)).setConstant(1.0);
        pos.col(col_of(5, kColX)).setConstant(-1.0);
        pos.col(col_of(4, kColY)).setConstant(0.0);
        pos.col(col_of(5, kColY)).setConstant(0.0);
        std::vector<std::string> warnings;
        CHECK((rotate_to_vertical(pos, &warnings) - pos).cwiseAbs().maxCoeff() == 0.0);
        CHECK(warnings.size() == 1);
    }
}

TEST_CASE("scale_torso") {
    SUBCASE("torso 0.5 divides by 1.5 and lands at 1/3") {
        Eigen::MatrixXd pos = static_skeleton(0.0, 0.5);
        const Eigen::MatrixXd scaled = scale_torso(pos);
        const double torso = std::abs(
            0.5 * (scaled.col(col_of(10, kColY)).mean() + scaled.col(col_of(11, kColY)).mean()) -
            0.5 * (scaled.col(col_of(4, kColY)).mean() + scaled.col(col_of(5, kColY)).mean()));
        CHECK(torso == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        CHECK(scaled(0, col_of(10, kColX)) == doctest::Approx(-1.0 / 1.5));
    }
    SUBCASE("torso already 1/3 is a fixed point") {
        const Eigen::MatrixXd pos = static_skeleton(0.0, 1.0 / 3.0);
        CHECK((scale_torso(pos) - pos).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("pre-scaling by any c > 0 cancels") {
        Rng rng(11);
        const Eigen::MatrixXd pos = random_keypoints(rng);
        const Eigen::MatrixXd big = similarity_transform(pos, 0.0, 3.7, 0.0, 0.0);
        CHECK((scale_torso(big) - scale_torso(pos)).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("degenerate torso throws") {
        CHECK_THROWS_AS(scale_torso(static_skeleton(0.0, 0.0)), NumericError);
    }
}

TEST_CASE("finalize_video_features") {
    SUBCASE("static skeleton gives all-zero blocks") {
        const Eigen::MatrixXd pos = static_skeleton(0.0, 1.0 / 3.0);
        NormStats st;  // identity stats
        const FeatureMatrix fm = finalize_video_features(pos, st);
        CHECK(fm.frames() == 250);
        CHECK(fm.channels() == 60);
        CHECK(fm.data().cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("column order: motion in keypoint 1 x lands in columns 0 and 30") {
        Eigen::MatrixXd pos = static_skeleton(0.0, 1.0 / 3.0);
        for (int f = 0; f < kVideoFrames; ++f) {
            pos(f, col_of(1, kColX)) = std::sin(0.1 * f);
        }
        NormStats st;
        const Eigen::MatrixXd d = finalize_video_features(pos, st).data();
        for (int c = 0; c < 60; ++c) {
            const double mag = d.col(c).cwiseAbs().maxCoeff();
            if (c == 0 || c == 30) {
                CHECK(mag > 1e-3);
            } else {
                CHECK(mag < 1e-12);
            }
        }
    }
}

TEST_CASE("fit_video_stats pools population statistics with a floored std") {
    SUBCASE("single constant snippet: mean 5, std floored") {
        const Eigen::MatrixXd m = Eigen::MatrixXd::Constant(kVideoFrames, 60, 5.0);
        const NormStats st = fit_video_stats({m});
        CHECK(st.pos_mean == doctest::Approx(5.0));
        CHECK(st.pos_std == doctest::Approx(kStdFloor));
        // z-scoring the fit set itself collapses to zero
        const FeatureMatrix fm = apply_video_stats(Eigen::MatrixXd::Constant(250, 60, 5.0), st);
        CHECK(fm.data().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("two snippets of 0s and 2s: mean 1, std 1") {
        const NormStats st = fit_video_stats(
            {Eigen::MatrixXd::Zero(250, 60), Eigen::MatrixXd::Constant(250, 60, 2.0)});
        CHECK(st.pos_mean == doctest::Approx(1.0));
        CHECK(st.pos_std == doctest::Approx(1.0));
        CHECK(st.vel_mean == doctest::Approx(1.0));
        CHECK(st.vel_std == doctest::Approx(1.0));
    }
    SUBCASE("pooled z-scored training set has mean 0 and std 1") {
        Rng rng(21);
        std::vector<Eigen::MatrixXd> prenorms;
        SynthConfig cfg;
        cfg.n_subjects = 2;
        cfg.snippets_per_subject = 2;
        cfg.seed = 31;
        cfg.with_mat = cfg.with_imu = false;
        for (const auto& s : synthesize_dataset(cfg).snippets) {
            prenorms.push_back(video_prenorm(*s.video));
        }
        const NormStats st = fit_video_stats(prenorms);
        double pos_sum = 0.0, pos_ss = 0.0, count = 0.0;
        for (const auto& pre : prenorms) {
            const Eigen::MatrixXd z = apply_video_stats(pre, st).data().leftCols(30);
            pos_sum += z.sum();
            pos_ss += z.array().square().sum();
            count += z.size();
        }
        const double mean = pos_sum / count;
        CHECK(std::abs(mean) < 1e-6);
        CHECK(std::abs(std::sqrt(pos_ss / count - mean * mean) - 1.0) < 1e-6);
    }
    SUBCASE("empty training list throws") {
        CHECK_THROWS_AS(fit_video_stats({}), std::invalid_argument);
    }
}

TEST_CASE("pipeline is invariant under similarity transforms of the raw keypoints") {
    SynthConfig cfg;
    cfg.n_subjects = 2;
    cfg.snippets_per_subject = 3;
    cfg.seed = 13;
    cfg.with_mat = cfg.with_imu = false;
    const SynthDataset ds = synthesize_dataset(cfg);
    NormStats st;
    {
        std::vector<Eigen::MatrixXd> pres;
        for (const auto& s : ds.snippets) pres.push_back(video_prenorm(*s.video));
        st = fit_video_stats(pres);
    }
    Rng rng(55);
    for (const auto& s : ds.snippets) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        const double scale = rng.uniform(0.5, 2.0);
        const double tx = rng.uniform(-300.0, 300.0), ty = rng.uniform(-300.0, 300.0);
        const RawVideoKeypoints moved{similarity_transform(s.video->frames, theta, scale, tx, ty)};
        const Eigen::MatrixXd base = apply_video_stats(video_prenorm(*s.video), st).data();
        const Eigen::MatrixXd xfrm = apply_video_stats(video_prenorm(moved), st).data();
        CHECK((base - xfrm).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("post-rotation and post-scaling geometry invariants hold on random data") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd raw = random_keypoints(rng);
        const Eigen::MatrixXd sm = smooth_keypoints(raw);
        const Eigen::MatrixXd rot = rotate_to_vertical(center_on_hips(sm));
        const double scx =
            0.5 * (rot.col(col_of(4, kColX)).mean() + rot.col(col_of(5, kColX)).mean());
        CHECK(std::abs(scx) <= 1e-9);
        const Eigen::MatrixXd scaled = scale_torso(rot);
        const double torso = std::abs(
            0.5 * (scaled.col(col_of(10, kColY)).mean() + scaled.col(col_of(11, kColY)).mean()) -
            0.5 * (scaled.col(col_of(4, kColY)).mean() + scaled.col(col_of(5, kColY)).mean()));
        CHECK(torso == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
        NormStats st;
        CHECK(finalize_video_features(scaled, st).data().allFinite());
    }
}

TEST_CASE("acceleration block extension has the right shape") {
    SynthConfig cfg;
    cfg.n_subjects = 1;
    cfg.snippets_per_subject = 1;
    cfg.seed = 2;
    cfg.with_mat = cfg.with_imu = false;
    const auto ds = synthesize_dataset(cfg);
    const Eigen::MatrixXd acc = video_acceleration_block(video_prenorm(*ds.snippets[0].video));
    CHECK(acc.rows() == 250);
    CHECK(acc.cols() == 30);
}
