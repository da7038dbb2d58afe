#include <doctest.h>

#include "fmfusion/fusion.hpp"
#include "fmfusion/rng.hpp"

using namespace fmfusion;

TEST_CASE("fusion config validation") {
    FusionConfig cfg;
    cfg.mode = FusionMode::Late;
    cfg.modalities = {Modality::MAT};
    CHECK_THROWS_AS(validate_fusion_config(cfg), std::invalid_argument);
    cfg.modalities = {Modality::MAT, Modality::IMU};
    CHECK_NOTHROW(validate_fusion_config(cfg));
    cfg.mode = FusionMode::Early;
    CHECK_THROWS_AS(validate_fusion_config(cfg), std::invalid_argument);
    cfg.modalities = {Modality::MAT, Modality::IMU, Modality::VID};
    CHECK_NOTHROW(validate_fusion_config(cfg));
    cfg.modalities = {Modality::MAT, Modality::MAT, Modality::VID};
    CHECK_THROWS_AS(validate_fusion_config(cfg), std::invalid_argument);
    cfg.modalities = {Modality::FUSED, Modality::IMU, Modality::VID};
    CHECK_THROWS_AS(validate_fusion_config(cfg), std::invalid_argument);
}

TEST_CASE("late_fuse averages and thresholds with ties going to FM+") {
    {
        const auto d = late_fuse({0.9, 0.6, 0.3});
        CHECK(d.p_avg == doctest::Approx(0.6));
        CHECK(d.label == Label::FMplus);
    }
    {
        const auto d = late_fuse({0.2, 0.2});
        CHECK(d.p_avg == doctest::Approx(0.2));
        CHECK(d.label == Label::FMminus);
    }
    {
        const auto d = late_fuse({0.7, 0.3});
        CHECK(d.p_avg == doctest::Approx(0.5));
        CHECK(d.label == Label::FMplus);  // documented tie rule
    }
    CHECK_THROWS_AS(late_fuse({}), std::invalid_argument);
}

TEST_CASE("late_fuse is permutation invariant") {
    Rng rng(20);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> p;
        const int n = 2 + static_cast<int>(rng.below(2));
        for (int i = 0; i < n; ++i) p.push_back(rng.uniform());
        std::vector<double> q = p;
        rng.shuffle(q);
        CHECK(late_fuse(p).p_avg == doctest::Approx(late_fuse(q).p_avg).epsilon(1e-15));
        CHECK(late_fuse(p).label == late_fuse(q).label);
    }
}

TEST_CASE("resample_linear") {
    SUBCASE("constants stay constant") {
        const Eigen::MatrixXd src = Eigen::MatrixXd::Constant(500, 3, 2.5);
        const Eigen::MatrixXd out = resample_linear(src, 250);
        CHECK(out.rows() == 250);
        CHECK((out.array() - 2.5).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("a 0..1 ramp over 500 frames becomes a 0..1 ramp over 250") {
        Eigen::MatrixXd src(500, 1);
        for (int i = 0; i < 500; ++i) src(i, 0) = i / 499.0;
        const Eigen::MatrixXd out = resample_linear(src, 250);
        CHECK(out(0, 0) == 0.0);
        CHECK(out(249, 0) == 1.0);
        for (int i = 0; i < 250; ++i) {
            CHECK(out(i, 0) == doctest::Approx(i / 249.0).epsilon(1e-12));
        }
    }
    SUBCASE("interpolation stays within the source min/max envelope") {
        Rng rng(31);
        Eigen::MatrixXd src(300, 2);
        for (Eigen::Index i = 0; i < src.rows(); ++i) {
            src(i, 0) = rng.normal();
            src(i, 1) = rng.uniform(-3.0, 5.0);
        }
        const Eigen::MatrixXd out = resample_linear(src, 250);
        for (int c = 0; c < 2; ++c) {
            CHECK(out.col(c).minCoeff() >= src.col(c).minCoeff() - 1e-12);
            CHECK(out.col(c).maxCoeff() <= src.col(c).maxCoeff() + 1e-12);
        }
    }
}

TEST_CASE("early_fuse_features concatenates MAT | IMU | VID at 250 frames") {
    const FeatureMatrix mat(Eigen::MatrixXd::Constant(500, 6, 0.25), Modality::MAT);
    const FeatureMatrix imu(Eigen::MatrixXd::Constant(300, 36, -1.5), Modality::IMU);
    const FeatureMatrix vid(Eigen::MatrixXd::Constant(250, 60, 3.0), Modality::VID);
    const FeatureMatrix fused = early_fuse_features(mat, imu, vid);
    CHECK(fused.tag() == Modality::FUSED);
    CHECK(fused.frames() == 250);
    CHECK(fused.channels() == 102);
    CHECK((fused.data().leftCols(6).array() - 0.25).abs().maxCoeff() < 1e-12);
    CHECK((fused.data().middleCols(6, 36).array() + 1.5).abs().maxCoeff() < 1e-12);
    CHECK((fused.data().rightCols(60).array() - 3.0).abs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(early_fuse_features(mat, mat, vid), std::invalid_argument);
}
