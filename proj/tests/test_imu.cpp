#include <doctest.h>

#include "fmfusion/imu_features.hpp"
#include "fmfusion/rng.hpp"

using namespace fmfusion;

namespace {

RawImuFrames random_imu(Rng& rng) {
    Eigen::MatrixXd m(kImuFrames, kImuChannels);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
    }
    return RawImuFrames{std::move(m)};
}

}  // namespace

TEST_CASE("constant channels map to all zeros") {
    RawImuFrames raw{Eigen::MatrixXd::Constant(kImuFrames, kImuChannels, 4.2)};
    const Eigen::MatrixXd pre = imu_prenorm(raw);
    CHECK(pre.cwiseAbs().maxCoeff() < 1e-12);  // mean of constants up to rounding
    const NormStats st = fit_imu_stats({pre});
    CHECK(st.acc_std == doctest::Approx(kStdFloor));
    const FeatureMatrix fm = apply_imu_stats(pre, st);
    CHECK(fm.frames() == 300);
    CHECK(fm.channels() == 36);
    CHECK(fm.data().cwiseAbs().maxCoeff() < 1e-4);  // rounding residue / floored std
}

TEST_CASE("pooled accel and gyro z-scores are 0/1 on the fit set") {
    Rng rng(5);
    std::vector<Eigen::MatrixXd> pres;
    for (int i = 0; i < 4; ++i) pres.push_back(imu_prenorm(random_imu(rng)));
    const NormStats st = fit_imu_stats(pres);
    double acc_sum = 0, acc_ss = 0, n_acc = 0, gyro_sum = 0, gyro_ss = 0, n_gyro = 0;
    for (const auto& pre : pres) {
        const Eigen::MatrixXd z = apply_imu_stats(pre, st).data();
        for (int c = 0; c < kImuChannels; ++c) {
            const double s = z.col(c).sum(), ss = z.col(c).array().square().sum();
            if (RawImuFrames::is_accel_channel(c)) {
                acc_sum += s;
                acc_ss += ss;
                n_acc += z.rows();
            } else {
                gyro_sum += s;
                gyro_ss += ss;
                n_gyro += z.rows();
            }
        }
    }
    CHECK(std::abs(acc_sum / n_acc) < 1e-6);
    CHECK(std::abs(std::sqrt(acc_ss / n_acc) - 1.0) < 1e-6);
    CHECK(std::abs(gyro_sum / n_gyro) < 1e-6);
    CHECK(std::abs(std::sqrt(gyro_ss / n_gyro) - 1.0) < 1e-6);
}

TEST_CASE("accel statistics never mix into gyro channels") {
    Rng rng(6);
    const RawImuFrames probe = random_imu(rng);
    std::vector<Eigen::MatrixXd> base_pres, perturbed_pres;
    for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd pre = imu_prenorm(random_imu(rng));
        base_pres.push_back(pre);
        Eigen::MatrixXd p = pre;
        for (int c = 0; c < kImuChannels; ++c) {
            if (RawImuFrames::is_accel_channel(c)) p.col(c) *= 13.0;  // accel-only change
        }
        perturbed_pres.push_back(p);
    }
    const NormStats a = fit_imu_stats(base_pres);
    const NormStats b = fit_imu_stats(perturbed_pres);
    CHECK(a.gyro_mean == doctest::Approx(b.gyro_mean));
    CHECK(a.gyro_std == doctest::Approx(b.gyro_std));
    CHECK(a.acc_std != doctest::Approx(b.acc_std));

    const Eigen::MatrixXd za = apply_imu_stats(imu_prenorm(probe), a).data();
    const Eigen::MatrixXd zb = apply_imu_stats(imu_prenorm(probe), b).data();
    for (int c = 0; c < kImuChannels; ++c) {
        if (!RawImuFrames::is_accel_channel(c)) {
            CHECK((za.col(c) - zb.col(c)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("adding a constant offset to a raw channel changes nothing") {
    Rng rng(7);
    const RawImuFrames raw = random_imu(rng);
    RawImuFrames shifted = raw;
    shifted.frames.col(11).array() += 42.0;
    shifted.frames.col(30).array() -= 7.0;
    const Eigen::MatrixXd a = imu_prenorm(raw);
    const Eigen::MatrixXd b = imu_prenorm(shifted);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
}
