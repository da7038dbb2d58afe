#include "fmfusion/imu_features.hpp"

#include <cmath>

#include "fmfusion/signal.hpp"

namespace fmfusion {

Eigen::MatrixXd imu_prenorm(const RawImuFrames& raw) {
    Eigen::MatrixXd out = moving_average5_columns(raw.frames);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        out.col(c).array() -= out.col(c).mean();
    }
    return out;
}

FeatureMatrix apply_imu_stats(const Eigen::MatrixXd& prenorm, const NormStats& stats) {
    if (prenorm.rows() != kImuFrames || prenorm.cols() != kImuChannels) {
        throw std::invalid_argument("imu prenorm matrix must be 300x36");
    }
    Eigen::MatrixXd out(prenorm.rows(), prenorm.cols());
    for (int c = 0; c < kImuChannels; ++c) {
        if (RawImuFrames::is_accel_channel(c)) {
            out.col(c) = (prenorm.col(c).array() - stats.acc_mean) / stats.acc_std;
        } else {
            out.col(c) = (prenorm.col(c).array() - stats.gyro_mean) / stats.gyro_std;
        }
    }
    return FeatureMatrix(std::move(out), Modality::IMU);
}

FeatureMatrix finalize_imu_features(const RawImuFrames& raw, const NormStats& stats) {
    return apply_imu_stats(imu_prenorm(raw), stats);
}

NormStats fit_imu_stats(const std::vector<Eigen::MatrixXd>& prenorms) {
    if (prenorms.empty()) throw std::invalid_argument("fit_imu_stats: empty training list");
    double acc_sum = 0.0, gyro_sum = 0.0, n_acc = 0.0, n_gyro = 0.0;
    for (const auto& m : prenorms) {
        for (int c = 0; c < kImuChannels; ++c) {
            if (RawImuFrames::is_accel_channel(c)) {
                acc_sum += m.col(c).sum();
                n_acc += static_cast<double>(m.rows());
            } else {
                gyro_sum += m.col(c).sum();
                n_gyro += static_cast<double>(m.rows());
            }
        }
    }
    NormStats st;
    st.acc_mean = acc_sum / n_acc;
    st.gyro_mean = gyro_sum / n_gyro;
    double acc_ss = 0.0, gyro_ss = 0.0;
    for (const auto& m : prenorms) {
        for (int c = 0; c < kImuChannels; ++c) {
            if (RawImuFrames::is_accel_channel(c)) {
                acc_ss += (m.col(c).array() - st.acc_mean).square().sum();
            } else {
                gyro_ss += (m.col(c).array() - st.gyro_mean).square().sum();
            }
        }
    }
    st.acc_std = std::max(std::sqrt(acc_ss / n_acc), kStdFloor);
    st.gyro_std = std::max(std::sqrt(gyro_ss / n_gyro), kStdFloor);
    return st;
}

}  // namespace fmfusion
