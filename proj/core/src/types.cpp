#include "fmfusion/types.hpp"

#include <sstream>

namespace fmfusion {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd data, Modality tag)
    : data_(std::move(data)), tag_(tag) {
    const auto [rows, cols] = feature_shape(tag);
    if (data_.rows() != rows || data_.cols() != cols) {
        std::ostringstream os;
        os << "feature matrix for " << modality_name(tag) << " must be " << rows << "x" << cols
           << ", got " << data_.rows() << "x" << data_.cols();
        throw std::invalid_argument(os.str());
    }
    if (!data_.allFinite()) {
        throw std::invalid_argument(std::string("feature matrix for ") + modality_name(tag) +
                                    " contains NaN or Inf");
    }
}

namespace {

void check_matrix(const Eigen::MatrixXd& m, int rows, int cols, const char* what,
                  std::vector<std::string>& out) {
    if (m.rows() != rows) {
        std::ostringstream os;
        os << what << " frame count: expected " << rows << ", got " << m.rows();
        out.push_back(os.str());
    }
    if (m.cols() != cols) {
        std::ostringstream os;
        os << what << " channel count: expected " << cols << ", got " << m.cols();
        out.push_back(os.str());
    }
    if (!m.allFinite()) out.push_back(std::string(what) + " contains NaN or Inf");
}

}  // namespace

ValidationResult validate_snippet(const Snippet& s) {
    ValidationResult r;
    if (s.snippet_id.empty()) r.violations.push_back("snippet id empty");
    if (s.subject.value.empty()) r.violations.push_back("subject id empty");
    if (!s.video && !s.mat && !s.imu) r.violations.push_back("no modality present");
    if (s.video) check_matrix(s.video->frames, kVideoFrames, 2 * kKeypoints, "video", r.violations);
    if (s.mat) {
        check_matrix(s.mat->frames, kMatFrames, kMatGrid * kMatGrid, "mat", r.violations);
        if (s.mat->frames.size() > 0 && s.mat->frames.allFinite() &&
            s.mat->frames.minCoeff() < 0.0) {
            r.violations.push_back("pressure non-negative violated");
        }
    }
    if (s.imu) check_matrix(s.imu->frames, kImuFrames, kImuChannels, "imu", r.violations);
    return r;
}

}  // namespace fmfusion
