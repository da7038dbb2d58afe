#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "fmfusion/errors.hpp"

namespace fmfusion {

// Recording geometry shared by every dataset: 5 s snippets captured at
// 50 Hz video, 100 Hz pressure mat, 60 Hz IMU.
inline constexpr int kVideoFrames = 250;
inline constexpr int kKeypoints = 15;
inline constexpr double kVideoDt = 1.0 / 50.0;
inline constexpr int kMatFrames = 500;
inline constexpr int kMatGrid = 32;
inline constexpr int kImuFrames = 300;
inline constexpr int kImuSensors = 6;
inline constexpr int kImuChannels = 36;  // 6 sensors x (3 accel + 3 gyro)

/// Opaque subject identifier; the grouping unit for cross-validation.
struct SubjectId {
    std::string value;

    SubjectId() = default;
    explicit SubjectId(std::string v) : value(std::move(v)) {}

    friend bool operator==(const SubjectId&, const SubjectId&) = default;
    friend auto operator<=>(const SubjectId&, const SubjectId&) = default;
};

enum class Label { FMminus = 0, FMplus = 1 };

inline int encode_label(Label l) { return l == Label::FMplus ? 1 : 0; }

inline Label decode_label(int v) {
    if (v != 0 && v != 1) throw std::invalid_argument("label code must be 0 or 1");
    return v == 1 ? Label::FMplus : Label::FMminus;
}

inline const char* label_name(Label l) { return l == Label::FMplus ? "FM+" : "FM-"; }

/// Keypoint trajectories from one video snippet: 250 frames x 15 keypoints,
/// stored as a 250x30 matrix with columns x1,y1,...,x15,y15 (ears already
/// excluded upstream). Keypoint indices are 1-based in the accessors:
/// 1 nose, 2-3 eyes, 4-5 shoulders, 6-7 elbows, 8-9 wrists, 10-11 hips,
/// 12-13 knees, 14-15 ankles.
struct RawVideoKeypoints {
    Eigen::MatrixXd frames;  // kVideoFrames x 30

    double x(int frame, int keypoint1b) const { return frames(frame, 2 * (keypoint1b - 1)); }
    double y(int frame, int keypoint1b) const { return frames(frame, 2 * (keypoint1b - 1) + 1); }
};

/// Pressure images from one snippet: 500 frames x 32x32 grid, row-major
/// flattened to 500x1024. Cell (i, j) of frame f (0-based row i, column j)
/// lives at column i*32 + j.
struct RawMatFrames {
    Eigen::MatrixXd frames;  // kMatFrames x 1024

    double at(int frame, int row, int col) const { return frames(frame, row * kMatGrid + col); }
};

/// IMU readings from one snippet: 300 frames x 36 channels, sensor-major.
/// Sensor s (0-based) occupies columns 6s..6s+5 as ax,ay,az,gx,gy,gz.
struct RawImuFrames {
    Eigen::MatrixXd frames;  // kImuFrames x kImuChannels

    static bool is_accel_channel(int col) { return col % 6 < 3; }
};

/// One 5 s labeled multimodal recording unit. Modalities are optional at the
/// type level; experiment runners demand the ones their configuration needs.
struct Snippet {
    std::string snippet_id;
    SubjectId subject;
    Label label = Label::FMminus;
    std::optional<RawVideoKeypoints> video;
    std::optional<RawMatFrames> mat;
    std::optional<RawImuFrames> imu;
};

enum class Modality { MAT, IMU, VID, FUSED };

inline const char* modality_name(Modality m) {
    switch (m) {
        case Modality::MAT: return "MAT";
        case Modality::IMU: return "IMU";
        case Modality::VID: return "VID";
        case Modality::FUSED: return "FUSED";
    }
    return "?";
}

/// Expected frames x channels shape of the classifier input for a modality.
inline std::pair<int, int> feature_shape(Modality m) {
    switch (m) {
        case Modality::MAT: return {kMatFrames, 6};
        case Modality::IMU: return {kImuFrames, kImuChannels};
        case Modality::VID: return {kVideoFrames, 60};
        case Modality::FUSED: return {kVideoFrames, 102};
    }
    return {0, 0};
}

/// Frames x channels matrix of finite reals, the universal classifier input.
/// Construction rejects shape mismatches for the modality tag and any
/// non-finite entry.
class FeatureMatrix {
public:
    FeatureMatrix(Eigen::MatrixXd data, Modality tag);

    const Eigen::MatrixXd& data() const { return data_; }
    Modality tag() const { return tag_; }
    int frames() const { return static_cast<int>(data_.rows()); }
    int channels() const { return static_cast<int>(data_.cols()); }

private:
    Eigen::MatrixXd data_;
    Modality tag_;
};

/// Diagnostic outcome of snippet validation; never throws.
struct ValidationResult {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Checks every raw-modality invariant: frame counts, column counts,
/// non-negative pressure, finiteness, and at-least-one-modality.
ValidationResult validate_snippet(const Snippet& s);

}  // namespace fmfusion
