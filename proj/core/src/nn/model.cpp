#include "fmfusion/nn/model.hpp"

#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fmfusion::nn {

void validate_model_spec(const ModelSpec& spec) {
    if (spec.conv_layers.empty() || spec.conv_layers.size() > 3) {
        throw std::invalid_argument("model spec: need 1-3 conv layers");
    }
    for (const auto& c : spec.conv_layers) {
        if (c.n_kernels <= 0) throw std::invalid_argument("model spec: kernel count must be positive");
        if (c.kernel_len <= 0 || c.kernel_len % 2 == 0) {
            throw std::invalid_argument("model spec: kernel length must be odd");
        }
    }
    if (spec.fc_units <= 0) throw std::invalid_argument("model spec: fc units must be positive");
    if (spec.dropout_rate < 0.0 || spec.dropout_rate >= 1.0) {
        throw std::invalid_argument("model spec: dropout rate must be in [0,1)");
    }
    if (spec.input_frames <= 0 || spec.input_channels <= 0) {
        throw std::invalid_argument("model spec: input shape must be positive");
    }
}

std::string spec_to_string(const ModelSpec& spec) {
    std::ostringstream os;
    os << spec.input_frames << "x" << spec.input_channels << ":";
    for (std::size_t i = 0; i < spec.conv_layers.size(); ++i) {
        if (i) os << "/";
        os << spec.conv_layers[i].n_kernels << "@" << spec.conv_layers[i].kernel_len;
    }
    os << ":fc" << spec.fc_units;
    return os.str();
}

namespace {

struct PresetRow {
    ConvLayerSpec c1, c2, c3;
    int fc;
};

// Tuned architectures per modality, model #1 first (the best-performing one).
const PresetRow kMatPresets[10] = {
    {{8, 13}, {64, 17}, {16, 25}, 256}, {{8, 13}, {32, 7}, {16, 33}, 128},
    {{4, 17}, {64, 17}, {16, 13}, 128}, {{4, 17}, {16, 13}, {8, 33}, 128},
    {{4, 17}, {64, 25}, {64, 17}, 256}, {{4, 17}, {32, 17}, {8, 13}, 128},
    {{4, 17}, {8, 7}, {8, 33}, 128},    {{4, 13}, {16, 9}, {64, 33}, 256},
    {{4, 25}, {32, 13}, {16, 13}, 256}, {{4, 17}, {64, 7}, {16, 9}, 128},
};
const PresetRow kImuPresets[10] = {
    {{8, 25}, {8, 17}, {64, 25}, 256},  {{8, 25}, {64, 13}, {8, 25}, 256},
    {{4, 13}, {64, 17}, {32, 33}, 128}, {{8, 17}, {8, 17}, {8, 17}, 128},
    {{4, 17}, {64, 13}, {32, 33}, 128}, {{8, 25}, {32, 17}, {64, 33}, 128},
    {{4, 25}, {32, 9}, {8, 9}, 128},    {{8, 25}, {8, 25}, {8, 33}, 128},
    {{8, 25}, {32, 25}, {8, 33}, 128},  {{8, 17}, {64, 25}, {8, 13}, 128},
};
const PresetRow kVidPresets[10] = {
    {{4, 13}, {32, 25}, {16, 25}, 128}, {{4, 13}, {32, 17}, {64, 9}, 256},
    {{8, 25}, {8, 13}, {64, 33}, 128},  {{4, 25}, {64, 7}, {32, 17}, 128},
    {{4, 25}, {32, 25}, {16, 13}, 256}, {{4, 25}, {8, 25}, {64, 25}, 256},
    {{4, 13}, {8, 7}, {64, 13}, 128},   {{8, 13}, {32, 13}, {64, 25}, 256},
    {{8, 13}, {32, 7}, {64, 9}, 256},   {{4, 13}, {16, 25}, {64, 13}, 128},
};
const PresetRow kFusedPresets[10] = {
    {{4, 25}, {16, 7}, {64, 33}, 128},  {{8, 13}, {8, 7}, {16, 25}, 256},
    {{4, 25}, {32, 7}, {64, 33}, 256},  {{4, 13}, {16, 7}, {64, 17}, 128},
    {{8, 17}, {64, 17}, {16, 17}, 256}, {{8, 25}, {8, 13}, {16, 13}, 256},
    {{8, 17}, {8, 9}, {8, 9}, 256},     {{4, 17}, {64, 9}, {64, 25}, 256},
    {{4, 13}, {16, 9}, {32, 9}, 256},   {{8, 17}, {8, 9}, {8, 17}, 256},
};

ModelSpec from_row(const PresetRow& row, Modality m) {
    const auto [frames, channels] = feature_shape(m);
    ModelSpec spec;
    spec.conv_layers = {row.c1, row.c2, row.c3};
    spec.fc_units = row.fc;
    spec.input_frames = frames;
    spec.input_channels = channels;
    return spec;
}

}  // namespace

ModelSpec preset_model_spec(const std::string& name) {
    const auto dash = name.rfind('-');
    if (dash != std::string::npos) {
        const std::string family = name.substr(0, dash);
        int idx = 0;
        try {
            idx = std::stoi(name.substr(dash + 1));
        } catch (const std::exception&) {
            idx = 0;
        }
        if (idx >= 1 && idx <= 10) {
            if (family == "mat") return from_row(kMatPresets[idx - 1], Modality::MAT);
            if (family == "imu") return from_row(kImuPresets[idx - 1], Modality::IMU);
            if (family == "vid") return from_row(kVidPresets[idx - 1], Modality::VID);
            if (family == "fused") return from_row(kFusedPresets[idx - 1], Modality::FUSED);
        }
    }
    throw std::invalid_argument("unknown model preset '" + name +
                                "' (want mat-1..10, imu-1..10, vid-1..10, fused-1..10)");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const char* family : {"mat", "imu", "vid", "fused"}) {
        for (int i = 1; i <= 10; ++i) {
            names.push_back(std::string(family) + "-" + std::to_string(i));
        }
    }
    return names;
}

Model::Model(const ModelSpec& spec, Rng& init_rng) : spec_(spec) {
    validate_model_spec(spec);
    int channels = spec.input_channels;
    for (const auto& c : spec.conv_layers) {
        auto conv = std::make_unique<Conv1d>(channels, c.n_kernels, c.kernel_len);
        conv->init(init_rng);
        channels = c.n_kernels;
        layers_.push_back(std::move(conv));
        layers_.push_back(std::make_unique<BatchNorm>(channels));
        layers_.push_back(std::make_unique<ReLU>());
        layers_.push_back(std::make_unique<Dropout>(spec.dropout_rate));
    }
    layers_.push_back(std::make_unique<Flatten>());
    auto fc = std::make_unique<Dense>(spec.input_frames * channels, spec.fc_units);
    fc->init(init_rng);
    layers_.push_back(std::move(fc));
    layers_.push_back(std::make_unique<BatchNorm>(spec.fc_units));
    layers_.push_back(std::make_unique<ReLU>());
    layers_.push_back(std::make_unique<Dropout>(spec.dropout_rate));
    auto out = std::make_unique<Dense>(spec.fc_units, 1);
    out->init(init_rng);
    layers_.push_back(std::move(out));
}

Eigen::MatrixXd Model::forward_train(const Tensor& x, Rng& rng) {
    if (x.frames() != spec_.input_frames || x.m.cols() != spec_.input_channels) {
        throw std::invalid_argument("model input shape mismatch");
    }
    Tensor t = x;
    for (auto& layer : layers_) t = layer->forward(t, rng);
    return t.m;
}

void Model::backward(const Eigen::MatrixXd& dlogits, int batch) {
    Tensor g;
    g.m = dlogits;
    g.batch = batch;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

Eigen::MatrixXd Model::infer_logits(const Tensor& x) const {
    if (x.frames() != spec_.input_frames || x.m.cols() != spec_.input_channels) {
        throw std::invalid_argument("model input shape mismatch");
    }
    Tensor t = x;
    for (const auto& layer : layers_) t = layer->infer(t);
    return t.m;
}

std::vector<ParamView> Model::params() {
    std::vector<ParamView> views;
    for (auto& layer : layers_) layer->collect(views);
    return views;
}

std::vector<double> Model::snapshot() {
    std::vector<double> snap;
    for (const auto& v : params()) snap.insert(snap.end(), v.value, v.value + v.size);
    return snap;
}

void Model::restore(const std::vector<double>& snap) {
    std::size_t off = 0;
    for (auto& v : params()) {
        if (off + v.size > snap.size()) throw std::invalid_argument("snapshot size mismatch");
        std::memcpy(v.value, snap.data() + off, v.size * sizeof(double));
        off += v.size;
    }
    if (off != snap.size()) throw std::invalid_argument("snapshot size mismatch");
}

std::size_t Model::parameter_count() {
    std::size_t n = 0;
    for (const auto& v : params()) {
        if (v.trainable) n += v.size;
    }
    return n;
}

void Model::freeze_dropout(bool on) {
    for (auto& layer : layers_) {
        if (auto* d = dynamic_cast<Dropout*>(layer.get())) d->freeze_mask(on);
    }
}

}  // namespace fmfusion::nn
