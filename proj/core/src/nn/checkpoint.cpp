#include "fmfusion/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fmfusion/errors.hpp"

namespace fmfusion::nn {

namespace {

constexpr const char* kMagic = "fmfusion-checkpoint v1";

std::string hexfloat(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hexfloat(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw DataError("bad numeric literal in checkpoint " + path.string());
    return v;
}

}  // namespace

void save_model(const TrainedModel& tm, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    const ModelSpec& spec = tm.model->spec();
    out << kMagic << "\n";
    out << "input " << spec.input_frames << " " << spec.input_channels << "\n";
    out << "conv " << spec.conv_layers.size() << "\n";
    for (const auto& c : spec.conv_layers) {
        out << "conv_layer " << c.n_kernels << " " << c.kernel_len << "\n";
    }
    out << "fc " << spec.fc_units << "\n";
    out << "dropout " << hexfloat(spec.dropout_rate) << "\n";
    out << "best_epoch " << tm.best_epoch << " " << hexfloat(tm.best_val_loss) << "\n";
    out << "log " << tm.train_log.size() << "\n";
    for (const auto& e : tm.train_log) {
        out << "log_entry " << hexfloat(e.train_loss) << " " << hexfloat(e.val_loss) << "\n";
    }
    auto views = const_cast<TrainedModel&>(tm).model->params();
    out << "buffers " << views.size() << "\n";
    for (const auto& v : views) {
        out << "buffer " << v.name << " " << v.size << "\n";
        for (std::size_t i = 0; i < v.size; ++i) {
            out << hexfloat(v.value[i]) << (i + 1 == v.size ? "" : " ");
        }
        out << "\n";
    }
    if (!out) throw DataError("write failed: " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kMagic) {
        throw DataError("not an fmfusion checkpoint: " + path.string());
    }

    const auto expect = [&](const char* key) -> std::istringstream {
        if (!std::getline(in, line)) throw DataError("truncated checkpoint: " + path.string());
        std::istringstream is(line);
        std::string k;
        is >> k;
        if (k != key) throw DataError("checkpoint: expected '" + std::string(key) + "', got '" + k + "'");
        return is;
    };

    ModelSpec spec;
    {
        auto is = expect("input");
        is >> spec.input_frames >> spec.input_channels;
    }
    std::size_t n_conv = 0;
    {
        auto is = expect("conv");
        is >> n_conv;
    }
    for (std::size_t i = 0; i < n_conv; ++i) {
        auto is = expect("conv_layer");
        ConvLayerSpec c;
        is >> c.n_kernels >> c.kernel_len;
        spec.conv_layers.push_back(c);
    }
    {
        auto is = expect("fc");
        is >> spec.fc_units;
    }
    {
        auto is = expect("dropout");
        std::string v;
        is >> v;
        spec.dropout_rate = parse_hexfloat(v, path);
    }

    TrainedModel tm;
    {
        auto is = expect("best_epoch");
        std::string v;
        is >> tm.best_epoch >> v;
        tm.best_val_loss = parse_hexfloat(v, path);
    }
    std::size_t n_log = 0;
    {
        auto is = expect("log");
        is >> n_log;
    }
    for (std::size_t i = 0; i < n_log; ++i) {
        auto is = expect("log_entry");
        std::string a, b;
        is >> a >> b;
        tm.train_log.push_back({parse_hexfloat(a, path), parse_hexfloat(b, path)});
    }

    Rng dummy(0);
    tm.model = std::make_unique<Model>(spec, dummy);
    auto views = tm.model->params();
    std::size_t n_buffers = 0;
    {
        auto is = expect("buffers");
        is >> n_buffers;
    }
    if (n_buffers != views.size()) {
        throw DataError("checkpoint buffer count does not match the architecture");
    }
    for (auto& v : views) {
        std::string name;
        std::size_t size = 0;
        {
            auto is = expect("buffer");
            is >> name >> size;
        }
        if (name != v.name || size != v.size) {
            throw DataError("checkpoint buffer '" + name + "' does not match '" + v.name + "'");
        }
        if (!std::getline(in, line)) throw DataError("truncated checkpoint: " + path.string());
        std::istringstream is(line);
        std::string tok;
        for (std::size_t i = 0; i < v.size; ++i) {
            if (!(is >> tok)) throw DataError("truncated buffer in checkpoint: " + path.string());
            v.value[i] = parse_hexfloat(tok, path);
        }
    }
    return tm;
}

}  // namespace fmfusion::nn
