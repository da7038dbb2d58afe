#include "fmfusion/nn/layers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fmfusion::nn {

Tensor make_batch(const std::vector<const Eigen::MatrixXd*>& samples) {
    if (samples.empty()) throw std::invalid_argument("make_batch: empty sample list");
    const Eigen::Index f = samples.front()->rows();
    const Eigen::Index c = samples.front()->cols();
    Tensor t;
    t.batch = static_cast<int>(samples.size());
    t.m.resize(f * t.batch, c);
    for (int b = 0; b < t.batch; ++b) {
        if (samples[b]->rows() != f || samples[b]->cols() != c) {
            throw std::invalid_argument("make_batch: inconsistent sample shapes");
        }
        t.m.middleRows(b * f, f) = *samples[b];
    }
    return t;
}

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(int in_channels, int out_channels, int kernel_len)
    : in_ch_(in_channels), out_ch_(out_channels), klen_(kernel_len), pad_((kernel_len - 1) / 2) {
    if (in_channels <= 0 || out_channels <= 0) {
        throw std::invalid_argument("conv1d: channel counts must be positive");
    }
    if (kernel_len <= 0 || kernel_len % 2 == 0) {
        throw std::invalid_argument("conv1d: kernel length must be odd and positive");
    }
    w_.setZero(klen_ * in_ch_, out_ch_);
    gw_.setZero(klen_ * in_ch_, out_ch_);
    b_.setZero(out_ch_);
    gb_.setZero(out_ch_);
}

void Conv1d::init(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(klen_ * in_ch_));
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
        for (Eigen::Index j = 0; j < w_.cols(); ++j) w_(i, j) = rng.uniform(-limit, limit);
    }
    b_.setZero();
}

Eigen::MatrixXd Conv1d::im2row(const Tensor& x) const {
    const Eigen::Index frames = x.frames();
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(x.m.rows(), klen_ * in_ch_);
    for (int b = 0; b < x.batch; ++b) {
        const Eigen::Index base = b * frames;
        for (Eigen::Index f = 0; f < frames; ++f) {
            for (int k = 0; k < klen_; ++k) {
                const Eigen::Index src = f + k - pad_;
                if (src < 0 || src >= frames) continue;  // zero padding
                rows.block(base + f, k * in_ch_, 1, in_ch_) = x.m.row(base + src);
            }
        }
    }
    return rows;
}

Tensor Conv1d::forward(const Tensor& x, Rng&) {
    if (x.m.cols() != in_ch_) throw std::invalid_argument("conv1d: channel mismatch");
    cached_rows_ = im2row(x);
    cached_batch_ = x.batch;
    cached_frames_ = x.frames();
    Tensor out;
    out.batch = x.batch;
    out.m = cached_rows_ * w_;
    out.m.rowwise() += b_.transpose();
    return out;
}

Tensor Conv1d::infer(const Tensor& x) const {
    if (x.m.cols() != in_ch_) throw std::invalid_argument("conv1d: channel mismatch");
    Tensor out;
    out.batch = x.batch;
    out.m = im2row(x) * w_;
    out.m.rowwise() += b_.transpose();
    return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
    gw_ = cached_rows_.transpose() * grad_out.m;
    gb_ = grad_out.m.colwise().sum();
    const Eigen::MatrixXd drows = grad_out.m * w_.transpose();

    Tensor dx;
    dx.batch = cached_batch_;
    dx.m = Eigen::MatrixXd::Zero(cached_batch_ * cached_frames_, in_ch_);
    for (int b = 0; b < cached_batch_; ++b) {
        const Eigen::Index base = b * cached_frames_;
        for (Eigen::Index f = 0; f < cached_frames_; ++f) {
            for (int k = 0; k < klen_; ++k) {
                const Eigen::Index src = f + k - pad_;
                if (src < 0 || src >= cached_frames_) continue;
                dx.m.row(base + src) += drows.block(base + f, k * in_ch_, 1, in_ch_);
            }
        }
    }
    return dx;
}

void Conv1d::collect(std::vector<ParamView>& out) {
    out.push_back({describe() + ".W", w_.data(), gw_.data(), static_cast<std::size_t>(w_.size()), true});
    out.push_back({describe() + ".b", b_.data(), gb_.data(), static_cast<std::size_t>(b_.size()), true});
}

std::string Conv1d::describe() const {
    std::ostringstream os;
    os << "conv1d(" << in_ch_ << "->" << out_ch_ << ",k" << klen_ << ")";
    return os.str();
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(int channels, double momentum, double eps)
    : channels_(channels), momentum_(momentum), eps_(eps) {
    gamma_.setOnes(channels);
    beta_.setZero(channels);
    ggamma_.setZero(channels);
    gbeta_.setZero(channels);
    run_mean_.setZero(channels);
    run_var_.setOnes(channels);
}

Tensor BatchNorm::forward(const Tensor& x, Rng&) {
    if (x.m.cols() != channels_) throw std::invalid_argument("batchnorm: channel mismatch");
    const double n = static_cast<double>(x.m.rows());
    const Eigen::VectorXd mu = x.m.colwise().mean();
    const Eigen::VectorXd var =
        (x.m.rowwise() - mu.transpose()).array().square().colwise().mean();
    cached_istd_ = (var.array() + eps_).rsqrt();
    cached_xhat_ = (x.m.rowwise() - mu.transpose()).array().rowwise() *
                   cached_istd_.transpose().array();

    run_mean_ = momentum_ * run_mean_ + (1.0 - momentum_) * mu;
    run_var_ = momentum_ * run_var_ + (1.0 - momentum_) * var;

    Tensor out;
    out.batch = x.batch;
    out.m = (cached_xhat_.array().rowwise() * gamma_.transpose().array()).rowwise() +
            beta_.transpose().array();
    (void)n;
    return out;
}

Tensor BatchNorm::infer(const Tensor& x) const {
    if (x.m.cols() != channels_) throw std::invalid_argument("batchnorm: channel mismatch");
    const Eigen::VectorXd istd = (run_var_.array() + eps_).rsqrt();
    Tensor out;
    out.batch = x.batch;
    out.m = (((x.m.rowwise() - run_mean_.transpose()).array().rowwise() *
              istd.transpose().array())
                 .rowwise() *
             gamma_.transpose().array())
                .rowwise() +
            beta_.transpose().array();
    return out;
}

Tensor BatchNorm::backward(const Tensor& grad_out) {
    const double n = static_cast<double>(grad_out.m.rows());
    ggamma_ = (grad_out.m.array() * cached_xhat_.array()).colwise().sum();
    gbeta_ = grad_out.m.colwise().sum();

    const Eigen::VectorXd mean_dy = grad_out.m.colwise().mean();
    const Eigen::VectorXd mean_dy_xhat =
        (grad_out.m.array() * cached_xhat_.array()).colwise().mean();

    Tensor dx;
    dx.batch = grad_out.batch;
    dx.m = ((grad_out.m.rowwise() - mean_dy.transpose()).array() -
            cached_xhat_.array().rowwise() * mean_dy_xhat.transpose().array())
               .rowwise() *
           (gamma_.array() * cached_istd_.array()).transpose();
    (void)n;
    return dx;
}

void BatchNorm::collect(std::vector<ParamView>& out) {
    out.push_back({describe() + ".gamma", gamma_.data(), ggamma_.data(),
                   static_cast<std::size_t>(gamma_.size()), true});
    out.push_back({describe() + ".beta", beta_.data(), gbeta_.data(),
                   static_cast<std::size_t>(beta_.size()), true});
    out.push_back({describe() + ".running_mean", run_mean_.data(), nullptr,
                   static_cast<std::size_t>(run_mean_.size()), false});
    out.push_back({describe() + ".running_var", run_var_.data(), nullptr,
                   static_cast<std::size_t>(run_var_.size()), false});
}

std::string BatchNorm::describe() const {
    std::ostringstream os;
    os << "batchnorm(" << channels_ << ")";
    return os.str();
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& x, Rng&) {
    cached_mask_ = (x.m.array() > 0.0).cast<double>();
    Tensor out;
    out.batch = x.batch;
    out.m = x.m.cwiseMax(0.0);
    return out;
}

Tensor ReLU::infer(const Tensor& x) const {
    Tensor out;
    out.batch = x.batch;
    out.m = x.m.cwiseMax(0.0);
    return out;
}

Tensor ReLU::backward(const Tensor& grad_out) {
    Tensor dx;
    dx.batch = grad_out.batch;
    dx.m = grad_out.m.array() * cached_mask_.array();
    return dx;
}

// --------------------------------------------------------------- Dropout

Dropout::Dropout(double rate) : rate_(rate) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
}

Tensor Dropout::forward(const Tensor& x, Rng& rng) {
    Tensor out;
    out.batch = x.batch;
    if (rate_ <= 0.0) {
        mask_.setOnes(x.m.rows(), x.m.cols());
        out.m = x.m;
        return out;
    }
    const bool reuse = frozen_ && mask_.rows() == x.m.rows() && mask_.cols() == x.m.cols();
    if (!reuse) {
        const double scale = 1.0 / (1.0 - rate_);
        mask_.resize(x.m.rows(), x.m.cols());
        for (Eigen::Index i = 0; i < mask_.rows(); ++i) {
            for (Eigen::Index j = 0; j < mask_.cols(); ++j) {
                mask_(i, j) = rng.uniform() < rate_ ? 0.0 : scale;
            }
        }
    }
    out.m = x.m.array() * mask_.array();
    return out;
}

Tensor Dropout::infer(const Tensor& x) const {
    Tensor out;
    out.batch = x.batch;
    out.m = x.m;
    return out;
}

Tensor Dropout::backward(const Tensor& grad_out) {
    Tensor dx;
    dx.batch = grad_out.batch;
    dx.m = grad_out.m.array() * mask_.array();
    return dx;
}

std::string Dropout::describe() const {
    std::ostringstream os;
    os << "dropout(" << rate_ << ")";
    return os.str();
}

// --------------------------------------------------------------- Flatten

Tensor Flatten::forward(const Tensor& x, Rng&) {
    cached_frames_ = x.frames();
    cached_channels_ = x.m.cols();
    Tensor out;
    out.batch = x.batch;
    out.m.resize(x.batch, cached_frames_ * cached_channels_);
    for (int b = 0; b < x.batch; ++b) {
        for (Eigen::Index f = 0; f < cached_frames_; ++f) {
            out.m.block(b, f * cached_channels_, 1, cached_channels_) =
                x.m.row(b * cached_frames_ + f);
        }
    }
    return out;
}

Tensor Flatten::infer(const Tensor& x) const {
    const Eigen::Index frames = x.frames();
    const Eigen::Index channels = x.m.cols();
    Tensor out;
    out.batch = x.batch;
    out.m.resize(x.batch, frames * channels);
    for (int b = 0; b < x.batch; ++b) {
        for (Eigen::Index f = 0; f < frames; ++f) {
            out.m.block(b, f * channels, 1, channels) = x.m.row(b * frames + f);
        }
    }
    return out;
}

Tensor Flatten::backward(const Tensor& grad_out) {
    Tensor dx;
    dx.batch = grad_out.batch;
    dx.m.resize(grad_out.batch * cached_frames_, cached_channels_);
    for (int b = 0; b < grad_out.batch; ++b) {
        for (Eigen::Index f = 0; f < cached_frames_; ++f) {
            dx.m.row(b * cached_frames_ + f) =
                grad_out.m.block(b, f * cached_channels_, 1, cached_channels_);
        }
    }
    return dx;
}

// ----------------------------------------------------------------- Dense

Dense::Dense(int in_features, int out_features) : in_(in_features), out_(out_features) {
    if (in_features <= 0 || out_features <= 0) {
        throw std::invalid_argument("dense: feature counts must be positive");
    }
    w_.setZero(in_, out_);
    gw_.setZero(in_, out_);
    b_.setZero(out_);
    gb_.setZero(out_);
}

void Dense::init(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_));
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
        for (Eigen::Index j = 0; j < w_.cols(); ++j) w_(i, j) = rng.uniform(-limit, limit);
    }
    b_.setZero();
}

Tensor Dense::forward(const Tensor& x, Rng&) {
    if (x.m.cols() != in_) throw std::invalid_argument("dense: feature mismatch");
    cached_input_ = x.m;
    Tensor out;
    out.batch = x.batch;
    out.m = x.m * w_;
    out.m.rowwise() += b_.transpose();
    return out;
}

Tensor Dense::infer(const Tensor& x) const {
    if (x.m.cols() != in_) throw std::invalid_argument("dense: feature mismatch");
    Tensor out;
    out.batch = x.batch;
    out.m = x.m * w_;
    out.m.rowwise() += b_.transpose();
    return out;
}

Tensor Dense::backward(const Tensor& grad_out) {
    gw_ = cached_input_.transpose() * grad_out.m;
    gb_ = grad_out.m.colwise().sum();
    Tensor dx;
    dx.batch = grad_out.batch;
    dx.m = grad_out.m * w_.transpose();
    return dx;
}

void Dense::collect(std::vector<ParamView>& out) {
    out.push_back({describe() + ".W", w_.data(), gw_.data(), static_cast<std::size_t>(w_.size()), true});
    out.push_back({describe() + ".b", b_.data(), gb_.data(), static_cast<std::size_t>(b_.size()), true});
}

std::string Dense::describe() const {
    std::ostringstream os;
    os << "dense(" << in_ << "->" << out_ << ")";
    return os.str();
}

}  // namespace fmfusion::nn
