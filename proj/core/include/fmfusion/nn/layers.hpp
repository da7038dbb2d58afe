#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "fmfusion/rng.hpp"

namespace fmfusion::nn {

/// A batch of samples. During the temporal stages rows = batch*frames and
/// cols = channels (samples stacked vertically); after Flatten rows = batch
/// and cols = frames*channels.
struct Tensor {
    Eigen::MatrixXd m;
    int batch = 1;

    Eigen::Index frames() const { return m.rows() / batch; }
};

/// Stacks equally shaped frames-x-channels samples into one Tensor.
Tensor make_batch(const std::vector<const Eigen::MatrixXd*>& samples);

/// Flat view of one parameter (or state) buffer of a layer. Eigen matrices
/// are stored contiguously, so a raw pointer + size suffices. Buffers with
/// trainable=false (batch-norm running statistics) are serialized and
/// snapshotted but never touched by the optimizer.
struct ParamView {
    std::string name;
    double* value = nullptr;
    double* grad = nullptr;
    std::size_t size = 0;
    bool trainable = true;
};

class Layer {
public:
    virtual ~Layer() = default;

    /// Training-mode forward; caches whatever backward needs.
    virtual Tensor forward(const Tensor& x, Rng& rng) = 0;

    /// Inference-mode forward: no caching, dropout disabled, batch-norm on
    /// running statistics.
    virtual Tensor infer(const Tensor& x) const = 0;

    /// Backward for the most recent forward. Overwrites parameter gradients
    /// and returns the gradient with respect to the layer input.
    virtual Tensor backward(const Tensor& grad_out) = 0;

    virtual void collect(std::vector<ParamView>& out) {}
    virtual std::string describe() const = 0;
};

/// Temporal cross-correlation with zero ("same") padding and stride 1; the
/// output keeps the input length. Weights are stored as a
/// (kernel_len*in_channels) x out_channels matrix so the forward pass is an
/// im2row gather plus one GEMM.
class Conv1d final : public Layer {
public:
    Conv1d(int in_channels, int out_channels, int kernel_len);

    void init(Rng& rng);  // fan-in-scaled uniform, bias zero
    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    void collect(std::vector<ParamView>& out) override;
    std::string describe() const override;

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int kernel_len() const { return klen_; }

    Eigen::MatrixXd& weights() { return w_; }
    Eigen::VectorXd& bias() { return b_; }

private:
    Eigen::MatrixXd im2row(const Tensor& x) const;

    int in_ch_, out_ch_, klen_, pad_;
    Eigen::MatrixXd w_, gw_;
    Eigen::VectorXd b_, gb_;
    Eigen::MatrixXd cached_rows_;  // im2row of the last training forward
    int cached_batch_ = 0;
    Eigen::Index cached_frames_ = 0;
};

/// Normalizes each channel (column) over all rows of the batch — batch and
/// time jointly during the conv stages, batch alone after Flatten. Running
/// statistics use momentum 0.99 and epsilon 1e-3; inference is the fixed
/// affine map through those statistics.
class BatchNorm final : public Layer {
public:
    explicit BatchNorm(int channels, double momentum = 0.99, double eps = 1e-3);

    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    void collect(std::vector<ParamView>& out) override;
    std::string describe() const override;

    Eigen::VectorXd& gamma() { return gamma_; }
    Eigen::VectorXd& beta() { return beta_; }
    Eigen::VectorXd& running_mean() { return run_mean_; }
    Eigen::VectorXd& running_var() { return run_var_; }

private:
    int channels_;
    double momentum_, eps_;
    Eigen::VectorXd gamma_, beta_, ggamma_, gbeta_;
    Eigen::VectorXd run_mean_, run_var_;
    Eigen::MatrixXd cached_xhat_;
    Eigen::VectorXd cached_istd_;
};

class ReLU final : public Layer {
public:
    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    std::string describe() const override { return "relu"; }

private:
    Eigen::MatrixXd cached_mask_;
};

/// Inverted dropout: units are kept with probability 1-rate and scaled by
/// 1/(1-rate) at training time; inference is the identity. A frozen mask can
/// be requested so finite-difference gradient checks see a deterministic
/// function.
class Dropout final : public Layer {
public:
    explicit Dropout(double rate);

    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    std::string describe() const override;

    void freeze_mask(bool on) { frozen_ = on; }

private:
    double rate_;
    bool frozen_ = false;
    Eigen::MatrixXd mask_;
};

/// (batch*frames) x channels -> batch x (frames*channels), frame-major per
/// sample.
class Flatten final : public Layer {
public:
    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    std::string describe() const override { return "flatten"; }

private:
    Eigen::Index cached_frames_ = 0;
    Eigen::Index cached_channels_ = 0;
};

class Dense final : public Layer {
public:
    Dense(int in_features, int out_features);

    void init(Rng& rng);
    Tensor forward(const Tensor& x, Rng& rng) override;
    Tensor infer(const Tensor& x) const override;
    Tensor backward(const Tensor& grad_out) override;
    void collect(std::vector<ParamView>& out) override;
    std::string describe() const override;

    int in_features() const { return in_; }
    int out_features() const { return out_; }
    Eigen::MatrixXd& weights() { return w_; }
    Eigen::VectorXd& bias() { return b_; }

private:
    int in_, out_;
    Eigen::MatrixXd w_, gw_;
    Eigen::VectorXd b_, gb_;
    Eigen::MatrixXd cached_input_;
};

}  // namespace fmfusion::nn
