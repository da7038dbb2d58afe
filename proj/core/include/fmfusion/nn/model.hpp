#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fmfusion/nn/layers.hpp"
#include "fmfusion/types.hpp"

namespace fmfusion::nn {

struct ConvLayerSpec {
    int n_kernels = 0;
    int kernel_len = 0;

    friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

/// Hyperparameters of one CNN: a stack of 1-3 conv blocks, one FC block, a
/// single linear output unit. Each conv/FC block is Conv|Dense -> BatchNorm
/// -> ReLU -> Dropout.
struct ModelSpec {
    std::vector<ConvLayerSpec> conv_layers;
    int fc_units = 128;
    double dropout_rate = 0.2;
    int input_frames = 0;
    int input_channels = 0;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Throws std::invalid_argument when the spec breaks its invariants
/// (1-3 conv layers, odd kernel lengths, positive sizes).
void validate_model_spec(const ModelSpec& spec);

std::string spec_to_string(const ModelSpec& spec);

/// The tuned architectures (10 per modality plus 10 for the fused input),
/// addressable as "mat-1".."mat-10", "imu-...", "vid-...", "fused-...".
ModelSpec preset_model_spec(const std::string& name);
std::vector<std::string> preset_names();

/// A CNN instance: owns the layers, exposes flat parameter views for the
/// optimizer, checkpointing, and best-weights snapshots.
class Model {
public:
    Model(const ModelSpec& spec, Rng& init_rng);

    const ModelSpec& spec() const { return spec_; }

    /// Training-mode logits for a batch (rows = batch, one logit column).
    Eigen::MatrixXd forward_train(const Tensor& x, Rng& rng);

    /// Backward from d(loss)/d(logits); overwrites parameter gradients.
    void backward(const Eigen::MatrixXd& dlogits, int batch);

    /// Inference-mode logits.
    Eigen::MatrixXd infer_logits(const Tensor& x) const;

    std::vector<ParamView> params();

    /// Copies of all buffers (parameters + batch-norm statistics), used for
    /// best-weights restore and serialization.
    std::vector<double> snapshot();
    void restore(const std::vector<double>& snap);

    std::size_t parameter_count();  // trainable only

    /// Test hook: freeze dropout masks so the forward pass is deterministic
    /// under repeated evaluation (finite-difference checks).
    void freeze_dropout(bool on);

private:
    ModelSpec spec_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace fmfusion::nn
