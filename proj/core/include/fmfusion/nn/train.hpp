#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fmfusion/nn/model.hpp"
#include "fmfusion/types.hpp"

namespace fmfusion::nn {

/// Training protocol parameters. Defaults are the protocol used throughout:
/// Adam(lr 0.001, beta1 0.9, beta2 0.999, eps 1e-7), batch size 4,
/// validation split 1/8, patience 10 with best-weights restore. max_epochs
/// caps the otherwise unbounded patience loop.
struct TrainConfig {
    int batch_size = 4;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    double validation_split = 1.0 / 8.0;
    int patience = 10;
    int max_epochs = 200;
    std::uint64_t seed = 0;
};

/// Numerically stable binary cross-entropy on a logit:
/// softplus(z) - label*z with softplus(z) = max(z,0) + log1p(exp(-|z|)).
double bce_with_logits(double logit, int label01);

double sigmoid(double z);

struct AdamState {
    Eigen::VectorXd m, v;

    explicit AdamState(Eigen::Index n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

/// One bias-corrected Adam update, t is the 1-based step index. epsilon is
/// added outside the square root.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, int t, const TrainConfig& cfg);

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainedModel {
    std::unique_ptr<Model> model;
    std::vector<EpochLog> train_log;
    double best_val_loss = 0.0;
    int best_epoch = -1;  // 0-based index into train_log

    const ModelSpec& spec() const { return model->spec(); }
};

/// Trains one network: random snippet-level validation split, minibatch
/// Adam on shuffled batches, early stopping on validation loss with
/// best-weights restore. Deterministic given cfg.seed. Throws
/// std::invalid_argument on single-class training data and NumericError
/// (with the epoch index) on a non-finite loss.
TrainedModel train(const ModelSpec& spec, const std::vector<Eigen::MatrixXd>& inputs,
                   const std::vector<Label>& labels, const TrainConfig& cfg);
TrainedModel train(const ModelSpec& spec, const std::vector<FeatureMatrix>& inputs,
                   const std::vector<Label>& labels, const TrainConfig& cfg);

/// Same protocol with a caller-supplied train/validation assignment
/// (cfg.validation_split is ignored). The grid-search stage uses this so
/// its normalization statistics and validation hold-out agree.
TrainedModel train_with_split(const ModelSpec& spec, const std::vector<Eigen::MatrixXd>& inputs,
                              const std::vector<Label>& labels, std::vector<int> train_idx,
                              std::vector<int> val_idx, const TrainConfig& cfg);
TrainedModel train_with_split(const ModelSpec& spec, const std::vector<FeatureMatrix>& inputs,
                              const std::vector<Label>& labels, std::vector<int> train_idx,
                              std::vector<int> val_idx, const TrainConfig& cfg);

/// Sigmoid of the inference-mode logit; dropout off, batch-norm on running
/// statistics. Pure: repeated calls give identical results.
double predict_proba(const TrainedModel& tm, const Eigen::MatrixXd& x);
double predict_proba(const TrainedModel& tm, const FeatureMatrix& x);

}  // namespace fmfusion::nn
