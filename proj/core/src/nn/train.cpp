#include "fmfusion/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fmfusion/errors.hpp"

namespace fmfusion::nn {

double bce_with_logits(double logit, int label01) {
    if (label01 != 0 && label01 != 1) throw std::invalid_argument("label must be 0 or 1");
    const double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
    return softplus - static_cast<double>(label01) * logit;
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grads,
               AdamState& state, int t, const TrainConfig& cfg) {
    if (t < 1) throw std::invalid_argument("adam step index must be >= 1");
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.array().square().matrix();
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    params.array() -= cfg.learning_rate * (state.m.array() / bc1) /
                      ((state.v.array() / bc2).sqrt() + cfg.epsilon);
}

namespace {

Tensor gather_batch(const std::vector<Eigen::MatrixXd>& inputs, const std::vector<int>& idx,
                    int begin, int count) {
    std::vector<const Eigen::MatrixXd*> ptrs;
    ptrs.reserve(count);
    for (int i = begin; i < begin + count; ++i) ptrs.push_back(&inputs[idx[i]]);
    return make_batch(ptrs);
}

double mean_loss(const Eigen::MatrixXd& logits, const std::vector<Label>& labels,
                 const std::vector<int>& idx, int begin) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        sum += bce_with_logits(logits(r, 0), encode_label(labels[idx[begin + r]]));
    }
    return sum / static_cast<double>(logits.rows());
}

std::vector<Eigen::MatrixXd> strip_tags(const std::vector<FeatureMatrix>& inputs) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(inputs.size());
    for (const auto& fm : inputs) out.push_back(fm.data());
    return out;
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const std::vector<Eigen::MatrixXd>& inputs,
                   const std::vector<Label>& labels, const TrainConfig& cfg) {
    const int n = static_cast<int>(inputs.size());
    if (n < 2) throw std::invalid_argument("need at least two training snippets");

    // Random snippet-level validation split, drawn from a stream separate
    // from the init/shuffle/dropout stream so both entry points share the
    // rest of the protocol.
    Rng split_rng(derive_seed(cfg.seed, {0x5217ull}));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(order);
    int n_val = static_cast<int>(std::lround(cfg.validation_split * n));
    n_val = std::clamp(n_val, 1, n - 1);
    std::vector<int> val_idx(order.begin(), order.begin() + n_val);
    std::vector<int> train_idx(order.begin() + n_val, order.end());
    return train_with_split(spec, inputs, labels, std::move(train_idx), std::move(val_idx), cfg);
}

TrainedModel train(const ModelSpec& spec, const std::vector<FeatureMatrix>& inputs,
                   const std::vector<Label>& labels, const TrainConfig& cfg) {
    return train(spec, strip_tags(inputs), labels, cfg);
}

TrainedModel train_with_split(const ModelSpec& spec, const std::vector<FeatureMatrix>& inputs,
                              const std::vector<Label>& labels, std::vector<int> train_idx,
                              std::vector<int> val_idx, const TrainConfig& cfg) {
    return train_with_split(spec, strip_tags(inputs), labels, std::move(train_idx),
                            std::move(val_idx), cfg);
}

TrainedModel train_with_split(const ModelSpec& spec, const std::vector<Eigen::MatrixXd>& inputs,
                              const std::vector<Label>& labels, std::vector<int> train_idx,
                              std::vector<int> val_idx, const TrainConfig& cfg) {
    validate_model_spec(spec);
    if (inputs.size() != labels.size()) throw std::invalid_argument("inputs/labels size mismatch");
    const int n = static_cast<int>(inputs.size());
    if (n < 2) throw std::invalid_argument("need at least two training snippets");
    for (const auto& fm : inputs) {
        if (fm.rows() != spec.input_frames || fm.cols() != spec.input_channels) {
            throw std::invalid_argument("training input does not match the model input shape");
        }
    }
    if (train_idx.empty() || val_idx.empty()) {
        throw std::invalid_argument("train/validation assignment must both be non-empty");
    }
    const int n_plus = static_cast<int>(std::count(labels.begin(), labels.end(), Label::FMplus));
    if (n_plus == 0 || n_plus == n) {
        throw std::invalid_argument("training data contains a single class");
    }

    Rng rng(cfg.seed);
    TrainedModel tm;
    tm.model = std::make_unique<Model>(spec, rng);

    auto views = tm.model->params();
    std::size_t total = 0;
    for (const auto& v : views) {
        if (v.trainable) total += v.size;
    }
    AdamState adam(static_cast<Eigen::Index>(total));
    Eigen::VectorXd flat_p(total), flat_g(total);

    const auto gather = [&] {
        std::size_t off = 0;
        for (const auto& v : views) {
            if (!v.trainable) continue;
            std::copy(v.value, v.value + v.size, flat_p.data() + off);
            std::copy(v.grad, v.grad + v.size, flat_g.data() + off);
            off += v.size;
        }
    };
    const auto scatter = [&] {
        std::size_t off = 0;
        for (const auto& v : views) {
            if (!v.trainable) continue;
            std::copy(flat_p.data() + off, flat_p.data() + off + v.size, v.value);
            off += v.size;
        }
    };

    const auto validation_loss = [&]() {
        const Tensor vx = gather_batch(inputs, val_idx, 0, static_cast<int>(val_idx.size()));
        const Eigen::MatrixXd logits = tm.model->infer_logits(vx);
        return mean_loss(logits, labels, val_idx, 0);
    };

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_snapshot;
    int since_improve = 0;
    int adam_t = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_loss_sum = 0.0;
        int batches = 0;
        for (int begin = 0; begin < static_cast<int>(train_idx.size()); begin += cfg.batch_size) {
            const int count =
                std::min<int>(cfg.batch_size, static_cast<int>(train_idx.size()) - begin);
            const Tensor bx = gather_batch(inputs, train_idx, begin, count);
            const Eigen::MatrixXd logits = tm.model->forward_train(bx, rng);

            double loss = 0.0;
            Eigen::MatrixXd dlogits(count, 1);
            for (int r = 0; r < count; ++r) {
                const int y = encode_label(labels[train_idx[begin + r]]);
                loss += bce_with_logits(logits(r, 0), y);
                dlogits(r, 0) = (sigmoid(logits(r, 0)) - y) / static_cast<double>(count);
            }
            loss /= count;
            if (!std::isfinite(loss)) {
                std::ostringstream os;
                os << "non-finite training loss at epoch " << epoch;
                throw NumericError(os.str());
            }
            epoch_loss_sum += loss;
            ++batches;

            tm.model->backward(dlogits, count);
            gather();
            adam_step(flat_p, flat_g, adam, ++adam_t, cfg);
            scatter();
        }

        const double val = validation_loss();
        if (!std::isfinite(val)) {
            std::ostringstream os;
            os << "non-finite validation loss at epoch " << epoch;
            throw NumericError(os.str());
        }
        tm.train_log.push_back({epoch_loss_sum / std::max(batches, 1), val});

        if (val < best_val) {
            best_val = val;
            tm.best_epoch = epoch;
            best_snapshot = tm.model->snapshot();
            since_improve = 0;
        } else if (++since_improve >= cfg.patience) {
            break;
        }
    }

    tm.model->restore(best_snapshot);
    tm.best_val_loss = best_val;
    return tm;
}

double predict_proba(const TrainedModel& tm, const Eigen::MatrixXd& x) {
    const ModelSpec& spec = tm.model->spec();
    if (x.rows() != spec.input_frames || x.cols() != spec.input_channels) {
        throw std::invalid_argument("predict_proba: input does not match the model input shape");
    }
    Tensor t;
    t.batch = 1;
    t.m = x;
    const Eigen::MatrixXd logits = tm.model->infer_logits(t);
    return sigmoid(logits(0, 0));
}

double predict_proba(const TrainedModel& tm, const FeatureMatrix& x) {
    return predict_proba(tm, x.data());
}

}  // namespace fmfusion::nn
