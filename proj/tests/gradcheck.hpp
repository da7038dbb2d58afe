// Finite-difference gradient verification shared by the unit tests and the
// acceptance suite.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <memory>
#include <vector>

#include "fmfusion/nn/layers.hpp"
#include "fmfusion/nn/train.hpp"
#include "fmfusion/rng.hpp"

namespace gradcheck {

using fmfusion::Rng;
namespace nn = fmfusion::nn;

/// A throwaway network assembled from explicit layers (so micro-networks
/// below the ModelSpec invariants can be checked too).
struct MicroNet {
    std::vector<std::unique_ptr<nn::Layer>> layers;

    Eigen::MatrixXd forward(const nn::Tensor& x, Rng& rng) {
        nn::Tensor t = x;
        for (auto& l : layers) t = l->forward(t, rng);
        return t.m;
    }
    void backward(const Eigen::MatrixXd& dlogits, int batch) {
        nn::Tensor g{dlogits, batch};
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
    }
    std::vector<nn::ParamView> params() {
        std::vector<nn::ParamView> v;
        for (auto& l : layers) l->collect(v);
        return v;
    }
    void freeze_dropout() {
        for (auto& l : layers) {
            if (auto* d = dynamic_cast<nn::Dropout*>(l.get())) d->freeze_mask(true);
        }
    }
};

/// Mean BCE loss of the net on a fixed batch with fixed labels.
inline double net_loss(MicroNet& net, const nn::Tensor& x, const std::vector<int>& labels,
                       Rng& rng) {
    const Eigen::MatrixXd logits = net.forward(x, rng);
    double loss = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        loss += nn::bce_with_logits(logits(r, 0), labels[r]);
    }
    return loss / static_cast<double>(logits.rows());
}

struct CheckResult {
    double max_rel_err = 0.0;
    int params_checked = 0;
    bool conditioned = true;  // false when a ReLU/BN preactivation sat near 0
};

/// Compares analytic parameter gradients against central finite differences
/// at perturbation h. The error is |a - fd| / max(|a|, |fd|, scale_floor):
/// relative for gradients above the floor, absolute (1e-4 * floor) below it.
/// The floor is needed because the finite difference itself carries ~1e-7
/// absolute noise at h = 1e-3, which no implementation can beat on
/// near-zero gradients; a wrong formula still fails because its mismatch is
/// proportional to the O(0.01..1) gradient scale.
inline CheckResult check_gradients(MicroNet& net, const nn::Tensor& x,
                                   const std::vector<int>& labels, double h = 1e-3,
                                   double scale_floor = 1e-2) {
    net.freeze_dropout();
    Rng rng(123);  // consumed only by the first forward (frozen masks after)

    // Analytic gradients.
    const Eigen::MatrixXd logits = net.forward(x, rng);
    Eigen::MatrixXd dlogits(logits.rows(), 1);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        dlogits(r, 0) =
            (nn::sigmoid(logits(r, 0)) - labels[r]) / static_cast<double>(logits.rows());
    }
    net.backward(dlogits, x.batch);

    auto views = net.params();
    std::vector<double> analytic;
    for (const auto& v : views) {
        if (!v.trainable) continue;
        for (std::size_t i = 0; i < v.size; ++i) analytic.push_back(v.grad[i]);
    }

    CheckResult res;
    std::size_t ai = 0;
    for (auto& v : views) {
        if (!v.trainable) continue;
        for (std::size_t i = 0; i < v.size; ++i, ++ai) {
            const double keep = v.value[i];
            v.value[i] = keep + h;
            const double up = net_loss(net, x, labels, rng);
            v.value[i] = keep - h;
            const double dn = net_loss(net, x, labels, rng);
            v.value[i] = keep;
            const double fd = (up - dn) / (2.0 * h);
            const double a = analytic[ai];
            const double scale = std::max({std::abs(a), std::abs(fd), scale_floor});
            const double err = std::abs(a - fd) / scale;
            res.max_rel_err = std::max(res.max_rel_err, err);
            ++res.params_checked;
        }
    }
    return res;
}

/// Builds a micro-network covering every layer type; ~100 parameters.
/// Returns false when the draw is badly conditioned for finite differences:
/// a preactivation too close to a ReLU kink (the central difference would
/// straddle the non-smooth point) or a batch-norm input with near-zero
/// variance (the normalization becomes so sharply curved that the h^2
/// truncation error of the central difference exceeds the tolerance). The
/// caller draws a fresh seed in either case.
inline bool build_micro_net(std::uint64_t seed, MicroNet& net, nn::Tensor& x,
                            std::vector<int>& labels) {
    Rng rng(seed);
    const int frames = 8, in_ch = 2, conv_ch = 2, fc = 4, batch = 16;

    auto conv = std::make_unique<nn::Conv1d>(in_ch, conv_ch, 3);
    conv->init(rng);
    auto dense = std::make_unique<nn::Dense>(frames * conv_ch, fc);
    dense->init(rng);
    auto out = std::make_unique<nn::Dense>(fc, 1);
    out->init(rng);
    // Evaluate at a point with inflated weights: batch variances feeding the
    // batch-norm layers become large, keeping the normalization in a smooth
    // regime where the h^2 truncation of the central difference stays well
    // below the tolerance.
    conv->weights() *= 5.0;
    dense->weights() *= 5.0;

    net.layers.clear();
    net.layers.push_back(std::move(conv));
    net.layers.push_back(std::make_unique<nn::BatchNorm>(conv_ch));
    net.layers.push_back(std::make_unique<nn::ReLU>());
    net.layers.push_back(std::make_unique<nn::Dropout>(0.2));
    net.layers.push_back(std::make_unique<nn::Flatten>());
    net.layers.push_back(std::move(dense));
    net.layers.push_back(std::make_unique<nn::BatchNorm>(fc));
    net.layers.push_back(std::make_unique<nn::ReLU>());
    net.layers.push_back(std::make_unique<nn::Dropout>(0.2));
    net.layers.push_back(std::move(out));

    x.batch = batch;
    x.m.resize(batch * frames, in_ch);
    for (Eigen::Index i = 0; i < x.m.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.m.cols(); ++j) x.m(i, j) = rng.normal();
    }
    labels.clear();
    for (int b = 0; b < batch; ++b) labels.push_back(static_cast<int>(rng.bits() & 1));

    net.freeze_dropout();
    Rng fwd(123);
    nn::Tensor t = x;
    for (auto& l : net.layers) {
        if (dynamic_cast<nn::ReLU*>(l.get()) && t.m.array().abs().minCoeff() < 6e-3) {
            return false;
        }
        if (dynamic_cast<nn::BatchNorm*>(l.get())) {
            for (Eigen::Index c = 0; c < t.m.cols(); ++c) {
                const double mu = t.m.col(c).mean();
                if ((t.m.col(c).array() - mu).square().mean() < 2.0) return false;
            }
        }
        t = l->forward(t, fwd);
    }
    return true;
}

}  // namespace gradcheck
