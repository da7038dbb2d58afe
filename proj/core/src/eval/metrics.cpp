#include "fmfusion/eval/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace fmfusion::eval {

MetricSet metrics_from_counts(long tp, long fn, long tn, long fp) {
    if (tp < 0 || fn < 0 || tn < 0 || fp < 0) {
        throw std::invalid_argument("confusion counts must be non-negative");
    }
    if (tp + fn == 0 || tn + fp == 0) {
        throw std::invalid_argument("single-class truth: TPR or TNR undefined");
    }
    MetricSet m;
    m.tp = tp;
    m.fn = fn;
    m.tn = tn;
    m.fp = fp;
    m.tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
    m.ba = 0.5 * (m.tpr + m.tnr);
    return m;
}

MetricSet compute_metrics(const std::vector<Label>& preds, const std::vector<Label>& truth) {
    if (preds.size() != truth.size()) {
        throw std::invalid_argument("predictions and truth differ in length");
    }
    if (preds.empty()) throw std::invalid_argument("empty label vectors");
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool p = preds[i] == Label::FMplus;
        const bool t = truth[i] == Label::FMplus;
        if (p && t) ++tp;
        else if (!p && !t) ++tn;
        else if (p && !t) ++fp;
        else ++fn;
    }
    return metrics_from_counts(tp, fn, tn, fp);
}

MeanCi mean_ci(const std::vector<double>& values, double level) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("mean_ci needs at least two values");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));

    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(dist, 0.5 * (1.0 + level));
    const double half = t * s / std::sqrt(static_cast<double>(n));
    return MeanCi{mean, mean - half, mean + half};
}

}  // namespace fmfusion::eval
