#pragma once

#include <vector>

#include "fmfusion/types.hpp"

namespace fmfusion::eval {

/// Confusion counts and the derived rates; FM+ is the positive class.
/// ba = (tpr + tnr) / 2.
struct MetricSet {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    double tpr = 0.0, tnr = 0.0, ba = 0.0;
};

/// Throws std::invalid_argument on length mismatch, empty input, or a truth
/// vector with a single class (TPR or TNR undefined).
MetricSet compute_metrics(const std::vector<Label>& preds, const std::vector<Label>& truth);

MetricSet metrics_from_counts(long tp, long fn, long tn, long fp);

struct MeanCi {
    double mean = 0.0, lo = 0.0, hi = 0.0;
};

/// Student-t confidence interval for the mean:
/// mean +- t_{(1+level)/2, n-1} * s / sqrt(n), sample standard deviation s.
/// Requires n >= 2.
MeanCi mean_ci(const std::vector<double>& values, double level = 0.95);

}  // namespace fmfusion::eval
