#pragma once

#include <vector>

namespace fmfusion::eval {

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are discarded before ranking; ties in |difference| get
/// average ranks. For n <= 25 remaining pairs the p-value is exact over the
/// distribution of all 2^n sign assignments (tail counts computed by an
/// exact rank-sum convolution on doubled ranks, which stay integral under
/// average ranking): p = P(W <= min(W+, W-)) + P(W >= max(W+, W-)), clipped
/// to [0, 1]. With no rank ties and n = 9 every attainable p is a multiple
/// of 2/512. For n > 25 the tie-corrected normal approximation with
/// continuity correction is used instead.
///
/// Returns 1.0 by convention when every difference is zero. Throws
/// std::invalid_argument on length mismatch or empty input.
double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fmfusion::eval
