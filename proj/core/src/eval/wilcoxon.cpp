#include "fmfusion/eval/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace fmfusion::eval {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: samples differ in length");
    if (a.empty()) throw std::invalid_argument("wilcoxon: empty samples");

    std::vector<double> diff;
    diff.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diff.push_back(d);
    }
    const int n = static_cast<int>(diff.size());
    if (n == 0) return 1.0;  // identical samples

    // Average ranks of |d|, doubled so they stay integral under ties.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return std::abs(diff[x]) < std::abs(diff[y]); });
    std::vector<long> rank2(n);
    std::vector<long> tie_sizes;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j < n && std::abs(diff[order[j]]) == std::abs(diff[order[i]])) ++j;
        const long r2 = i + j + 1;  // 2 * average of ranks i+1 .. j
        for (int k = i; k < j; ++k) rank2[order[k]] = r2;
        tie_sizes.push_back(j - i);
        i = j;
    }

    long w2_plus = 0;
    for (int k = 0; k < n; ++k) {
        if (diff[k] > 0.0) w2_plus += rank2[k];
    }
    const long total2 = static_cast<long>(n) * (n + 1);
    const long w2_minus = total2 - w2_plus;

    if (n <= 25) {
        // Exact tail counts over all 2^n sign assignments via the rank-sum
        // distribution (counts fit in 64 bits for n <= 25).
        std::vector<std::uint64_t> cnt(static_cast<std::size_t>(total2) + 1, 0);
        cnt[0] = 1;
        for (int k = 0; k < n; ++k) {
            const long r2 = rank2[k];
            for (long w = total2; w >= r2; --w) {
                cnt[w] += cnt[w - r2];
            }
        }
        const long lo = std::min(w2_plus, w2_minus);
        const long hi = std::max(w2_plus, w2_minus);
        std::uint64_t le = 0, ge = 0;
        for (long w = 0; w <= lo; ++w) le += cnt[w];
        for (long w = hi; w <= total2; ++w) ge += cnt[w];
        const double p = (static_cast<double>(le) + static_cast<double>(ge)) /
                         std::ldexp(1.0, n);
        return std::clamp(p, 0.0, 1.0);
    }

    // Tie-corrected normal approximation with continuity correction.
    const double nn = static_cast<double>(n);
    const double mu = nn * (nn + 1.0) / 4.0;
    double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (long t : tie_sizes) {
        var -= static_cast<double>(t) * (t * t - 1) / 48.0;
    }
    const double w = 0.5 * static_cast<double>(std::min(w2_plus, w2_minus));
    const double z = (w + 0.5 - mu) / std::sqrt(var);
    return std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
}

}  // namespace fmfusion::eval
