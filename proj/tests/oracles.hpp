// Independent reference implementations used only by tests. These stay
// deliberately naive so they cannot share a failure mode with the library
// code they check.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracles {

/// Plain triple-loop temporal cross-correlation with zero padding, one
/// sample. kernels[o][k][c] layout via flat vector.
inline Eigen::MatrixXd naive_conv1d(const Eigen::MatrixXd& input,
                                    const std::vector<double>& kernels, int out_ch,
                                    int kernel_len, const Eigen::VectorXd& bias) {
    const int frames = static_cast<int>(input.rows());
    const int in_ch = static_cast<int>(input.cols());
    const int pad = (kernel_len - 1) / 2;
    Eigen::MatrixXd out(frames, out_ch);
    for (int f = 0; f < frames; ++f) {
        for (int o = 0; o < out_ch; ++o) {
            double acc = bias[o];
            for (int k = 0; k < kernel_len; ++k) {
                const int src = f + k - pad;
                if (src < 0 || src >= frames) continue;
                for (int c = 0; c < in_ch; ++c) {
                    acc += input(src, c) * kernels[(o * kernel_len + k) * in_ch + c];
                }
            }
            out(f, o) = acc;
        }
    }
    return out;
}

/// Literal enumeration of all 2^n sign assignments for the two-sided
/// signed-rank test. Zero differences dropped, average ranks for ties.
inline double wilcoxon_exact_bruteforce(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    }
    const int n = static_cast<int>(d.size());
    if (n == 0) return 1.0;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return std::abs(d[x]) < std::abs(d[y]); });
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
        const double avg = 0.5 * (i + j + 1);  // ranks are 1-based
        for (int k = i; k < j; ++k) rank[order[k]] = avg;
        i = j;
    }

    double w_obs = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) {
        total += rank[k];
        if (d[k] > 0.0) w_obs += rank[k];
    }
    const double lo = std::min(w_obs, total - w_obs);
    const double hi = std::max(w_obs, total - w_obs);

    std::uint64_t le = 0, ge = 0;
    const std::uint64_t lim = 1ULL << n;
    for (std::uint64_t mask = 0; mask < lim; ++mask) {
        double w = 0.0;
        for (int k = 0; k < n; ++k) {
            if (mask & (1ULL << k)) w += rank[k];
        }
        if (w <= lo + 1e-12) ++le;
        if (w >= hi - 1e-12) ++ge;
    }
    const double p = static_cast<double>(le + ge) / static_cast<double>(lim);
    return std::min(p, 1.0);
}

/// Student-t upper quantile by Simpson quadrature of the density plus
/// bisection; good to ~1e-9 for the small dfs used in tests.
inline double t_quantile_oracle(int df, double prob) {
    const double nu = df;
    const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                            0.5 * std::log(nu * M_PI);
    const auto pdf = [&](double x) {
        return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
    };
    const auto cdf = [&](double x) {
        // Simpson on [0, |x|], symmetry for the rest.
        const double upper = std::abs(x);
        const int steps = 4000;
        const double h = upper / steps;
        double acc = pdf(0.0) + pdf(upper);
        for (int i = 1; i < steps; ++i) acc += pdf(i * h) * (i % 2 ? 4.0 : 2.0);
        const double half = acc * h / 3.0;
        return x >= 0.0 ? 0.5 + half : 0.5 - half;
    };
    double lo = 0.0, hi = 200.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracles
