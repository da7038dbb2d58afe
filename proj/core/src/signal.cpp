#include "fmfusion/signal.hpp"

#include <algorithm>
#include <cmath>

namespace fmfusion {

Eigen::VectorXd moving_average5(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index w = std::min<Eigen::Index>({2, i, n - 1 - i});
        out[i] = x.segment(i - w, 2 * w + 1).mean();
    }
    return out;
}

Eigen::MatrixXd moving_average5_columns(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out.col(c) = moving_average5(m.col(c));
    }
    return out;
}

void medoid_filter5(Eigen::Ref<Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> y) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd fx(n), fy(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index w = std::min<Eigen::Index>({2, i, n - 1 - i});
        Eigen::Index best = i - w;
        double best_cost = std::numeric_limits<double>::infinity();
        for (Eigen::Index a = i - w; a <= i + w; ++a) {
            double cost = 0.0;
            for (Eigen::Index b = i - w; b <= i + w; ++b) {
                cost += std::hypot(x[a] - x[b], y[a] - y[b]);
            }
            if (cost < best_cost) {
                best_cost = cost;
                best = a;
            }
        }
        fx[i] = x[best];
        fy[i] = y[best];
    }
    x = fx;
    y = fy;
}

Eigen::MatrixXd finite_difference(const Eigen::MatrixXd& series, double dt) {
    const Eigen::Index n = series.rows();
    Eigen::MatrixXd out(n, series.cols());
    if (n == 1) {
        out.setZero();
        return out;
    }
    out.row(0) = (series.row(1) - series.row(0)) / dt;
    out.row(n - 1) = (series.row(n - 1) - series.row(n - 2)) / dt;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        out.row(i) = (series.row(i + 1) - series.row(i - 1)) / (2.0 * dt);
    }
    return out;
}

}  // namespace fmfusion
