#include <doctest.h>

#include "fmfusion/rng.hpp"
#include "fmfusion/signal.hpp"

using namespace fmfusion;

TEST_CASE("moving_average5 preserves constants and ramps at every frame") {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(40, 3.25);
    CHECK((moving_average5(c) - c).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd ramp(40);
    for (int i = 0; i < 40; ++i) ramp[i] = 0.5 * i - 2.0;
    CHECK((moving_average5(ramp) - ramp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("moving_average5 interior value") {
    Eigen::VectorXd x(7);
    x << 1, 2, 3, 10, 3, 2, 1;
    const Eigen::VectorXd y = moving_average5(x);
    CHECK(y[3] == doctest::Approx((2 + 3 + 10 + 3 + 2) / 5.0));
    CHECK(y[0] == doctest::Approx(1.0));            // width-1 window at the edge
    CHECK(y[1] == doctest::Approx((1 + 2 + 3) / 3.0));  // width-3 window
}

TEST_CASE("medoid filter removes an isolated spike exactly") {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(30, 2.0);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(30, -1.0);
    x[10] += 100.0;
    y[10] += 40.0;
    medoid_filter5(x, y);
    CHECK((x.array() == 2.0).all());
    CHECK((y.array() == -1.0).all());
}

TEST_CASE("medoid filter preserves constants and straight ramps") {
    Eigen::VectorXd x(25), y(25);
    for (int i = 0; i < 25; ++i) {
        x[i] = 0.3 * i;
        y[i] = -0.7 * i + 4.0;
    }
    Eigen::VectorXd fx = x, fy = y;
    medoid_filter5(fx, fy);
    CHECK((fx - x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((fy - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("medoid filter is equivariant under similarity transforms") {
    Rng rng(77);
    Eigen::VectorXd x(50), y(50);
    for (int i = 0; i < 50; ++i) {
        x[i] = rng.normal(0.0, 3.0);
        y[i] = rng.normal(1.0, 3.0);
    }
    const double theta = 1.234, c = std::cos(theta), s = std::sin(theta), scale = 1.7;
    Eigen::VectorXd xt(50), yt(50);
    for (int i = 0; i < 50; ++i) {
        xt[i] = scale * (c * x[i] - s * y[i]) + 10.0;
        yt[i] = scale * (s * x[i] + c * y[i]) - 4.0;
    }
    medoid_filter5(x, y);
    medoid_filter5(xt, yt);
    for (int i = 0; i < 50; ++i) {
        CHECK(xt[i] == doctest::Approx(scale * (c * x[i] - s * y[i]) + 10.0).epsilon(1e-12));
        CHECK(yt[i] == doctest::Approx(scale * (s * x[i] + c * y[i]) - 4.0).epsilon(1e-12));
    }
}

TEST_CASE("finite_difference of a linear ramp recovers the slope everywhere") {
    Eigen::MatrixXd m(20, 2);
    for (int i = 0; i < 20; ++i) {
        m(i, 0) = 3.0 * i;
        m(i, 1) = -1.5 * i + 2.0;
    }
    const Eigen::MatrixXd d = finite_difference(m, 0.5);
    CHECK((d.col(0).array() - 6.0).abs().maxCoeff() < 1e-12);
    CHECK((d.col(1).array() + 3.0).abs().maxCoeff() < 1e-12);
}
