#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kirchhoff/dopri5.hpp"
#include "kirchhoff/quadrature.hpp"

using namespace kirchhoff;

TEST_CASE("harmonic oscillator with dense output") {
    auto rhs = [](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(y(1), -y(0)); };
    std::vector<ode::DenseStep<double, 2>> steps;
    auto keep = [&](const ode::DenseStep<double, 2>& s) {
        steps.push_back(s);
        return true;
    };
    ode::Dopri5Options<double> opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const auto stats = ode::integrate_dopri5(rhs, 0.0, Eigen::Vector2d(0, 1), 20.0, keep, opt);
    REQUIRE(!steps.empty());
    CHECK(stats.accepted == static_cast<long>(steps.size()));
    CHECK(steps.back().r1() == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(std::abs(steps.back().end()(0) - std::sin(20.0)) < 1e-9);

    double worst = 0;
    for (const auto& s : steps) {
        const double r = s.r0 + 0.37 * s.h;
        worst = std::max(worst, std::abs(s.at(r)(0) - std::sin(r)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("tightening the tolerance shrinks the error") {
    auto rhs = [](double r, const Eigen::Matrix<double, 1, 1>& y) {
        return Eigen::Matrix<double, 1, 1>(-2 * r * y(0));
    };
    double last_err = 1;
    for (double tol : {1e-6, 1e-9, 1e-12}) {
        Eigen::Matrix<double, 1, 1> y_end;
        ode::Dopri5Options<double> opt;
        opt.rtol = tol;
        opt.atol = tol * 1e-2;
        ode::integrate_dopri5(rhs, 0.0, Eigen::Matrix<double, 1, 1>(1.0), 2.0,
                              [&](const ode::DenseStep<double, 1>& s) {
                                  y_end = s.end();
                                  return true;
                              },
                              opt);
        const double err = std::abs(y_end(0) - std::exp(-4.0));
        CHECK(err < last_err);
        last_err = err;
    }
    CHECK(last_err < 1e-12);
}

TEST_CASE("observer can stop the integration") {
    auto rhs = [](double, const Eigen::Vector2d& y) { return Eigen::Vector2d(y(1), -y(0)); };
    double stopped_at = 0;
    ode::integrate_dopri5(rhs, 0.0, Eigen::Vector2d(1, 0), 100.0, [&](const ode::DenseStep<double, 2>& s) {
        stopped_at = s.r1();
        return s.end()(0) > 0;
    });
    CHECK(stopped_at > std::numbers::pi / 2);
    CHECK(stopped_at < 5);
}

TEST_CASE("finite-time blowup throws") {
    // y' = y^2, y(0) = 1 blows up at r = 1
    auto rhs = [](double, const Eigen::Matrix<double, 1, 1>& y) {
        return Eigen::Matrix<double, 1, 1>(y(0) * y(0));
    };
    try {
        ode::integrate_dopri5(rhs, 0.0, Eigen::Matrix<double, 1, 1>(1.0), 2.0,
                              [](const ode::DenseStep<double, 1>&) { return true; });
        FAIL("expected IntegrationBlowup");
    } catch (const IntegrationBlowup& e) {
        CHECK(e.code() == ErrorCode::IntegrationBlowup);
        CHECK(e.last_valid_radius() <= 1.0);
        CHECK(e.last_valid_radius() > 0.9);
    }
}

TEST_CASE("simpson is exact on cubics") {
    const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(11, 0, 2);
    const Eigen::ArrayXd f = x.cube() - 3 * x + 1;
    CHECK(simpson(f, 0.2) == doctest::Approx(4.0 - 6.0 + 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(simpson(Eigen::ArrayXd::Ones(4), 0.1), Error);
}

TEST_CASE("unit sphere areas") {
    CHECK(unit_sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
    CHECK(unit_sphere_area(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
    CHECK(unit_sphere_area(5) == doctest::Approx(8 * std::numbers::pi * std::numbers::pi / 3));
}

TEST_CASE("scaled exponential integral") {
    // e E1(1) and 10 e^10 E1(10) to 15 digits
    CHECK(scaled_exp_integral_e1(1.0) == doctest::Approx(0.596347362323194).epsilon(1e-14));
    CHECK(scaled_exp_integral_e1(10.0) == doctest::Approx(0.0915633339397881).epsilon(1e-14));
    // both branches agree around the switch
    CHECK(scaled_exp_integral_e1(50.0) == doctest::Approx(scaled_exp_integral_e1(50.0 + 1e-9)).epsilon(1e-10));
    // asymptotic series well past the switch
    for (double x : {200.0, 600.0, 1e4}) {
        const double series = (1 - 1 / x + 2 / (x * x) - 6 / (x * x * x) + 24 / (x * x * x * x)) / x;
        CHECK(scaled_exp_integral_e1(x) == doctest::Approx(series).epsilon(1e-10));
    }
}
