#include <doctest.h>

#include <cmath>
#include <random>

#include "kirchhoff/scaling_map.hpp"
#include "oracles.hpp"

using namespace kirchhoff;

namespace {

double residual(const KirchhoffProblem<double>& pb, double K, double t) {
    return std::abs(scaling_function(pb, K, t) - 1);
}

}  // namespace

TEST_CASE("N = 3 quadratic root") {
    const KirchhoffProblem<double> pb{3, 1, 1};
    const auto r = solve_scaling(pb, 1.0);
    CHECK(r.regime == Regime::UniqueN3);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0] == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
    CHECK(residual(pb, 1.0, r.roots[0]) < 1e-10);
}

TEST_CASE("N = 3 closed form agrees with bisection") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 200; ++i) {
        const KirchhoffProblem<double> pb{3, std::pow(10.0, u(rng) / 2), std::pow(10.0, u(rng))};
        const double K = std::pow(10.0, u(rng) / 2);
        const double t = solve_scaling(pb, K).roots.at(0);
        const double ref = oracle::bisect([&](double s) { return pb.a * s * s + pb.b * K * s - 1; }, 0.0, 1e12);
        CHECK(std::abs(t - ref) / ref < 1e-12);
        CHECK(residual(pb, K, t) < 1e-10);
    }
}

TEST_CASE("N = 4 closed form and the threshold bK = 1") {
    const KirchhoffProblem<double> pb{4, 1, 0.5};
    const auto r = solve_scaling(pb, 1.0);
    CHECK(r.regime == Regime::UniqueN4);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0] == std::sqrt((1 - 0.5) / 1.0));
    CHECK(residual(pb, 1.0, r.roots[0]) < 1e-10);

    const auto none = solve_scaling(KirchhoffProblem<double>{4, 1, 2}, 1.0);
    CHECK(none.regime == Regime::NoneN4);
    CHECK(none.roots.empty());
    CHECK(solve_scaling(KirchhoffProblem<double>{4, 3, 1}, 1.0).regime == Regime::NoneN4);
}

TEST_CASE("N = 5 double root at a_max") {
    const KirchhoffProblem<double> pb{5, 1.0 / 27, 1};
    const auto r = solve_scaling(pb, 2.0);
    CHECK(r.regime == Regime::DoubleRoot);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(residual(pb, 2.0, r.roots[0]) < 1e-10);
    REQUIRE(r.t_star);
    CHECK(*r.t_star == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("N = 5 two roots straddle t_star") {
    const KirchhoffProblem<double> pb{5, 0.02, 1};
    const auto r = solve_scaling(pb, 2.0);
    CHECK(r.regime == Regime::TwoRoots);
    REQUIRE(r.roots.size() == 2);
    REQUIRE(r.t_star);
    // bisection oracle on f(t) = 0.02 t^2 + 2/t
    auto f = [](double t) { return 0.02 * t * t + 2 / t - 1; };
    CHECK(*r.t_star == doctest::Approx(3.68403149864039).epsilon(1e-12));
    CHECK(r.roots[0] == doctest::Approx(oracle::bisect(f, 1.0, *r.t_star)).epsilon(1e-13));
    CHECK(r.roots[1] == doctest::Approx(oracle::bisect(f, *r.t_star, 100.0)).epsilon(1e-13));
    CHECK(r.roots[0] == doctest::Approx(2.21832646069834).epsilon(1e-12));
    CHECK(r.roots[1] == doctest::Approx(5.69592830359247).epsilon(1e-12));
    CHECK(r.roots[0] < *r.t_star);
    CHECK(*r.t_star < r.roots[1]);
    for (double t : r.roots) CHECK(residual(pb, 2.0, t) < 1e-10);
}

TEST_CASE("N = 5 no root above a_max") {
    const auto r = solve_scaling(KirchhoffProblem<double>{5, 0.04, 1}, 2.0);
    CHECK(r.regime == Regime::NoRoot);
    CHECK(r.roots.empty());
    REQUIRE(r.f_min);
    CHECK(*r.f_min > 1);
}

TEST_CASE("threshold values") {
    CHECK(threshold_a_max(5, 1.0, 2.0) == doctest::Approx(1.0 / 27).epsilon(1e-14));
    CHECK(threshold_a_max(6, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(threshold_a_max(5, 2.0, 2.0) == doctest::Approx(1.0 / 108).epsilon(1e-14));
    CHECK_THROWS_AS(threshold_a_max(4, 1.0, 1.0), Error);
}

TEST_CASE("threshold against grid minimization") {
    // grid_threshold values frozen from the oracle, rows N = 5..8, columns bK = 0.1, 1, 2, 10
    const double frozen[4][4] = {
        {14.8148148148148, 0.148148148148148, 0.0370370370370371, 0.00148148148148148},
        {2.5, 0.25, 0.125, 0.025},
        {1.51190525987385, 0.325730113991389, 0.205197113601204, 0.0701764257171088},
        {1.21716123890037, 0.384900179459751, 0.272165526975909, 0.121716123890037},
    };
    const double bKs[4] = {0.1, 1, 2, 10};
    for (int N = 5; N <= 8; ++N) {
        for (int j = 0; j < 4; ++j) {
            CAPTURE(N);
            CAPTURE(bKs[j]);
            const double a_max = threshold_a_max(N, bKs[j], 1.0);
            CHECK(std::abs(a_max - frozen[N - 5][j]) / a_max < 1e-8);
        }
    }
    // one live oracle call per dimension
    for (int N = 5; N <= 8; ++N) {
        const double live = oracle::grid_threshold(N, 2.0);
        CHECK(std::abs(threshold_a_max(N, 1.0, 2.0) - live) / live < 1e-8);
    }
}

TEST_CASE("regime trichotomy on random samples") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(5, 8);
    std::uniform_real_distribution<double> u(-3, 3);
    std::uniform_real_distribution<double> ratio(0.2, 2.0);
    const double eps = ScalingTolerances<double>{}.eps_eq;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 1000; ++i) {
        const int N = dim(rng);
        const double b = std::pow(10.0, u(rng));
        const double K = std::pow(10.0, u(rng));
        const double a_max = threshold_a_max(N, b, K);
        // a third of the samples sit right on the threshold
        const double a = i % 3 == 0 ? a_max * (1 + eps * (ratio(rng) - 1.1) / 2) : a_max * ratio(rng);
        const auto r = solve_scaling(KirchhoffProblem<double>{N, a, b}, K);
        CAPTURE(N);
        CAPTURE(a / a_max);
        if (a > a_max * (1 + eps)) {
            CHECK(r.regime == Regime::NoRoot);
            ++counts[0];
        } else if (std::abs(a - a_max) <= eps * a_max) {
            CHECK(r.regime == Regime::DoubleRoot);
            ++counts[1];
        } else {
            CHECK(r.regime == Regime::TwoRoots);
            ++counts[2];
            for (double t : r.roots) CHECK(residual({N, a, b}, K, t) < 1e-10);
        }
    }
    CHECK(counts[0] > 100);
    CHECK(counts[1] > 100);
    CHECK(counts[2] > 100);
}

TEST_CASE("stable evaluation for large N and extreme t") {
    const KirchhoffProblem<double> pb{8, 1e-6, 1e-4};
    const auto r = solve_scaling(pb, 50.0);
    REQUIRE(r.regime == Regime::TwoRoots);
    for (double t : r.roots) CHECK(residual(pb, 50.0, t) < 1e-10);
    CHECK(std::isfinite(scaling_function(pb, 50.0, 1e-60)));
}

TEST_CASE("roots decrease as K grows") {
    for (int N : {3, 4}) {
        const KirchhoffProblem<double> pb{N, 1, 0.01};
        double last = INFINITY;
        for (double K : {1.0, 5.0, 20.0, 60.0, 99.0}) {
            const double t = solve_scaling(pb, K).roots.at(0);
            CHECK(t < last);
            last = t;
        }
    }
}

TEST_CASE("existence reports") {
    CHECK(existence_report(KirchhoffProblem<double>{3, 5, 100}, 1e3).exists);
    const auto n4 = existence_report(KirchhoffProblem<double>{4, 1, 0.5}, 1.0);
    CHECK(n4.exists);
    CHECK(n4.branches == 1);
    const double a_max = threshold_a_max(5, 1.0, 2.0);
    const auto n5 = existence_report(KirchhoffProblem<double>{5, 2 * a_max, 1}, 2.0);
    CHECK_FALSE(n5.exists);
    REQUIRE(n5.margin);
    CHECK(*n5.margin < 0);
}

TEST_CASE("solution comparison") {
    const auto c3 = compare_solutions(KirchhoffProblem<double>{3, 1, 1}, 1.0, 2.0);
    CHECK(c3.t2 < c3.t1);
    CHECK(c3.I1 < c3.I2);
    CHECK(c3.holds());

    const auto c4 = compare_solutions(KirchhoffProblem<double>{4, 1, 0.25}, 1.0, 2.0);
    CHECK(c4.t1 == doctest::Approx(std::sqrt(0.75)));
    CHECK(c4.t2 == doctest::Approx(std::sqrt(0.5)));
    CHECK(c4.I1 == doctest::Approx(0.25 / 0.75));
    CHECK(c4.I2 == doctest::Approx(0.25 * 2 / 0.5));
    CHECK(c4.holds());

    try {
        compare_solutions(KirchhoffProblem<double>{4, 1, 0.6}, 1.0, 2.0);
        FAIL("expected HypothesisError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HypothesisError);
    }
    CHECK_THROWS_AS(compare_solutions(KirchhoffProblem<double>{3, 1, 1}, 2.0, 1.0), Error);
    CHECK_THROWS_AS(compare_solutions(KirchhoffProblem<double>{5, 1, 1}, 1.0, 2.0), Error);
}

TEST_CASE("closed-form actions") {
    const KirchhoffProblem<double> p3{3, 1, 1};
    const double t3 = (std::sqrt(5.0) - 1) / 2;
    // both printed forms evaluated by hand
    const double Ku = 1 / t3;
    CHECK(action_closed_form(1.0, t3, p3) == doctest::Approx(Ku / 3 + Ku * Ku / 12).epsilon(1e-14));
    CHECK(std::abs(action_closed_form(1.0, t3, p3) - 0.7575141) < 1e-6);
    CHECK(action_reduced(Ku, p3) == doctest::Approx(action_closed_form(1.0, t3, p3)).epsilon(1e-12));

    CHECK(action_closed_form(1.0, std::sqrt(0.5), KirchhoffProblem<double>{4, 1, 0.5}) ==
          doctest::Approx(0.5).epsilon(1e-14));
    const double i5 = action_closed_form(2.0, 3.0, KirchhoffProblem<double>{5, 1.0 / 27, 1});
    CHECK(std::abs(i5 - (2.0 / 2916 - 1.0 / 2430)) < 1e-12 * std::abs(i5) + 1e-18);
    CHECK(i5 == doctest::Approx(1.0 / 3645).epsilon(1e-12));
}

TEST_CASE("invalid problems") {
    CHECK_THROWS_AS(solve_scaling(KirchhoffProblem<double>{3, 0, 1}, 1.0), Error);
    CHECK_THROWS_AS(solve_scaling(KirchhoffProblem<double>{3, 1, -1}, 1.0), Error);
    CHECK_THROWS_AS(solve_scaling(KirchhoffProblem<double>{3, 1, 1}, 0.0), Error);
    CHECK_THROWS_AS(solve_scaling(KirchhoffProblem<double>{5, 1, 0}, 1.0), Error);
}

TEST_CASE("long double instantiation") {
    const KirchhoffProblem<long double> pb{5, 0.02L, 1};
    const auto r = solve_scaling(pb, 2.0L);
    REQUIRE(r.roots.size() == 2);
    for (long double t : r.roots) CHECK(std::abs(static_cast<double>(scaling_function(pb, 2.0L, t) - 1)) < 1e-14);
}
