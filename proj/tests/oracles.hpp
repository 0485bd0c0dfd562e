// Independent reference computations used only by the test suites.
//
// Nothing in here includes the library headers: every routine is a
// deliberately simple, slow re-derivation (fixed-step RK4, plain bisection,
// grid minimization) so that it can be used to cross-check the adaptive
// implementation paths.
#pragma once

#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

struct PowerLaw {
    double m;
    double p;
    double g(double s) const { return -m * s + std::pow(std::abs(s), p - 1.0) * s; }
};

enum class Outcome { Crosses, Turns, Undecided };

/// Fixed-step RK4 on v'' + (N-1)/r v' + g(v) = 0 from a quadratic series start
/// at r = h. Stops at the first zero crossing or the first point where v' >= 0.
inline Outcome rk4_shoot(const PowerLaw& f, int N, double xi, double h, double r_max) {
    double r = h;
    double v = xi - f.g(xi) * h * h / (2.0 * N);
    double w = -f.g(xi) * h / N;
    auto rhs = [&](double rr, double vv, double ww) {
        return std::pair<double, double>{ww, -(N - 1) / rr * ww - f.g(vv)};
    };
    while (r < r_max) {
        auto [k1v, k1w] = rhs(r, v, w);
        auto [k2v, k2w] = rhs(r + h / 2, v + h / 2 * k1v, w + h / 2 * k1w);
        auto [k3v, k3w] = rhs(r + h / 2, v + h / 2 * k2v, w + h / 2 * k2w);
        auto [k4v, k4w] = rhs(r + h, v + h * k3v, w + h * k3w);
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
        r += h;
        if (v < 0.0) return Outcome::Crosses;
        if (w >= 0.0) return Outcome::Turns;
    }
    return Outcome::Undecided;
}

/// Ground-state shooting value by bisection on the RK4 outcome.
inline double ground_state_xi(const PowerLaw& f, int N, double rel_tol = 1e-10, double h = 1e-4,
                              double r_max = 40.0) {
    double lo = std::pow((f.p + 1.0) * f.m / 2.0, 1.0 / (f.p - 1.0));
    double hi = 2.0 * lo;
    while (rk4_shoot(f, N, hi, h, r_max) != Outcome::Crosses) hi *= 2.0;
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (rk4_shoot(f, N, mid, h, r_max) == Outcome::Crosses ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Bisection for a root of F on [lo, hi] with a sign change.
inline double bisect(const std::function<double(double)>& F, double lo, double hi, int iters = 200) {
    double flo = F(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = F(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// min over t > 0 of F by a log-spaced grid scan followed by repeated zooming.
inline std::pair<double, double> grid_minimize(const std::function<double(double)>& F, double t_lo,
                                               double t_hi, int points = 2001, int zooms = 40) {
    double best_t = t_lo, best_f = F(t_lo);
    double a = std::log(t_lo), b = std::log(t_hi);
    for (int z = 0; z < zooms; ++z) {
        const double step = (b - a) / (points - 1);
        for (int i = 0; i < points; ++i) {
            const double t = std::exp(a + i * step);
            const double val = F(t);
            if (val < best_f) {
                best_f = val;
                best_t = t;
            }
        }
        a = std::log(best_t) - 2 * step;
        b = std::log(best_t) + 2 * step;
    }
    return {best_t, best_f};
}

/// a_max(N, bK) located as the a for which min_t (a t^2 + bK t^{4-N}) = 1.
/// min f is increasing in a, so bisect on a using the grid minimizer.
inline double grid_threshold(int N, double bK) {
    auto min_f = [&](double a) {
        auto F = [&](double t) { return a * t * t + bK * std::pow(t, 4.0 - N); };
        return grid_minimize(F, 1e-6, 1e6, 401, 30).second;
    };
    double lo = 1e-30, hi = 1.0;
    while (min_f(hi) < 1.0) hi *= 2.0;
    while (min_f(lo) > 1.0) lo /= 1e3;
    // bisect in log space
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (mid == lo || mid == hi) break;
        (min_f(mid) > 1.0 ? hi : lo) = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace oracle
