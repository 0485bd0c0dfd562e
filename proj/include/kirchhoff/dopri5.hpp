#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "kirchhoff/errors.hpp"

namespace kirchhoff::ode {

/// One accepted Dormand-Prince step together with its continuous extension
/// (Hairer's order-4 dense output), so the trajectory can be evaluated anywhere
/// inside [r0, r0 + h] without re-integrating.
template <typename Scalar, int Dim>
struct DenseStep {
    using State = Eigen::Matrix<Scalar, Dim, 1>;

    Scalar r0 = 0;
    Scalar h = 0;
    State c1, c2, c3, c4, c5;

    Scalar r1() const { return r0 + h; }
    const State& start() const { return c1; }
    State end() const { return c1 + c2; }

    State at(Scalar r) const {
        const Scalar theta = (r - r0) / h;
        const Scalar theta1 = 1 - theta;
        return c1 + theta * (c2 + theta1 * (c3 + theta * (c4 + theta1 * c5)));
    }
};

template <typename Scalar>
struct Dopri5Options {
    Scalar rtol = 1e-12;
    Scalar atol = 1e-14;
    Scalar h_init = 1e-4;
    Scalar h_max = std::numeric_limits<Scalar>::infinity();
    Scalar h_min = 1e-14;
    long max_steps = 2'000'000;
};

struct Dopri5Stats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
};

namespace detail {
// Butcher tableau of the 5(4) pair and the dense output weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(r, y) from r0 towards r_end.
///
/// observer(const DenseStep&) is called after every accepted step and returns
/// false to stop early. Throws IntegrationBlowup when the step size collapses
/// because the state or error estimate is no longer finite.
template <typename Scalar, int Dim, class Rhs, class Observer>
Dopri5Stats integrate_dopri5(Rhs&& rhs, Scalar r0, const Eigen::Matrix<Scalar, Dim, 1>& y0, Scalar r_end,
                             Observer&& observer, const Dopri5Options<Scalar>& opt = {}) {
    using namespace detail;
    using State = Eigen::Matrix<Scalar, Dim, 1>;
    using std::abs, std::max, std::min, std::pow, std::sqrt;

    const auto S = [](double x) { return Scalar(x); };
    Dopri5Stats stats;
    Scalar r = r0;
    State y = y0;
    State k1 = rhs(r, y);
    ++stats.evaluations;
    Scalar h = min(opt.h_init, opt.h_max);
    Scalar err_old = 1e-4;

    while (r < r_end) {
        if (stats.accepted + stats.rejected >= opt.max_steps) break;
        bool last = false;
        if (r + h >= r_end) {
            h = r_end - r;
            last = true;
        }

        const State k2 = rhs(r + S(c2) * h, (y + h * S(a21) * k1).eval());
        const State k3 = rhs(r + S(c3) * h, (y + h * (S(a31) * k1 + S(a32) * k2)).eval());
        const State k4 = rhs(r + S(c4) * h, (y + h * (S(a41) * k1 + S(a42) * k2 + S(a43) * k3)).eval());
        const State k5 = rhs(r + S(c5) * h, (y + h * (S(a51) * k1 + S(a52) * k2 + S(a53) * k3 + S(a54) * k4)).eval());
        const State y6 = y + h * (S(a61) * k1 + S(a62) * k2 + S(a63) * k3 + S(a64) * k4 + S(a65) * k5);
        const State k6 = rhs(r + h, y6);
        const State y1 = y + h * (S(a71) * k1 + S(a73) * k3 + S(a74) * k4 + S(a75) * k5 + S(a76) * k6);
        const State k7 = rhs(r + h, y1);
        stats.evaluations += 6;

        const State e = h * (S(e1) * k1 + S(e3) * k3 + S(e4) * k4 + S(e5) * k5 + S(e6) * k6 + S(e7) * k7);
        const State scale = (opt.atol + opt.rtol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        const Scalar err = sqrt((e.array() / scale.array()).square().mean());

        if (!std::isfinite(static_cast<double>(err)) || !y1.allFinite()) {
            ++stats.rejected;
            h *= Scalar(0.2);
            if (h < opt.h_min) {
                throw IntegrationBlowup(static_cast<double>(r),
                                        "non-finite state after r = " + std::to_string(static_cast<double>(r)));
            }
            continue;
        }

        if (err <= 1) {
            // Lund stabilized PI controller, as in Hairer's DOPRI5
            Scalar fac = pow(err, S(0.2 - 0.04 * 0.75)) * pow(err_old, S(-0.04));
            fac = max(Scalar(1) / 10, min(Scalar(5), fac / Scalar(0.9)));
            err_old = max(err, Scalar(1e-4));

            DenseStep<Scalar, Dim> step;
            step.r0 = r;
            step.h = h;
            step.c1 = y;
            step.c2 = y1 - y;
            step.c3 = h * k1 - step.c2;
            step.c4 = step.c2 - h * k7 - step.c3;
            step.c5 = h * (S(d1) * k1 + S(d3) * k3 + S(d4) * k4 + S(d5) * k5 + S(d6) * k6 + S(d7) * k7);

            ++stats.accepted;
            r = last ? r_end : r + h;
            y = y1;
            k1 = k7;
            if (!observer(step)) break;
            h = min(h / fac, opt.h_max);
        } else {
            ++stats.rejected;
            h /= min(Scalar(5), pow(err, S(0.2 - 0.04 * 0.75)) / S(0.9));
            if (h < opt.h_min) {
                throw IntegrationBlowup(static_cast<double>(r),
                                        "step size underflow at r = " + std::to_string(static_cast<double>(r)));
            }
        }
    }
    return stats;
}

}  // namespace kirchhoff::ode
