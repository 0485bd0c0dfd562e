#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kirchhoff/dopri5.hpp"
#include "kirchhoff/errors.hpp"
#include "kirchhoff/nonlinearity.hpp"
#include "kirchhoff/quadrature.hpp"

namespace kirchhoff {

/// How a single shot from v(0) = xi terminated.
enum class ShotOutcome {
    CrossesZero,   // more sign changes than allowed
    Undershoot,    // |v| turned back up before reaching zero
    Decays,        // |v| and |v'| fell below the decay threshold while heading to zero
    Inconclusive,  // reached r_max without any of the above
};

constexpr const char* to_string(ShotOutcome outcome) {
    switch (outcome) {
        case ShotOutcome::CrossesZero: return "CROSSES_ZERO";
        case ShotOutcome::Undershoot: return "UNDERSHOOT";
        case ShotOutcome::Decays: return "DECAYS";
        case ShotOutcome::Inconclusive: return "INCONCLUSIVE";
    }
    return "UNKNOWN";
}

template <typename Scalar>
struct ShootingOptions {
    Scalar tol = 1e-12;             // integrator local error, relative
    Scalar r_series = 1e-3;         // upper bound on the Taylor-start radius
    Scalar r_max = 0;               // <= 0 selects 50 / sqrt(m)
    Scalar decay_threshold = 1e-8;  // relative to xi
    int grid_intervals = 4096;      // uniform resampling, must be even
    Scalar xi_search_limit = 1e6;   // overshoot search gives up beyond this multiple of zeta0
    int max_bisections = 400;

    Scalar effective_r_max(Scalar m) const {
        using std::sqrt;
        return r_max > 0 ? r_max : Scalar(50) / sqrt(m);
    }
};

/// Trajectory of the radial IVP: a Taylor polynomial on [0, r_start] followed
/// by the dense output of the adaptive integrator.
template <typename Scalar>
struct RadialTrajectory {
    using State = Eigen::Matrix<Scalar, 2, 1>;

    Scalar xi = 0;
    // v(r) = xi + c2 r^2 + c4 r^4 on [0, r_start]
    Scalar c2 = 0;
    Scalar c4 = 0;
    Scalar r_start = 0;
    std::vector<ode::DenseStep<Scalar, 2>> steps;

    Scalar r_end() const { return steps.empty() ? r_start : steps.back().r1(); }

    State series(Scalar r) const {
        const Scalar r2 = r * r;
        return State(xi + c2 * r2 + c4 * r2 * r2, 2 * c2 * r + 4 * c4 * r2 * r);
    }

    /// Evaluates (v, v') at r in [0, r_end()].
    State at(Scalar r) const {
        if (r <= r_start || steps.empty()) return series(r);
        auto it = std::lower_bound(steps.begin(), steps.end(), r,
                                   [](const auto& s, Scalar x) { return s.r1() < x; });
        if (it == steps.end()) --it;
        return it->at(r);
    }
};

template <typename Scalar>
struct Shot {
    Scalar xi = 0;
    ShotOutcome outcome = ShotOutcome::Inconclusive;
    int crossings = 0;
    Scalar r_event = 0;  // crossing, turning, decay or stopping radius
    RadialTrajectory<Scalar> trajectory;
    ode::Dopri5Stats stats;
};

namespace detail {

template <typename Scalar, class F>
Scalar bisect_on_step(F&& f, Scalar lo, Scalar hi) {
    Scalar flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        const Scalar fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2;
}

}  // namespace detail

/// Integrates v'' + (N-1)/r v' + g(v) = 0, v(0) = xi, v'(0) = 0.
///
/// The shot stops at the (max_crossings + 1)-th sign change, at the first
/// turning point of |v| that is not a sign change, when the decay threshold is
/// met (only if stop_on_decay), or at r_max.
template <Nonlinearity Model>
Shot<typename Model::Scalar> shoot(const Model& model, int N, typename Model::Scalar xi,
                                    const ShootingOptions<typename Model::Scalar>& opt, int max_crossings = 0,
                                    bool stop_on_decay = true, bool keep_trajectory = true) {
    using Scalar = typename Model::Scalar;
    using State = Eigen::Matrix<Scalar, 2, 1>;
    using std::abs, std::min, std::sqrt;

    Shot<Scalar> shot;
    shot.xi = xi;
    auto& traj = shot.trajectory;
    traj.xi = xi;

    const Scalar g0 = model.g(xi);
    traj.c2 = -g0 / (2 * N);
    traj.c4 = g0 * model.dg(xi) / (8 * N * (N + 2));
    // keep the quadratic term a small fraction of xi so the series stays accurate
    traj.r_start = opt.r_series;
    if (g0 != 0) traj.r_start = min(opt.r_series, Scalar(1e-2) * sqrt(2 * N * abs(xi / g0)));

    const Scalar r_max = opt.effective_r_max(model.decay_rate());
    const Scalar threshold = opt.decay_threshold * abs(xi);

    if (!(g0 > 0)) {
        // starts at or inside the region where |v| increases away from the axis
        shot.outcome = ShotOutcome::Undershoot;
        shot.r_event = 0;
        return shot;
    }

    auto rhs = [&model, N](Scalar r, const State& y) {
        return State(y(1), -Scalar(N - 1) / r * y(1) - model.g(y(0)));
    };

    bool heading_in = true;
    bool done = false;
    auto observer = [&](const ode::DenseStep<Scalar, 2>& step) {
        if (keep_trajectory) traj.steps.push_back(step);
        const State y0 = step.start();
        const State y1 = step.end();
        const Scalar r1 = step.r1();
        const Scalar flux = y1(0) * y1(1);

        if (y0(0) != 0 && (y1(0) == 0 || (y1(0) < 0) != (y0(0) < 0))) {
            ++shot.crossings;
            if (shot.crossings > max_crossings) {
                shot.outcome = ShotOutcome::CrossesZero;
                shot.r_event = detail::bisect_on_step([&](Scalar r) { return step.at(r)(0); }, step.r0, r1);
                done = true;
                return false;
            }
            heading_in = flux < 0;
        } else if (heading_in && flux > 0) {
            shot.outcome = ShotOutcome::Undershoot;
            shot.r_event = detail::bisect_on_step([&](Scalar r) { return step.at(r)(1); }, step.r0, r1);
            done = true;
            return false;
        } else if (flux < 0) {
            heading_in = true;
        }

        if (stop_on_decay && abs(y1(0)) < threshold && abs(y1(1)) < threshold && flux <= 0) {
            shot.outcome = ShotOutcome::Decays;
            shot.r_event = r1;
            done = true;
            return false;
        }
        return true;
    };

    ode::Dopri5Options<Scalar> dopts;
    dopts.rtol = opt.tol;
    dopts.atol = opt.tol * Scalar(1e-2) * abs(xi);
    dopts.h_init = traj.r_start;
    shot.stats = ode::integrate_dopri5(rhs, traj.r_start, traj.series(traj.r_start), r_max, observer, dopts);
    if (!done) {
        shot.outcome = ShotOutcome::Inconclusive;
        shot.r_event = r_max;
    }
    return shot;
}

/// Single shot with the classification used for the ground state: stops at the
/// first zero crossing. Convenience form with explicit r_max and tolerance.
template <Nonlinearity Model>
Shot<typename Model::Scalar> integrate_profile(const Model& model, int N, typename Model::Scalar xi,
                                                typename Model::Scalar r_max, typename Model::Scalar tol) {
    if (!(xi > 0) || !(r_max > 0) || !(tol > 0)) {
        throw Error(ErrorCode::InvalidModel, "integrate_profile needs xi, r_max, tol > 0");
    }
    require_valid(model, N);
    ShootingOptions<typename Model::Scalar> opt;
    opt.r_max = r_max;
    opt.tol = tol;
    return shoot(model, N, xi, opt, 0, true, true);
}

/// Radial solution of -Delta v = g(v) in R^N sampled on a uniform grid.
template <Nonlinearity Model>
struct RadialProfile {
    using Scalar = typename Model::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    int N = 3;
    Model model;
    Scalar xi = 0;
    Vector r;   // uniform, r(0) = 0
    Vector v;
    Vector dv;
    int nodes = 0;
    Scalar K = 0;     // integral of |grad v|^2 over R^N, tail included
    Scalar GInt = 0;  // integral of G(v) over R^N, tail included
    Scalar K_tail = 0;
    Scalar GInt_tail = 0;
    bool include_tail = true;
    ShotOutcome outcome = ShotOutcome::Inconclusive;

    // shooting diagnostics
    RadialTrajectory<Scalar> trajectory;
    Scalar xi_lo = 0;
    Scalar xi_hi = 0;
    int bisections = 0;
    int inconclusive_shots = 0;

    Scalar r_max() const { return r(r.size() - 1); }
    Scalar spacing() const { return r(1) - r(0); }
};

using Profile = RadialProfile<PowerModel>;

/// Number of strict sign changes in a sequence, ignoring exact zeros.
template <typename Derived>
int count_sign_changes(const Eigen::DenseBase<Derived>& values) {
    int changes = 0;
    int last = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const int s = (values(i) > 0) - (values(i) < 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Exterior contributions for r > R from the linearized decay
/// v ~ C r^{(1-N)/2} exp(-sqrt(m) r) matched to v(R).
template <Nonlinearity Model>
std::pair<typename Model::Scalar, typename Model::Scalar> linearized_tail(const Model& model, int N,
                                                                          typename Model::Scalar R,
                                                                          typename Model::Scalar vR) {
    using Scalar = typename Model::Scalar;
    using std::pow, std::sqrt;
    const Scalar kappa = sqrt(model.decay_rate());
    const Scalar alpha = Scalar(N - 1) / 2;
    const Scalar omega = unit_sphere_area<Scalar>(N);
    // C^2 exp(-2 kappa R) expressed through the matched value
    const Scalar weight = vR * vR * pow(R, Scalar(N - 1));
    const Scalar K_tail = omega * weight *
                          (kappa / 2 + alpha * alpha / R +
                           2 * kappa * alpha * (1 - alpha) * scaled_exp_integral_e1(2 * kappa * R));
    const Scalar G_tail = -omega * model.decay_rate() / 2 * weight / (2 * kappa);
    return {K_tail, G_tail};
}

/// Recomputes K and GInt of a profile from its grid samples by composite
/// Simpson quadrature, adding the linearized exterior tail when enabled.
template <Nonlinearity Model>
void compute_integrals(RadialProfile<Model>& profile) {
    using Scalar = typename Model::Scalar;
    using std::pow;
    const auto& r = profile.r.array();
    const Scalar h = profile.spacing();
    const Scalar omega = unit_sphere_area<Scalar>(profile.N);
    const auto weight = r.pow(Scalar(profile.N - 1));
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> k_integrand = profile.dv.array().square() * weight;
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> g_integrand = profile.model.G(profile.v.array()) * weight;
    profile.K_tail = 0;
    profile.GInt_tail = 0;
    if (profile.include_tail) {
        std::tie(profile.K_tail, profile.GInt_tail) =
            linearized_tail(profile.model, profile.N, profile.r_max(), profile.v(profile.v.size() - 1));
    }
    profile.K = omega * simpson(k_integrand, h) + profile.K_tail;
    profile.GInt = omega * simpson(g_integrand, h) + profile.GInt_tail;
    profile.nodes = count_sign_changes(profile.v);
}

/// Samples the stored trajectory on [0, r_cut] with the given (even) number of
/// intervals and recomputes the integral quantities.
template <Nonlinearity Model>
RadialProfile<Model> resample(const RadialProfile<Model>& profile, int intervals,
                              typename Model::Scalar r_cut = -1, bool include_tail = true) {
    using Scalar = typename Model::Scalar;
    if (intervals < 2 || intervals % 2 != 0) {
        throw Error(ErrorCode::GridError, "resampling needs an even number of intervals >= 2");
    }
    const Scalar R = r_cut > 0 ? std::min(r_cut, profile.trajectory.r_end()) : profile.r_max();
    using Vector = typename RadialProfile<Model>::Vector;
    RadialProfile<Model> out = profile;
    out.r = Vector::LinSpaced(intervals + 1, Scalar(0), R);
    out.v.resize(intervals + 1);
    out.dv.resize(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        const auto y = profile.trajectory.at(out.r(i));
        out.v(i) = y(0);
        out.dv(i) = y(1);
    }
    out.dv(0) = 0;
    out.include_tail = include_tail;
    compute_integrals(out);
    return out;
}

/// Same profile restricted to [0, r_cut] with no exterior correction.
template <Nonlinearity Model>
RadialProfile<Model> truncate(const RadialProfile<Model>& profile, typename Model::Scalar r_cut) {
    return resample(profile, static_cast<int>(profile.r.size() - 1), r_cut, false);
}

/// Bisection shooting for the radial solution with exactly target_nodes sign
/// changes. The bracket starts from xi = zeta0 (always trapped by the energy
/// argument) and an overshoot found by doubling from 2 zeta0; bisection runs
/// until the bracket cannot be split in floating point.
template <Nonlinearity Model>
RadialProfile<Model> shoot_state(const Model& model, int N, int target_nodes,
                                 const ShootingOptions<typename Model::Scalar>& opt = {}) {
    using Scalar = typename Model::Scalar;
    require_valid(model, N);
    if (target_nodes < 0) throw Error(ErrorCode::InvalidModel, "target_nodes must be >= 0");
    if (opt.grid_intervals < 64 || opt.grid_intervals % 2 != 0) {
        throw Error(ErrorCode::GridError, "grid_intervals must be even and >= 64");
    }

    int inconclusive = 0;
    auto is_high = [&](Scalar xi) {
        const auto s = shoot(model, N, xi, opt, target_nodes, false, false);
        if (s.outcome == ShotOutcome::Inconclusive) ++inconclusive;
        return s.outcome == ShotOutcome::CrossesZero;
    };

    const Scalar zeta0 = model.zeta0();
    Scalar lo = zeta0;
    Scalar hi = 2 * zeta0;
    while (!is_high(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > opt.xi_search_limit * zeta0) {
            throw Error(ErrorCode::NoBracket, "no overshoot for " + std::to_string(target_nodes) +
                                                  " nodes with xi up to " +
                                                  std::to_string(static_cast<double>(opt.xi_search_limit * zeta0)));
        }
    }

    int iterations = 0;
    for (; iterations < opt.max_bisections; ++iterations) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (is_high(mid) ? hi : lo) = mid;
    }

    // the undershoot side follows the decaying solution longest without crossing
    Shot<Scalar> shot = shoot(model, N, lo, opt, target_nodes, true, true);
    if (shot.outcome != ShotOutcome::Decays) shot = shoot(model, N, hi, opt, target_nodes, true, true);
    if (shot.outcome != ShotOutcome::Decays) {
        throw Error(ErrorCode::ShootingFailed,
                    "bracket [" + std::to_string(static_cast<double>(lo)) + ", " +
                        std::to_string(static_cast<double>(hi)) + "] never reached the decay threshold");
    }

    RadialProfile<Model> profile;
    profile.N = N;
    profile.model = model;
    profile.xi = shot.xi;
    profile.outcome = shot.outcome;
    profile.trajectory = std::move(shot.trajectory);
    profile.xi_lo = lo;
    profile.xi_hi = hi;
    profile.bisections = iterations;
    profile.inconclusive_shots = inconclusive;
    profile.r = RadialProfile<Model>::Vector::Constant(2, shot.r_event);
    profile.r(0) = 0;
    profile = resample(profile, opt.grid_intervals, shot.r_event, true);

    if (profile.nodes != target_nodes) {
        throw Error(ErrorCode::ShootingFailed, "profile has " + std::to_string(profile.nodes) +
                                                   " sign changes, wanted " + std::to_string(target_nodes));
    }
    return profile;
}

/// K = integral of |grad v|^2, recomputed from the grid (tail included when the profile carries one).
template <Nonlinearity Model>
typename Model::Scalar gradient_norm_sq(const RadialProfile<Model>& profile) {
    RadialProfile<Model> copy = profile;
    compute_integrals(copy);
    return copy.K;
}

/// |(N-2)/2 K - N GInt| / ((N-2)/2 K).
template <Nonlinearity Model>
typename Model::Scalar check_pohozaev_scalar(const RadialProfile<Model>& profile) {
    using std::abs;
    using Scalar = typename Model::Scalar;
    const Scalar lhs = Scalar(profile.N - 2) / 2 * profile.K;
    return abs(lhs - profile.N * profile.GInt) / lhs;
}

/// Energy E = v'^2 / 2 + G(v) at the end of every accepted integrator step.
template <Nonlinearity Model>
std::vector<std::pair<typename Model::Scalar, typename Model::Scalar>> energy_along(
    const Model& model, const RadialTrajectory<typename Model::Scalar>& trajectory) {
    std::vector<std::pair<typename Model::Scalar, typename Model::Scalar>> out;
    out.reserve(trajectory.steps.size() + 1);
    auto energy = [&](const auto& y) { return y(1) * y(1) / 2 + model.G(y(0)); };
    out.emplace_back(trajectory.r_start, energy(trajectory.series(trajectory.r_start)));
    for (const auto& s : trajectory.steps) out.emplace_back(s.r1(), energy(s.end()));
    return out;
}

}  // namespace kirchhoff
