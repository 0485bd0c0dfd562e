#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/nonlinearity.hpp"
#include "kirchhoff/quadrature.hpp"
#include "kirchhoff/radial_shooting.hpp"
#include "kirchhoff/scaling_map.hpp"

namespace kirchhoff {

/// u(s) = v(t s) for a scalar-field profile v, sampled on the grid r_i / t.
template <Nonlinearity Model>
struct ScaledProfile {
    using Scalar = typename Model::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    RadialProfile<Model> base;
    Scalar t = 1;
    Vector s;   // uniform grid of u
    Vector u;
    Vector du;
    Scalar K_u = 0;             // t^{2-N} K_base
    Scalar K_u_quadrature = 0;  // Simpson on (s, du), tail rescaled
    Scalar GInt_u = 0;          // Simpson on (s, G(u)), tail rescaled
    Scalar GInt_u_identity = 0; // t^{-N} GInt_base
    bool scaling_mismatch = false;

    int N() const { return base.N; }
    Scalar spacing() const { return s(1) - s(0); }
};

template <typename Scalar>
struct VerificationTolerances {
    Scalar scaling_identity = 1e-8;
    Scalar root_identity = 1e-8;
    Scalar action_definition = 1e-5;  // definition vs closed form, relative to max(1, |I|)
    Scalar action_closed_forms = 1e-12;
    Scalar pohozaev_kirchhoff = 1e-5;
    Scalar pde = 1e-4;
    Scalar nonnegativity = 1e-10;
};

/// Rescales without checking that t solves the scaling relation.
template <Nonlinearity Model>
ScaledProfile<Model> scale_profile(const RadialProfile<Model>& profile, typename Model::Scalar t,
                                   typename Model::Scalar mismatch_tol = 1e-8) {
    using Scalar = typename Model::Scalar;
    using std::abs, std::pow;
    if (!(t > 0)) throw Error(ErrorCode::NotARoot, "scaling factor must be positive");
    const int N = profile.N;

    ScaledProfile<Model> out;
    out.base = profile;
    out.t = t;
    out.s = profile.r / t;
    out.u = profile.v;
    out.du = t * profile.dv;

    const Scalar h = out.spacing();
    const Scalar omega = unit_sphere_area<Scalar>(N);
    const auto weight = out.s.array().pow(Scalar(N - 1));
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> k_integrand = out.du.array().square() * weight;
    const Eigen::Array<Scalar, Eigen::Dynamic, 1> g_integrand = profile.model.G(out.u.array()) * weight;

    out.K_u = pow(t, Scalar(2 - N)) * profile.K;
    out.K_u_quadrature = omega * simpson(k_integrand, h) + pow(t, Scalar(2 - N)) * profile.K_tail;
    out.GInt_u = omega * simpson(g_integrand, h) + pow(t, Scalar(-N)) * profile.GInt_tail;
    out.GInt_u_identity = pow(t, Scalar(-N)) * profile.GInt;
    out.scaling_mismatch = abs(out.K_u_quadrature - out.K_u) > mismatch_tol * abs(out.K_u);
    return out;
}

/// Kirchhoff solution u = v(t .) for a root t of a t^2 + b K t^{4-N} = 1.
template <Nonlinearity Model>
ScaledProfile<Model> build_kirchhoff_solution(const RadialProfile<Model>& profile, typename Model::Scalar t,
                                              const KirchhoffProblem<typename Model::Scalar>& problem,
                                              typename Model::Scalar root_tol = 1e-8) {
    using std::abs;
    problem.validate();
    if (problem.N != profile.N) throw Error(ErrorCode::DimensionError, "profile and problem dimensions differ");
    const auto f = scaling_function(problem, profile.K, t);
    if (!(abs(f - 1) <= root_tol)) {
        throw Error(ErrorCode::NotARoot, "a t^2 + b K t^{4-N} = " + std::to_string(static_cast<double>(f)) +
                                             " at t = " + std::to_string(static_cast<double>(t)));
    }
    return scale_profile(profile, t);
}

/// I(u) = 1/2 (a + b/2 K_u) K_u - integral G(u), with integral G(u) by quadrature on the scaled grid.
template <Nonlinearity Model>
typename Model::Scalar action_definition(const ScaledProfile<Model>& u, const Model& /*model*/,
                                         const KirchhoffProblem<typename Model::Scalar>& problem) {
    return (problem.a + problem.b * u.K_u / 2) * u.K_u / 2 - u.GInt_u;
}

template <typename Scalar>
struct ClosedFormActions {
    Scalar I_func = 0;
    Scalar I_reduced = 0;
    Scalar relative_gap = 0;
};

/// Both closed forms of the action at a scaling root; relative_gap is measured
/// against the larger of the two terms of I_func so that a near-zero action
/// does not inflate it.
template <typename Scalar>
ClosedFormActions<Scalar> action_from_scaling(Scalar profile_K, Scalar t, const KirchhoffProblem<Scalar>& problem) {
    using std::abs, std::max, std::pow;
    const int N = problem.N;
    ClosedFormActions<Scalar> out;
    out.I_func = action_closed_form(profile_K, t, problem);
    out.I_reduced = action_reduced(pow(t, Scalar(2 - N)) * profile_K, problem);
    const Scalar scale = max(abs(problem.a / 4 * profile_K / pow(t, Scalar(N - 2))),
                             abs(Scalar(4 - N) / Scalar(4 * N) * profile_K / pow(t, Scalar(N))));
    out.relative_gap = abs(out.I_reduced - out.I_func) / max(scale, abs(out.I_func));
    return out;
}

/// |a c K_u + b c K_u^2 - integral G(u)| / (a c K_u), c = (N-2)/(2N).
template <Nonlinearity Model>
typename Model::Scalar kirchhoff_pohozaev_residual(const ScaledProfile<Model>& u, const Model& /*model*/,
                                                   const KirchhoffProblem<typename Model::Scalar>& problem) {
    using Scalar = typename Model::Scalar;
    using std::abs;
    const Scalar c = Scalar(u.N() - 2) / Scalar(2 * u.N());
    const Scalar first = problem.a * c * u.K_u;
    return abs(first + problem.b * c * u.K_u * u.K_u - u.GInt_u) / first;
}

/// sup over interior nodes of |-coeff (w'' + (N-1)/r w') - g(w)| / sup |g(w)| with
/// second-order central differences; the first three cells next to r = 0 are skipped.
template <Nonlinearity Model, typename Derived>
typename Model::Scalar radial_pde_residual(const Model& model, int N, typename Model::Scalar h,
                                           const Eigen::MatrixBase<Derived>& w, typename Model::Scalar coeff) {
    using Scalar = typename Model::Scalar;
    using std::abs, std::max;
    const Eigen::Index n = w.size();
    if (n < 64) throw Error(ErrorCode::GridError, "PDE residual needs at least 64 grid points");
    Scalar sup_res = 0;
    Scalar sup_g = 0;
    for (Eigen::Index i = 0; i < n; ++i) sup_g = max(sup_g, abs(model.g(w(i))));
    for (Eigen::Index i = 3; i < n - 1; ++i) {
        const Scalar r = i * h;
        const Scalar lap = (w(i + 1) - 2 * w(i) + w(i - 1)) / (h * h) +
                           Scalar(N - 1) / r * (w(i + 1) - w(i - 1)) / (2 * h);
        sup_res = max(sup_res, abs(-coeff * lap - model.g(w(i))));
    }
    return sup_g > 0 ? sup_res / sup_g : sup_res;
}

/// Finite-difference residual of -(a + b K_u) Delta u = g(u) on the scaled grid.
template <Nonlinearity Model>
typename Model::Scalar pde_residual(const ScaledProfile<Model>& u, const Model& model,
                                    const KirchhoffProblem<typename Model::Scalar>& problem) {
    return radial_pde_residual(model, u.N(), u.spacing(), u.u, problem.a + problem.b * u.K_u);
}

/// Undoes the scaling: v(rho) = u(h rho) with h = sqrt(a + b K_u), built from
/// the samples of u alone, then re-integrated as a scalar-field profile.
template <Nonlinearity Model>
RadialProfile<Model> recover_scalar_field(const ScaledProfile<Model>& u,
                                          const KirchhoffProblem<typename Model::Scalar>& problem) {
    using std::sqrt;
    const auto h = sqrt(problem.a + problem.b * u.K_u_quadrature);
    RadialProfile<Model> v = u.base;
    v.r = u.s / h;
    v.v = u.u;
    v.dv = h * u.du;
    v.include_tail = true;
    compute_integrals(v);
    return v;
}

/// Scalar-field residuals (a = 1, b = 0) of a profile built only from its samples.
template <Nonlinearity Model>
typename Model::Scalar scalar_pde_residual(const RadialProfile<Model>& v) {
    return radial_pde_residual(v.model, v.N, v.spacing(), v.v, typename Model::Scalar(1));
}

template <typename Scalar>
struct ActionReport {
    Scalar t = 0;
    Scalar K_u = 0;
    Scalar K_u_quadrature = 0;
    Scalar I_definition = 0;
    Scalar I_definition_identity = 0;  // with integral G(u) = t^{-N} GInt
    Scalar I_reduced = 0;
    Scalar I_func = 0;
    Scalar pohozaev_residual_kirchhoff = 0;
    Scalar pde_residual_sup = 0;
    Scalar scaling_identity_residual = 0;  // |K_u_quadrature t^{N-2} - K| / K
    Scalar root_identity_residual = 0;     // |(a + b K_u) t^2 - 1|
    Scalar definition_gap = 0;             // |I_definition - I_func| / max(1, |I_func|)
    Scalar closed_form_gap = 0;

    bool action_ok = false;
    bool pohozaev_ok = false;
    bool pde_ok = false;
    bool identities_ok = false;
    bool passes() const { return action_ok && pohozaev_ok && pde_ok && identities_ok; }
};

/// Runs every check on a constructed Kirchhoff solution.
template <Nonlinearity Model>
ActionReport<typename Model::Scalar> verify_solution(const ScaledProfile<Model>& u,
                                                     const KirchhoffProblem<typename Model::Scalar>& problem,
                                                     const VerificationTolerances<typename Model::Scalar>& tol = {}) {
    using Scalar = typename Model::Scalar;
    using std::abs, std::max, std::pow;
    const auto& model = u.base.model;
    const int N = u.N();

    ActionReport<Scalar> rep;
    rep.t = u.t;
    rep.K_u = u.K_u;
    rep.K_u_quadrature = u.K_u_quadrature;
    rep.I_definition = action_definition(u, model, problem);
    rep.I_definition_identity = (problem.a + problem.b * u.K_u / 2) * u.K_u / 2 - u.GInt_u_identity;
    const auto closed = action_from_scaling(u.base.K, u.t, problem);
    rep.I_func = closed.I_func;
    rep.I_reduced = closed.I_reduced;
    rep.closed_form_gap = closed.relative_gap;
    rep.definition_gap = abs(rep.I_definition - rep.I_func) / max(Scalar(1), abs(rep.I_func));
    rep.pohozaev_residual_kirchhoff = kirchhoff_pohozaev_residual(u, model, problem);
    rep.pde_residual_sup = pde_residual(u, model, problem);
    rep.scaling_identity_residual = abs(u.K_u_quadrature * pow(u.t, Scalar(N - 2)) - u.base.K) / u.base.K;
    rep.root_identity_residual = abs((problem.a + problem.b * u.K_u) * u.t * u.t - 1);

    rep.action_ok = rep.definition_gap < tol.action_definition && rep.closed_form_gap < tol.action_closed_forms;
    rep.pohozaev_ok = rep.pohozaev_residual_kirchhoff < tol.pohozaev_kirchhoff;
    rep.pde_ok = rep.pde_residual_sup < tol.pde;
    rep.identities_ok = rep.scaling_identity_residual < tol.scaling_identity &&
                        rep.root_identity_residual < tol.root_identity;
    return rep;
}

/// Action of the radial Gaussian alpha exp(-(r/sigma)^2) by Simpson quadrature on [0, 12 sigma].
template <Nonlinearity Model>
typename Model::Scalar gaussian_action(const Model& model, const KirchhoffProblem<typename Model::Scalar>& problem,
                                       typename Model::Scalar alpha, typename Model::Scalar sigma,
                                       int intervals = 4096) {
    using Scalar = typename Model::Scalar;
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
    const int N = problem.N;
    const Scalar R = 12 * sigma;
    const Scalar h = R / intervals;
    const Array r = Array::LinSpaced(intervals + 1, Scalar(0), R);
    const Array u = alpha * (-(r / sigma).square()).exp();
    const Array du = -2 * r / (sigma * sigma) * u;
    const Array weight = r.pow(Scalar(N - 1));
    const Scalar omega = unit_sphere_area<Scalar>(N);
    const Scalar K = omega * simpson((du.square() * weight).eval(), h);
    const Scalar GI = omega * simpson((model.G(u) * weight).eval(), h);
    return (problem.a + problem.b * K / 2) * K / 2 - GI;
}

template <typename Scalar>
struct NonnegativityReport {
    int trials = 0;
    std::uint64_t seed = 0;
    Scalar a_max = 0;
    bool above_threshold = false;
    Scalar min_action = 0;
    Scalar argmin_alpha = 0;
    Scalar argmin_sigma = 0;
    bool pass = false;  // min_action >= -tolerance
};

/// Samples the action on seeded random Gaussian bumps with log-uniform amplitude
/// in [0.01, 100] zeta0 and width in [0.1, 10]. Above the threshold a_max the
/// action should never be negative.
template <Nonlinearity Model>
NonnegativityReport<typename Model::Scalar> nonnegativity_sample(
    const KirchhoffProblem<typename Model::Scalar>& problem, const Model& model, typename Model::Scalar K_ground,
    int trial_count, std::uint64_t seed = 0, typename Model::Scalar tolerance = 1e-10) {
    using Scalar = typename Model::Scalar;
    using std::exp, std::log;
    problem.validate();
    NonnegativityReport<Scalar> rep;
    rep.trials = trial_count;
    rep.seed = seed;
    rep.a_max = threshold_a_max(problem.N, problem.b, K_ground);
    rep.above_threshold = problem.a > rep.a_max;
    rep.min_action = std::numeric_limits<Scalar>::infinity();

    const Scalar zeta0 = model.zeta0();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](Scalar lo, Scalar hi) { return exp(log(lo) + Scalar(unit(rng)) * (log(hi) - log(lo))); };

    for (int i = 0; i < trial_count; ++i) {
        const Scalar alpha = log_uniform(Scalar(0.01) * zeta0, Scalar(100) * zeta0);
        const Scalar sigma = log_uniform(Scalar(0.1), Scalar(10));
        const Scalar I = gaussian_action(model, problem, alpha, sigma);
        if (I < rep.min_action) {
            rep.min_action = I;
            rep.argmin_alpha = alpha;
            rep.argmin_sigma = sigma;
        }
    }
    if (trial_count <= 0) rep.min_action = 0;
    rep.pass = rep.min_action >= -tolerance;
    return rep;
}

}  // namespace kirchhoff
