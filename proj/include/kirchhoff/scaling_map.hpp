#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

/// -(a + b * integral |grad u|^2) Delta u = g(u) in R^N.
template <typename Scalar>
struct KirchhoffProblem {
    int N = 3;
    Scalar a = 1;
    Scalar b = 1;

    /// a > 0, b >= 0 (b = 0 is the local scalar-field limit), N >= 3.
    void validate() const {
        if (N < 3) throw Error(ErrorCode::DimensionError, "N must be >= 3");
        if (!(a > 0)) throw Error(ErrorCode::HypothesisError, "a must be > 0");
        if (!(b >= 0)) throw Error(ErrorCode::HypothesisError, "b must be >= 0");
    }
};

enum class Regime { UniqueN3, UniqueN4, NoneN4, TwoRoots, DoubleRoot, NoRoot };

constexpr const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::UniqueN3: return "UNIQUE_N3";
        case Regime::UniqueN4: return "UNIQUE_N4";
        case Regime::NoneN4: return "NONE_N4";
        case Regime::TwoRoots: return "TWO_ROOTS";
        case Regime::DoubleRoot: return "DOUBLE_ROOT";
        case Regime::NoRoot: return "NO_ROOT";
    }
    return "UNKNOWN";
}

template <typename Scalar>
struct ScalingTolerances {
    Scalar eps_eq = 1e-9;       // relative band around a_max classified as a double root
    Scalar root_rtol = 1e-14;   // bisection stops once the bracket is this narrow relative to t
};

/// Positive solutions t of a t^2 + b K t^{4-N} = 1, ascending.
template <typename Scalar>
struct ScalingRoots {
    Regime regime = Regime::NoRoot;
    std::vector<Scalar> roots;
    std::optional<Scalar> t_star;  // argmin of f, N >= 5
    std::optional<Scalar> f_min;
    std::optional<Scalar> a_max;
};

/// b K t^{4-N}, evaluated through logarithms so large N or extreme t saturate
/// to 0 / inf instead of producing NaN from inf * 0.
template <typename Scalar>
Scalar nonlocal_term(int N, Scalar bK, Scalar t) {
    using std::exp, std::log;
    if (bK == 0) return 0;
    if (N == 4) return bK;
    return exp(log(bK) + Scalar(4 - N) * log(t));
}

/// f(t) = a t^2 + b K t^{4-N}.
template <typename Scalar>
Scalar scaling_function(const KirchhoffProblem<Scalar>& problem, Scalar K, Scalar t) {
    return problem.a * t * t + nonlocal_term(problem.N, problem.b * K, t);
}

/// Largest a for which f has a root, N >= 5:
/// a_max = ((N-4)/(N-2))^{(N-2)/(N-4)} (2 / ((N-4) b K))^{2/(N-4)}.
template <typename Scalar>
Scalar threshold_a_max(int N, Scalar b, Scalar K) {
    using std::pow;
    if (N < 5) {
        throw Error(ErrorCode::DimensionError,
                    "the existence threshold on a is defined for N >= 5, got N = " + std::to_string(N));
    }
    if (!(b > 0) || !(K > 0)) throw Error(ErrorCode::HypothesisError, "threshold needs b > 0 and K > 0");
    const Scalar n4 = Scalar(N - 4);
    const Scalar n2 = Scalar(N - 2);
    return pow(n4 / n2, n2 / n4) * pow(2 / (n4 * b * K), 2 / n4);
}

namespace detail {

template <typename Scalar, class F>
Scalar bisect_root(F&& F_, Scalar lo, Scalar hi, Scalar rtol) {
    const bool lo_positive = F_(lo) > 0;
    for (int i = 0; i < 400; ++i) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi || hi - lo <= rtol * mid) break;
        ((F_(mid) > 0) == lo_positive ? lo : hi) = mid;
    }
    return lo + (hi - lo) / 2;
}

}  // namespace detail

/// Solves the scaling relation linking a scalar-field solution with gradient
/// seminorm K to Kirchhoff solutions u = v(t .).
template <typename Scalar>
ScalingRoots<Scalar> solve_scaling(const KirchhoffProblem<Scalar>& problem, Scalar K,
                                   const ScalingTolerances<Scalar>& tol = {}) {
    using std::abs, std::pow, std::sqrt;
    problem.validate();
    if (!(K > 0)) throw Error(ErrorCode::HypothesisError, "K must be > 0");

    const Scalar a = problem.a;
    const Scalar bK = problem.b * K;
    ScalingRoots<Scalar> out;

    if (problem.N == 3) {
        // a t^2 + bK t - 1 = 0, positive root in cancellation-free form
        out.regime = Regime::UniqueN3;
        out.roots.push_back(2 / (bK + sqrt(bK * bK + 4 * a)));
        return out;
    }
    if (problem.N == 4) {
        if (bK < 1) {
            out.regime = Regime::UniqueN4;
            out.roots.push_back(sqrt((1 - bK) / a));
        } else {
            out.regime = Regime::NoneN4;
        }
        return out;
    }

    if (!(bK > 0)) throw Error(ErrorCode::HypothesisError, "N >= 5 needs b > 0");
    const int N = problem.N;
    const Scalar t_star = pow(Scalar(N - 4) * bK / (2 * a), 1 / Scalar(N - 2));
    const Scalar f_min = a * t_star * t_star * Scalar(N - 2) / Scalar(N - 4);
    const Scalar a_max = threshold_a_max(N, problem.b, K);
    out.t_star = t_star;
    out.f_min = f_min;
    out.a_max = a_max;

    if (abs(a - a_max) <= tol.eps_eq * a_max) {
        out.regime = Regime::DoubleRoot;
        out.roots.push_back(t_star);
        return out;
    }
    if (a > a_max) {
        out.regime = Regime::NoRoot;
        return out;
    }

    auto F = [&](Scalar t) { return scaling_function(problem, K, t) - 1; };
    Scalar lo = t_star;
    do lo /= 2;
    while (F(lo) <= 0);
    Scalar hi = t_star;
    do hi *= 2;
    while (F(hi) <= 0);

    out.regime = Regime::TwoRoots;
    out.roots.push_back(detail::bisect_root(F, lo, t_star, tol.root_rtol));
    out.roots.push_back(detail::bisect_root(F, t_star, hi, tol.root_rtol));
    return out;
}

/// Whether the Kirchhoff problem admits a solution built from the ground state with seminorm K_ground.
template <typename Scalar>
struct ExistenceReport {
    int N = 3;
    bool exists = false;
    Regime regime = Regime::NoRoot;
    int branches = 0;  // distinct scaled copies of the ground state
    Scalar bK = 0;
    std::optional<Scalar> a_max;
    std::optional<Scalar> margin;  // a_max - a
    std::optional<Scalar> t_star;
    std::string note;
};

template <typename Scalar>
ExistenceReport<Scalar> existence_report(const KirchhoffProblem<Scalar>& problem, Scalar K_ground,
                                         const ScalingTolerances<Scalar>& tol = {}) {
    const auto roots = solve_scaling(problem, K_ground, tol);
    ExistenceReport<Scalar> rep;
    rep.N = problem.N;
    rep.regime = roots.regime;
    rep.bK = problem.b * K_ground;
    rep.branches = static_cast<int>(roots.roots.size());
    rep.exists = !roots.roots.empty();
    rep.a_max = roots.a_max;
    rep.t_star = roots.t_star;
    if (roots.a_max) rep.margin = *roots.a_max - problem.a;

    switch (roots.regime) {
        case Regime::UniqueN3: rep.note = "exists for all a,b > 0; unique scaling of the ground state"; break;
        case Regime::UniqueN4: rep.note = "exists: b*K < 1; unique scaling of the ground state"; break;
        case Regime::NoneN4: rep.note = "no solution: b*K >= 1"; break;
        case Regime::TwoRoots: rep.note = "exists: a < a_max; two distinct scaled solutions"; break;
        case Regime::DoubleRoot: rep.note = "exists: a = a_max; single (double) scaling root"; break;
        case Regime::NoRoot: rep.note = "no solution: a > a_max"; break;
    }
    return rep;
}

/// Action on a solution, b eliminated through the scaling relation:
/// I = (a/4) K / t^{N-2} + (4-N)/(4N) K / t^N.
template <typename Scalar>
Scalar action_closed_form(Scalar K, Scalar t, const KirchhoffProblem<Scalar>& problem) {
    using std::pow;
    const int N = problem.N;
    return problem.a / 4 * K / pow(t, Scalar(N - 2)) + Scalar(4 - N) / Scalar(4 * N) * K / pow(t, Scalar(N));
}

/// Action on a solution after using the Kirchhoff Pohozaev identity:
/// I = (a/N) K_u + b (4-N)/(4N) K_u^2.
template <typename Scalar>
Scalar action_reduced(Scalar K_u, const KirchhoffProblem<Scalar>& problem) {
    const int N = problem.N;
    return problem.a / N * K_u + problem.b * Scalar(4 - N) / Scalar(4 * N) * K_u * K_u;
}

template <typename Scalar>
struct ComparisonReport {
    Scalar t1 = 0, t2 = 0;
    Scalar I1 = 0, I2 = 0;
    bool t_ordered = false;       // t2 < t1
    bool action_ordered = false;  // I1 < I2
    bool holds() const { return t_ordered && action_ordered; }
};

/// Two scalar-field solutions with K1 < K2 scaled into Kirchhoff solutions,
/// N = 3 or N = 4 (with b K2 < 1): the larger seminorm gets the smaller t and
/// the larger action.
template <typename Scalar>
ComparisonReport<Scalar> compare_solutions(const KirchhoffProblem<Scalar>& problem, Scalar K1, Scalar K2) {
    problem.validate();
    if (problem.N != 3 && problem.N != 4) {
        throw Error(ErrorCode::HypothesisError, "comparison holds for N = 3 or N = 4, got N = " +
                                                    std::to_string(problem.N));
    }
    if (!(K1 > 0) || !(K1 < K2)) throw Error(ErrorCode::HypothesisError, "need 0 < K1 < K2");
    if (problem.N == 4 && !(problem.b * K2 < 1)) {
        throw Error(ErrorCode::HypothesisError, "N = 4 needs b*K2 < 1, got b*K2 = " +
                                                    std::to_string(static_cast<double>(problem.b * K2)));
    }
    ComparisonReport<Scalar> rep;
    rep.t1 = solve_scaling(problem, K1).roots.front();
    rep.t2 = solve_scaling(problem, K2).roots.front();
    rep.I1 = action_closed_form(K1, rep.t1, problem);
    rep.I2 = action_closed_form(K2, rep.t2, problem);
    rep.t_ordered = rep.t2 < rep.t1;
    rep.action_ordered = rep.I1 < rep.I2;
    return rep;
}

}  // namespace kirchhoff
