#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

/// Outcome of checking hypotheses (g1)-(g4) for a model in dimension N.
template <typename Scalar>
struct ValidationReport {
    int N = 0;
    Scalar m = 0;
    Scalar zeta0 = 0;           // first positive zero of G, NaN when undefined
    Scalar critical_power = 0;  // 2* - 1 = (N + 2) / (N - 2)
    bool g1 = false;
    bool g2 = false;
    bool g3 = false;
    bool g4 = false;
    std::vector<std::string> diagnostics;

    bool accepted() const { return g1 && g2 && g3 && g4; }
};

/// Requirements on a nonlinearity g usable by the shooting and functional code.
/// decay_rate() is the m of (g2); the far field decays like exp(-sqrt(m) r).
template <class M>
concept Nonlinearity = requires(const M& model, typename M::Scalar s, int N) {
    typename M::Scalar;
    { model.g(s) } -> std::convertible_to<typename M::Scalar>;
    { model.dg(s) } -> std::convertible_to<typename M::Scalar>;
    { model.G(s) } -> std::convertible_to<typename M::Scalar>;
    { model.decay_rate() } -> std::convertible_to<typename M::Scalar>;
    { model.zeta0() } -> std::convertible_to<typename M::Scalar>;
    { model.validate(N) } -> std::same_as<ValidationReport<typename M::Scalar>>;
};

/// g(s) = -m s + |s|^{p-1} s with primitive G(s) = -m s^2 / 2 + |s|^{p+1} / (p + 1).
template <typename Scalar_>
struct PowerNonlinearity {
    using Scalar = Scalar_;

    Scalar m = 1;
    Scalar p = 3;

    Scalar g(Scalar s) const {
        using std::abs, std::pow;
        return -m * s + pow(abs(s), p - 1) * s;
    }

    Scalar dg(Scalar s) const {
        using std::abs, std::pow;
        if (s == Scalar(0)) return p > 1 ? -m : Scalar(NAN);
        return -m + p * pow(abs(s), p - 1);
    }

    Scalar G(Scalar s) const {
        using std::abs, std::pow;
        return -m * s * s / 2 + pow(abs(s), p + 1) / (p + 1);
    }

    template <typename Derived>
    auto g(const Eigen::ArrayBase<Derived>& s) const {
        return -m * s.derived() + s.derived().abs().pow(p - 1) * s.derived();
    }

    template <typename Derived>
    auto G(const Eigen::ArrayBase<Derived>& s) const {
        return -m * s.derived().square() / 2 + s.derived().abs().pow(p + 1) / (p + 1);
    }

    Scalar decay_rate() const { return m; }

    Scalar zeta0() const {
        using std::pow;
        if (!(m > 0) || !(p > 1)) return Scalar(NAN);
        return pow((p + 1) * m / 2, 1 / (p - 1));
    }

    ValidationReport<Scalar> validate(int N) const;
};

template <typename Scalar>
ValidationReport<Scalar> PowerNonlinearity<Scalar>::validate(int N) const {
    if (N < 3) {
        throw Error(ErrorCode::DimensionError, "hypotheses are stated for N >= 3, got N = " + std::to_string(N));
    }
    ValidationReport<Scalar> report;
    report.N = N;
    report.m = m;
    report.zeta0 = zeta0();
    report.critical_power = Scalar(N + 2) / Scalar(N - 2);

    const bool finite = std::isfinite(static_cast<double>(m)) && std::isfinite(static_cast<double>(p));
    // continuity at 0 needs |s|^{p-1} s -> 0
    report.g1 = finite && p > 0;
    // limsup g(s)/s = -m + lim |s|^{p-1} as s -> 0+, which is -m < 0 only for p > 1
    report.g2 = finite && m > 0 && p > 1;
    // g(s)/s^{2*-1} -> 0 for p < 2*-1 and -> 1 at the critical power
    report.g3 = finite && p < report.critical_power;
    report.g4 = finite && (p != 1 || m < 1) && p > 0;

    if (!(m > 0)) report.diagnostics.push_back("nonpositive decay rate: m must be > 0 (g2)");
    if (!(p > 1)) report.diagnostics.push_back("power too small: p must be > 1 (g2)");
    if (!(p < report.critical_power)) {
        report.diagnostics.push_back("critical exponent: p must be < 2*-1 = " +
                                     std::to_string(static_cast<double>(report.critical_power)) +
                                     " for N = " + std::to_string(N) + " (g3)");
    }
    if (!report.g1 && p > 1) report.diagnostics.push_back("g is not continuous at 0 (g1)");
    if (!report.g4) report.diagnostics.push_back("G has no positive value on (0, inf) (g4)");
    return report;
}

template <Nonlinearity Model>
typename Model::Scalar eval_g(const Model& model, typename Model::Scalar s) {
    return model.g(s);
}

template <Nonlinearity Model>
typename Model::Scalar eval_G(const Model& model, typename Model::Scalar s) {
    return model.G(s);
}

template <Nonlinearity Model>
ValidationReport<typename Model::Scalar> validate_hypotheses(const Model& model, int N) {
    return model.validate(N);
}

/// Throws InvalidModel carrying the joined diagnostics unless all hypotheses hold.
template <Nonlinearity Model>
void require_valid(const Model& model, int N) {
    const auto report = model.validate(N);
    if (report.accepted()) return;
    std::string msg;
    for (const auto& d : report.diagnostics) msg += (msg.empty() ? "" : "; ") + d;
    throw Error(ErrorCode::InvalidModel, msg);
}

using PowerModel = PowerNonlinearity<double>;

}  // namespace kirchhoff
