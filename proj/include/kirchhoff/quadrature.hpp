#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

/// Composite Simpson rule for samples on a uniform grid of spacing h.
/// The sample count must be odd (an even number of intervals) and at least 3.
template <typename Derived>
typename Derived::Scalar simpson(const Eigen::DenseBase<Derived>& f, typename Derived::Scalar h) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = f.size();
    if (n < 3 || n % 2 == 0) {
        throw Error(ErrorCode::GridError, "Simpson's rule needs an odd number of samples >= 3");
    }
    Scalar odd = 0, even = 0;
    for (Eigen::Index i = 1; i < n - 1; i += 2) odd += f(i);
    for (Eigen::Index i = 2; i < n - 1; i += 2) even += f(i);
    return h / 3 * (f(0) + f(n - 1) + 4 * odd + 2 * even);
}

/// Surface area of the unit sphere S^{N-1} in R^N.
template <typename Scalar = double>
Scalar unit_sphere_area(int N) {
    using std::pow, std::tgamma;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return 2 * pow(pi, Scalar(N) / 2) / tgamma(Scalar(N) / 2);
}

/// e^x E1(x), with E1 the exponential integral; stays finite for large x.
template <typename Scalar>
Scalar scaled_exp_integral_e1(Scalar x) {
    using std::abs, std::exp;
    if (x <= 50) return -exp(x) * std::expint(-x);
    // libstdc++ drops to a one-term asymptotic beyond x = 100, so use the
    // continued fraction (modified Lentz), which converges fast for large x
    const Scalar tiny = std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();
    Scalar b = x + 1;
    Scalar c = 1 / tiny;
    Scalar d = 1 / b;
    Scalar h = d;
    for (int i = 1; i < 500; ++i) {
        const Scalar an = -Scalar(i) * i;
        b += 2;
        d = 1 / (an * d + b);
        c = b + an / c;
        const Scalar delta = c * d;
        h *= delta;
        if (abs(delta - 1) < std::numeric_limits<Scalar>::epsilon()) break;
    }
    return h;
}

}  // namespace kirchhoff
