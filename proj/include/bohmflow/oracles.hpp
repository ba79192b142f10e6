#pragma once

// Closed-form reference values, kept apart from the general routes they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "fockspace.hpp"
#include "werner.hpp"

namespace bohmflow::oracle {

/// Concurrence of an X-shaped two-qubit matrix:
/// 2·max{0, |ρ_{00,11}| − √(ρ_{01,01}ρ_{10,10}), |ρ_{01,10}| − √(ρ_{00,00}ρ_{11,11})}.
inline double x_state_concurrence(const Matrix4c& m) {
    const double d00 = m(0, 0).real(), d01 = m(1, 1).real(), d10 = m(2, 2).real(), d11 = m(3, 3).real();
    const double c1 = std::abs(m(0, 3)) - std::sqrt(std::max(0.0, d01 * d10));
    const double c2 = std::abs(m(1, 2)) - std::sqrt(std::max(0.0, d00 * d11));
    return 2.0 * std::max({0.0, c1, c2});
}

/// ε* = 1/(4ab + 1): root of 2εab − (1−ε)/2.
inline double werner_threshold(double a, double b) { return 1.0 / (4.0 * a * b + 1.0); }

/// γt at which εab e^{−γt} = e^{−γt}{[εb²+(1−ε)/4](1−e^{−γt}) + (1−ε)/4};
/// +inf when the concurrence only decays asymptotically.
inline double werner_sudden_death(const WernerParams& p) {
    const double q = (1.0 - p.epsilon) / 4.0;
    const double qb = p.epsilon * p.b * p.b + q;
    const double ratio = (p.epsilon * p.a * p.b - q) / qb;
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    if (ratio <= 0.0) return 0.0;
    return -std::log1p(-ratio);
}

}  // namespace bohmflow::oracle
