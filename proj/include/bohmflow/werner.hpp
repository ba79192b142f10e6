#pragma once

// Generalized Werner state ε|ψ±⟩⟨ψ±| + (1−ε)/4·I with |ψ±⟩ = a|00⟩ ± b|11⟩,
// its zero-temperature amplitude-damped evolution, and the coefficient
// functions A, B, C, 𝒢 of the closed-form velocity field.

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fockspace.hpp"
#include "types.hpp"

namespace bohmflow {

inline constexpr double kNormalizationTol = 1e-12;

struct WernerParams {
    double a = std::numbers::sqrt2 / 2.0;
    double b = std::numbers::sqrt2 / 2.0;
    int sign = +1;  ///< +1 for |ψ+⟩, −1 for |ψ−⟩
    double epsilon = 1.0;

    /// b = √(1 − a²).
    static WernerParams from_a(double a, int sign, double epsilon) {
        WernerParams p{a, std::sqrt(std::max(0.0, 1.0 - a * a)), sign, epsilon};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0))
            throw ParameterError("Werner amplitudes a, b must lie in [0,1]");
        if (std::abs(a * a + b * b - 1.0) > kNormalizationTol)
            throw ParameterError("Werner amplitudes must satisfy a^2 + b^2 = 1");
        if (sign != 1 && sign != -1) throw ParameterError("Werner sign must be +1 or -1");
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("Werner epsilon must lie in [0,1]");
    }
};

struct VelocityCoefficients {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

inline TwoModeDensityMatrix werner_initial(const WernerParams& p) {
    p.validate();
    Eigen::Matrix<cplx, 4, 1> psi = Eigen::Matrix<cplx, 4, 1>::Zero();
    psi(fock_index(0, 0)) = p.a;
    psi(fock_index(1, 1)) = static_cast<double>(p.sign) * p.b;
    Matrix4c m = p.epsilon * (psi * psi.adjoint()) + (1.0 - p.epsilon) / 4.0 * Matrix4c::Identity();
    return TwoModeDensityMatrix(m);
}

namespace detail {

/// Phenomenological single-mode map on system ⊗ reservoir (dim 2×2):
///   |0⟩|0⟩_R → |0⟩|0⟩_R
///   |1⟩|0⟩_R → e^{−γt/2}|1⟩|0⟩_R + √(1−e^{−γt})|0⟩|1⟩_R
/// with the free phase e^{−inωt} folded in. Rows index (n, r) as 2n + r.
inline Eigen::Matrix<cplx, 4, 2> damping_isometry(const DimensionlessTime& t) {
    const double survive = std::exp(-0.5 * t.gamma_t);
    const double leak = std::sqrt(-std::expm1(-t.gamma_t));
    const cplx phase = std::polar(1.0, -t.omega_t);
    Eigen::Matrix<cplx, 4, 2> v = Eigen::Matrix<cplx, 4, 2>::Zero();
    v(0, 0) = 1.0;                 // |0⟩ → |0,0_R⟩
    v(2 * 1 + 0, 1) = survive * phase;  // |1⟩ → |1,0_R⟩
    v(2 * 0 + 1, 1) = leak;        // |1⟩ → |0,1_R⟩ (energy carried by the reservoir)
    return v;
}

}  // namespace detail

/// Zero-temperature damped state at time t. The channel is built from the
/// per-mode operator rules, applied independently, followed by a trace over
/// both reservoirs.
inline TwoModeDensityMatrix werner_damped(const WernerParams& p, const BathParams& bath,
                                          const DimensionlessTime& t) {
    p.validate();
    bath.validate();
    if (bath.nbar > 0.0)
        throw UnsupportedTemperatureError(
            "the closed-form Werner channel is zero-temperature; nbar > 0 is only honoured by "
            "the generic density-matrix velocity");
    if (!(t.gamma_t >= 0.0)) throw DomainError("werner_damped requires gamma_t >= 0");
    // At t = 0 the channel is the identity; return the initial state itself so
    // that holds bit for bit rather than up to the rounding of the isometry.
    if (t.gamma_t == 0.0 && t.omega_t == 0.0) return werner_initial(p);

    const auto v = detail::damping_isometry(t);
    const Matrix4c& rho0 = werner_initial(p).matrix();

    // Total isometry on (n1, r1, n2, r2) with flat index 8n1 + 4r1 + 2n2 + r2.
    Eigen::Matrix<cplx, 16, 4> big = Eigen::Matrix<cplx, 16, 4>::Zero();
    for (int n1 = 0; n1 < 2; ++n1)
        for (int n2 = 0; n2 < 2; ++n2)
            for (int s1 = 0; s1 < 4; ++s1)
                for (int s2 = 0; s2 < 4; ++s2) big(4 * s1 + s2, fock_index(n1, n2)) = v(s1, n1) * v(s2, n2);
    const Eigen::Matrix<cplx, 16, 16> joint = big * rho0 * big.adjoint();

    Matrix4c out = Matrix4c::Zero();
    for (int n1 = 0; n1 < 2; ++n1)
        for (int n2 = 0; n2 < 2; ++n2)
            for (int m1 = 0; m1 < 2; ++m1)
                for (int m2 = 0; m2 < 2; ++m2) {
                    cplx s = 0.0;
                    for (int r1 = 0; r1 < 2; ++r1)
                        for (int r2 = 0; r2 < 2; ++r2)
                            s += joint(8 * n1 + 4 * r1 + 2 * n2 + r2, 8 * m1 + 4 * r1 + 2 * m2 + r2);
                    out(fock_index(n1, n2), fock_index(m1, m2)) = s;
                }
    // Hermitize away the last-ulp asymmetry of the products.
    out = 0.5 * (out + out.adjoint()).eval();
    return TwoModeDensityMatrix(out);
}

namespace detail {

struct WernerWeights {
    double decay;     ///< e^{−γt}
    double mixed;     ///< (1−ε)/4
    double excited;   ///< εb² + (1−ε)/4
    double ground;    ///< ρ_{00,00}(t)
    double single;    ///< ρ_{01,01}(t) = ρ_{10,10}(t)
    double doubly;    ///< ρ_{11,11}(t)
};

inline WernerWeights werner_weights(const WernerParams& p, double gamma_t) {
    WernerWeights w{};
    w.decay = std::exp(-gamma_t);
    const double lost = -std::expm1(-gamma_t);
    w.mixed = (1.0 - p.epsilon) / 4.0;
    w.excited = p.epsilon * p.b * p.b + w.mixed;
    w.ground = p.epsilon * p.a * p.a + w.mixed + w.excited * lost * lost + 2.0 * w.mixed * lost;
    w.single = w.decay * (w.excited * lost + w.mixed);
    w.doubly = w.excited * w.decay * w.decay;
    return w;
}

}  // namespace detail

/// A = εab e^{−γt}, B = 2[εb² + (1−ε)/4]e^{−2γt},
/// C = 2e^{−γt}{[εb² + (1−ε)/4](1−e^{−γt}) + (1−ε)/4}.
inline VelocityCoefficients werner_coeffs(const WernerParams& p, const BathParams& bath,
                                          const DimensionlessTime& t) {
    p.validate();
    bath.validate();
    if (!(t.gamma_t >= 0.0)) throw DomainError("werner_coeffs requires gamma_t >= 0");
    const auto w = detail::werner_weights(p, t.gamma_t);
    return {p.epsilon * p.a * p.b * w.decay, 2.0 * w.doubly, 2.0 * w.single};
}

/// 𝒢(x̃₁,x̃₂;t): the diagonal density with its Gaussian envelope and 1/π removed.
inline double g_denominator(const WernerParams& p, const BathParams& bath, const DimensionlessTime& t,
                            double x1, double x2) {
    p.validate();
    bath.validate();
    const auto w = detail::werner_weights(p, t.gamma_t);
    const double coherence = p.epsilon * p.a * p.b * w.decay;
    return w.ground + 4.0 * w.doubly * x1 * x1 * x2 * x2 + 2.0 * w.single * (x1 * x1 + x2 * x2) +
           p.sign * 4.0 * coherence * x1 * x2 * std::cos(2.0 * t.omega_t);
}

}  // namespace bohmflow
