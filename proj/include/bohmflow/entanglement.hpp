#pragma once

// Wootters concurrence of two-qubit states, separability thresholds of the
// undamped Werner family, and entanglement sudden-death times under damping.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fockspace.hpp"
#include "types.hpp"
#include "werner.hpp"

namespace bohmflow {

struct ConcurrenceResult {
    double value = 0.0;
    std::array<double, 4> sqrt_eigenvalues{};  ///< √λ_k, descending
};

/// σ_y ⊗ σ_y in the {|00⟩,|01⟩,|10⟩,|11⟩} basis.
inline Matrix4c spin_flip() {
    Matrix4c s = Matrix4c::Zero();
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
}

/// C(ρ) = max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}, λ_k the eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
///
/// The √λ_k are obtained as the singular values of Wᵀ(σ_y⊗σ_y)W where
/// ρ = WW† comes from the Hermitian eigendecomposition. This has the same
/// spectrum as the non-Hermitian product but keeps exact zeros of λ at
/// O(machine epsilon) instead of O(√epsilon).
inline ConcurrenceResult concurrence(const TwoModeDensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho.matrix());
    Matrix4c w = es.eigenvectors();
    for (int k = 0; k < 4; ++k) w.col(k) *= std::sqrt(std::max(es.eigenvalues()(k), 0.0));
    const Matrix4c tau = w.transpose() * spin_flip() * w;
    Eigen::JacobiSVD<Matrix4c> svd(tau);
    const auto& sv = svd.singularValues();  // already descending

    ConcurrenceResult r;
    for (int k = 0; k < 4; ++k) r.sqrt_eigenvalues[k] = sv(k);
    r.value = std::clamp(sv(0) - sv(1) - sv(2) - sv(3), 0.0, 1.0);
    return r;
}

/// Smallest ε such that the undamped state is entangled for every ε above
/// it. `std::nullopt` when the state is separable for all ε (a = 0 or b = 0).
inline std::optional<double> separability_threshold(double a, double b, int sign, double tol = 1e-9) {
    auto entangled = [&](double eps) {
        return concurrence(werner_initial(WernerParams{a, b, sign, eps})).value > 0.0;
    };
    WernerParams{a, b, sign, 1.0}.validate();
    if (!entangled(1.0)) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (entangled(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Sudden-death time in units of γt. `+inf` means the concurrence only
/// vanishes asymptotically.
struct SuddenDeath {
    double gamma_t = std::numeric_limits<double>::infinity();
    bool finite() const { return std::isfinite(gamma_t); }
};

inline constexpr double kConcurrenceResolution = 1e-12;
inline constexpr double kMarginResolution = 1e-10;

inline SuddenDeath sudden_death_time(const WernerParams& p, const BathParams& bath, double tol = 1e-10) {
    auto c_at = [&](double gamma_t) {
        return concurrence(werner_damped(p, bath, DimensionlessTime::at_gamma_t(gamma_t, bath))).value;
    };
    if (!(c_at(0.0) > 0.0)) throw DomainError("sudden_death_time: state is separable at t = 0");

    // A clamped zero only counts as a crossing when the unclamped margin
    // √λ₁ − √λ₂ − √λ₃ − √λ₄ is clearly negative; a concurrence that decays
    // exponentially reaches 0 through roundoff alone once it falls below ~1e-16.
    auto margin_at = [&](double gamma_t) {
        const auto r = concurrence(werner_damped(p, bath, DimensionlessTime::at_gamma_t(gamma_t, bath)));
        const auto& s = r.sqrt_eigenvalues;
        return s[0] - s[1] - s[2] - s[3];
    };
    double prev = 0.0;
    for (double t = 0.01; t <= 64.0; t *= 2.0) {
        const double c = c_at(t);
        if (c == 0.0 && margin_at(t) < -kMarginResolution) {
            double lo = prev, hi = t;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (c_at(mid) > 0.0 ? lo : hi) = mid;
            }
            return {0.5 * (lo + hi)};
        }
        if (c < kConcurrenceResolution) break;
        prev = t;
    }
    return {};
}

}  // namespace bohmflow
