#pragma once

#include <array>
#include <cmath>

#include "errors.hpp"

namespace bohmflow {

/// Reservoir description shared by both oscillators (equal ω and γ).
struct BathParams {
    double gamma_over_omega = 0.0;  ///< g = γ/ω
    double nbar = 0.0;              ///< thermal occupation n̄

    void validate() const {
        if (!(gamma_over_omega >= 0.0) || !std::isfinite(gamma_over_omega))
            throw ParameterError("gamma_over_omega must be finite and >= 0");
        if (!(nbar >= 0.0) || !std::isfinite(nbar))
            throw ParameterError("nbar must be finite and >= 0");
    }
};

/// A time instant carried as the pair (ωt, γt). Oscillation phases use
/// `omega_t`, decay factors use `gamma_t`.
struct DimensionlessTime {
    double omega_t = 0.0;
    double gamma_t = 0.0;

    static DimensionlessTime at_omega_t(double omega_t, const BathParams& bath) {
        return {omega_t, bath.gamma_over_omega * omega_t};
    }

    /// With γ = 0 there is no γt clock; ωt is then pinned to 0.
    static DimensionlessTime at_gamma_t(double gamma_t, const BathParams& bath) {
        const double g = bath.gamma_over_omega;
        return {g > 0.0 ? gamma_t / g : 0.0, gamma_t};
    }
};

/// Configuration point (x̃₁, x̃₂) at dimensionless time τ = ωt.
struct PhasePoint {
    double x1 = 0.0;
    double x2 = 0.0;
    double omega_t = 0.0;
};

/// Velocity pair in units of dx̃/d(ωt).
struct Velocity {
    double v1 = 0.0;
    double v2 = 0.0;
};

using Vec2 = std::array<double, 2>;

}  // namespace bohmflow
