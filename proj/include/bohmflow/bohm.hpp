#pragma once

// Bohmian velocity field for the damped two-oscillator system, trajectory
// integration, |ψ|²-distributed ensembles and their diagnostics.
//
// Units: positions are x̃ = √(Mω/ħ)·x and velocities are dx̃/dτ with τ = ωt.
// In these units the density-matrix guidance law reads
//   v_α = Im[∂_α ρ]/ρ + g(2n̄+1)/2 · Re[∂_α ρ]/ρ     (evaluated at x′ = x)
// with g = γ/ω. The second piece is the osmotic term.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fockspace.hpp"
#include "integrator.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "types.hpp"
#include "werner.hpp"

namespace bohmflow {

/// 𝒢 (or the envelope-stripped diagonal kernel) below this value is a node.
inline constexpr double kNodeThreshold = 1e-8;

enum class OsmoticTerm { include, drop };

/// Closed-form velocity for the damped Werner state (zero temperature):
///   v₁ = [∓2A sin2τ x̃₂ + g(B x̃₁x̃₂² + (C/2) x̃₁ ± A cos2τ x̃₂)]/𝒢 − g x̃₁/2
/// and the mirrored expression for v₂. The C/2 coefficient is what the
/// density-matrix law produces from the coordinate kernel of the state.
inline Velocity velocity_analytic(const PhasePoint& pt, const WernerParams& p, const BathParams& bath,
                                  OsmoticTerm osmotic = OsmoticTerm::include) {
    if (bath.nbar > 0.0)
        throw UnsupportedTemperatureError("velocity_analytic requires nbar = 0; use velocity_generic");
    const auto t = DimensionlessTime::at_omega_t(pt.omega_t, bath);
    const double G = g_denominator(p, bath, t, pt.x1, pt.x2);
    if (!(G >= kNodeThreshold)) throw NodalSingularity(pt.x1, pt.x2, pt.omega_t, G);

    const auto [A, B, C] = werner_coeffs(p, bath, t);
    const double g = osmotic == OsmoticTerm::include ? bath.gamma_over_omega : 0.0;
    const double s = p.sign;
    const double sn = std::sin(2.0 * pt.omega_t), cs = std::cos(2.0 * pt.omega_t);
    const double x1 = pt.x1, x2 = pt.x2;

    Velocity v;
    v.v1 = (-s * 2.0 * A * sn * x2 + g * (B * x1 * x2 * x2 + 0.5 * C * x1 + s * A * cs * x2)) / G - 0.5 * g * x1;
    v.v2 = (-s * 2.0 * A * sn * x1 + g * (B * x1 * x1 * x2 + 0.5 * C * x2 + s * A * cs * x1)) / G - 0.5 * g * x2;
    return v;
}

/// Density-matrix guidance law evaluated on an arbitrary coordinate kernel.
/// `inverse_mass` is ħ/(Mω) relative to the scaling used for x̃ (1 when the
/// kernel was built in the same units). The kernel carries no time; `pt.omega_t`
/// is only used for diagnostics.
inline Velocity velocity_generic(const CoordinateKernel& kernel, const PhasePoint& pt, const BathParams& bath,
                                 double inverse_mass = 1.0, OsmoticTerm osmotic = OsmoticTerm::include) {
    bath.validate();
    const double x1 = pt.x1, x2 = pt.x2;
    const cplx poly = kernel.polynomial(x1, x2, x1, x2);
    if (!(poly.real() >= kNodeThreshold))
        throw NodalSingularity(x1, x2, pt.omega_t, poly.real() * CoordinateKernel::envelope(x1, x2, x1, x2));
    const auto dp = kernel.polynomial_gradient(x1, x2, x1, x2);
    // ∂_α ρ / ρ with the Gaussian envelope divided out.
    const cplx r1 = (dp[0] - x1 * poly) / poly;
    const cplx r2 = (dp[1] - x2 * poly) / poly;
    const double diffusion = osmotic == OsmoticTerm::include
                                 ? 0.5 * bath.gamma_over_omega * (2.0 * bath.nbar + 1.0)
                                 : 0.0;
    return {inverse_mass * (r1.imag() + diffusion * r1.real()), inverse_mass * (r2.imag() + diffusion * r2.real())};
}

/// Integrated path of one configuration.
struct Trajectory {
    std::vector<double> omega_t;
    std::vector<double> x1;
    std::vector<double> x2;

    WernerParams params;
    BathParams bath;
    double tol = 0.0;
    std::uint64_t seed = 0;

    bool truncated = false;
    PhasePoint last_good;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    double min_step = 0.0;
    double max_step = 0.0;

    std::size_t size() const { return omega_t.size(); }
};

struct TrajectoryOptions {
    double tol = 1e-9;
    double fixed_step = 0.0;
    OsmoticTerm osmotic = OsmoticTerm::include;
};

/// Integrates the closed-form velocity from `init` to `omega_t_end`, sampling
/// at `sample_times` (ascending; the endpoint is always recorded). A run that
/// stalls at a node comes back with `truncated` set and the last good point.
inline Trajectory integrate_trajectory(const PhasePoint& init, const WernerParams& p, const BathParams& bath,
                                       double omega_t_end, std::span<const double> sample_times,
                                       const TrajectoryOptions& options = {}) {
    p.validate();
    bath.validate();
    std::vector<double> samples(sample_times.begin(), sample_times.end());
    if (samples.empty() || samples.back() < omega_t_end) samples.push_back(omega_t_end);
    std::sort(samples.begin(), samples.end());

    auto rhs = [&](double tau, const Vec2& y) -> Vec2 {
        const auto v = velocity_analytic({y[0], y[1], tau}, p, bath, options.osmotic);
        return {v.v1, v.v2};
    };
    IntegratorOptions io;
    io.tol = options.tol;
    io.fixed_step = options.fixed_step;
    const auto res = integrate_dopri5(rhs, init.omega_t, {init.x1, init.x2}, omega_t_end, samples, io);

    Trajectory tr;
    tr.params = p;
    tr.bath = bath;
    tr.tol = options.tol;
    tr.truncated = res.truncated;
    tr.last_good = {res.last_state[0], res.last_state[1], res.last_time};
    tr.accepted_steps = res.accepted_steps;
    tr.rejected_steps = res.rejected_steps;
    tr.min_step = res.min_step;
    tr.max_step = res.max_step;
    tr.omega_t = res.times;
    tr.x1.reserve(res.states.size());
    tr.x2.reserve(res.states.size());
    for (const auto& s : res.states) {
        tr.x1.push_back(s[0]);
        tr.x2.push_back(s[1]);
    }
    return tr;
}

/// Evenly spaced sample times t0, t0+dt, ..., t_end (t_end always included).
inline std::vector<double> sample_grid(double t0, double t_end, double dt) {
    std::vector<double> out;
    if (!(dt > 0.0)) throw ParameterError("sample spacing must be positive");
    const auto n = static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9));
    out.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) out.push_back(t0 + static_cast<double>(i) * dt);
    if (out.back() < t_end - 1e-12) out.push_back(t_end);
    return out;
}

/// x̃₁(0) ∈ {−1.5,−1,−0.5,0.5,1,1.5}, x̃₂(0) = x̃₁(0) + 0.25, τ₀ = 0.
inline std::vector<PhasePoint> default_initial_grid() {
    std::vector<PhasePoint> pts;
    for (double x : {-1.5, -1.0, -0.5, 0.5, 1.0, 1.5}) pts.push_back({x, x + 0.25, 0.0});
    return pts;
}

/// Initial condition used for amplitude scans.
inline constexpr PhasePoint kDefaultAmplitudeInit{1.0, 1.25, 0.0};

inline constexpr double kSamplingBox = 4.0;

namespace detail {

/// Upper bound of the diagonal density over the plane: each monomial
/// |x|^m e^{−x²} is bounded by 1, 1/√(2e), 1/e for m = 0, 1, 2.
inline double density_bound(const CoordinateKernel& k) {
    const double mono[3] = {1.0, 1.0 / std::sqrt(2.0 * std::numbers::e), 1.0 / std::numbers::e};
    double bound = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int kk = 0; kk < 2; ++kk)
                for (int l = 0; l < 2; ++l) bound += std::abs(k.coefficient(i, j, kk, l)) * mono[i + kk] * mono[j + l];
    return bound / std::numbers::pi;
}

}  // namespace detail

/// Rejection sampling of the diagonal density on [−4,4]². Point i uses its own
/// seed-derived stream, so the result is independent of the thread count.
inline std::vector<PhasePoint> sample_from_kernel(const CoordinateKernel& kernel, std::size_t n, std::uint64_t seed,
                                                  double omega_t = 0.0, Parallelism par = Parallelism::from_environment()) {
    if (n < 1) throw ParameterError("ensemble size must be >= 1");
    const double bound = detail::density_bound(kernel);
    std::vector<PhasePoint> pts(n);
    constexpr std::size_t kMinAttempts = 1'000'000;
    parallel_for(n, par, [&](std::size_t i) {
        RandomStream rng(seed, i);
        for (std::size_t attempt = 1;; ++attempt) {
            const double x1 = rng.uniform(-kSamplingBox, kSamplingBox);
            const double x2 = rng.uniform(-kSamplingBox, kSamplingBox);
            const double u = rng.uniform() * bound;
            if (u < diagonal_density(kernel, x1, x2)) {
                pts[i] = {x1, x2, omega_t};
                return;
            }
            if (attempt >= kMinAttempts)
                throw SamplingFailure("rejection sampling acceptance rate fell below 1e-4");
        }
    });
    return pts;
}

/// |ψ|²-distributed configurations of the Werner state at τ = 0.
inline std::vector<PhasePoint> sample_initial_ensemble(const WernerParams& p, const BathParams& bath, std::size_t n,
                                                       std::uint64_t seed,
                                                       Parallelism par = Parallelism::from_environment()) {
    bath.validate();
    return sample_from_kernel(kernel_from_matrix(werner_initial(p)), n, seed, 0.0, par);
}

/// Integrates each point to `omega_t_end`; entry i is the trajectory of point i.
inline std::vector<Trajectory> integrate_ensemble(std::span<const PhasePoint> init, const WernerParams& p,
                                                  const BathParams& bath, double omega_t_end,
                                                  std::span<const double> sample_times,
                                                  const TrajectoryOptions& options = {},
                                                  Parallelism par = Parallelism::from_environment()) {
    std::vector<Trajectory> out(init.size());
    parallel_for(init.size(), par, [&](std::size_t i) {
        out[i] = integrate_trajectory(init[i], p, bath, omega_t_end, sample_times, options);
    });
    return out;
}

struct HistogramComparison {
    double distance = 0.0;     ///< half L1 distance, including out-of-box mass
    double noise_floor = 0.0;  ///< expected distance of a perfect sample of the same size
};

/// Histogram of `points` on bins×bins cells over [−4,4]² versus the cell
/// masses of the diagonal density of `kernel` (6×6 Gauss–Legendre per cell).
inline HistogramComparison compare_to_density(std::span<const Vec2> points, const CoordinateKernel& kernel,
                                              int bins) {
    if (bins < 1) throw ParameterError("bins must be >= 1");
    static constexpr std::array<double, 6> gx = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                                 0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
    static constexpr std::array<double, 6> gw = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                                 0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
    const double width = 2.0 * kSamplingBox / bins;
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<double> counts(nb * nb, 0.0);
    double outside = 0.0;
    for (const auto& pt : points) {
        const double f1 = (pt[0] + kSamplingBox) / width, f2 = (pt[1] + kSamplingBox) / width;
        if (f1 < 0.0 || f2 < 0.0 || f1 >= bins || f2 >= bins) {
            outside += 1.0;
            continue;
        }
        counts[static_cast<std::size_t>(f1) * nb + static_cast<std::size_t>(f2)] += 1.0;
    }
    const double n = static_cast<double>(points.size());
    HistogramComparison cmp;
    double inside_mass = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const double lo1 = -kSamplingBox + static_cast<double>(i) * width;
            const double lo2 = -kSamplingBox + static_cast<double>(j) * width;
            double mass = 0.0;
            for (std::size_t a = 0; a < gx.size(); ++a)
                for (std::size_t b = 0; b < gx.size(); ++b)
                    mass += gw[a] * gw[b] *
                            diagonal_density(kernel, lo1 + 0.5 * width * (gx[a] + 1.0), lo2 + 0.5 * width * (gx[b] + 1.0));
            mass *= 0.25 * width * width;
            inside_mass += mass;
            cmp.distance += std::abs(counts[i * nb + j] / n - mass);
            cmp.noise_floor += std::sqrt(2.0 * mass * std::max(0.0, 1.0 - mass) / (std::numbers::pi * n));
        }
    cmp.distance += std::abs(outside / n - std::max(0.0, 1.0 - inside_mass));
    cmp.distance *= 0.5;
    cmp.noise_floor *= 0.5;
    return cmp;
}

struct EquivarianceReport {
    double distance = 0.0;
    double noise_floor = 0.0;
    std::size_t trajectories = 0;
    std::size_t truncated = 0;
};

struct EquivarianceOptions {
    int bins = 40;
    std::uint64_t seed = 1;
    TrajectoryOptions trajectory{1e-8, 0.0, OsmoticTerm::include};
};

/// Transports a |ψ|²-distributed ensemble to `omega_t_check` and measures the
/// total-variation distance of its histogram to the evolved density.
inline EquivarianceReport equivariance_distance(const WernerParams& p, const BathParams& bath, std::size_t n,
                                                double omega_t_check, const EquivarianceOptions& opt = {},
                                                Parallelism par = Parallelism::from_environment()) {
    if (n < 1000) throw ParameterError("equivariance_distance needs at least 1000 trajectories");
    const auto init = sample_initial_ensemble(p, bath, n, opt.seed, par);
    const std::array<double, 1> when = {omega_t_check};
    const auto ens = integrate_ensemble(init, p, bath, omega_t_check, when, opt.trajectory, par);

    EquivarianceReport rep;
    rep.trajectories = n;
    std::vector<Vec2> finals;
    finals.reserve(n);
    for (const auto& tr : ens) {
        if (tr.truncated)
            ++rep.truncated;
        else
            finals.push_back({tr.x1.back(), tr.x2.back()});
    }
    if (static_cast<double>(rep.truncated) > 0.01 * static_cast<double>(n))
        throw DiagnosticFailure("more than 1% of trajectories truncated at nodes (" + std::to_string(rep.truncated) + ")",
                                rep.truncated);
    const auto rho = werner_damped(p, bath, DimensionlessTime::at_omega_t(omega_t_check, bath));
    const auto cmp = compare_to_density(finals, kernel_from_matrix(rho), opt.bins);
    rep.distance = cmp.distance;
    rep.noise_floor = cmp.noise_floor;
    return rep;
}

/// max_τ |x̃₁(τ) − x̃₁(0)| along the trajectory from `init`, sampled every `sample_dt`.
inline double amplitude_metric(const WernerParams& p, const BathParams& bath, const PhasePoint& init,
                               double omega_t_end, double tol = 1e-10, double sample_dt = 0.01) {
    const auto samples = sample_grid(init.omega_t, omega_t_end, sample_dt);
    const auto tr = integrate_trajectory(init, p, bath, omega_t_end, samples, {tol});
    if (tr.truncated)
        throw NodalSingularity(tr.last_good.x1, tr.last_good.x2, tr.last_good.omega_t,
                               g_denominator(p, bath, DimensionlessTime::at_omega_t(tr.last_good.omega_t, bath),
                                             tr.last_good.x1, tr.last_good.x2));
    double amp = 0.0;
    for (double x : tr.x1) amp = std::max(amp, std::abs(x - init.x1));
    return amp;
}

}  // namespace bohmflow
