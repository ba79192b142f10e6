#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bohmflow/bohm.hpp"

using namespace bohmflow;

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kPi = std::numbers::pi;

WernerParams bell(double eps, int sign = +1) { return {kInvSqrt2, kInvSqrt2, sign, eps}; }

Velocity generic_at(const WernerParams& p, const BathParams& bath, const PhasePoint& pt,
                    OsmoticTerm osmotic = OsmoticTerm::include) {
    const auto rho = werner_damped(p, bath, DimensionlessTime::at_omega_t(pt.omega_t, bath));
    return velocity_generic(kernel_from_matrix(rho), pt, bath, 1.0, osmotic);
}

}  // namespace

TEST(VelocityAnalytic, ReferencePoints) {
    const BathParams undamped{0.0, 0.0};
    auto v = velocity_analytic({0.0, 0.5, kPi / 4}, bell(1.0), undamped);
    EXPECT_NEAR(v.v1, -1.0, 1e-14);
    EXPECT_NEAR(v.v2, 0.0, 1e-14);
    // At τ = 0 the undamped velocity vanishes everywhere.
    v = velocity_analytic({0.7, -1.3, 0.0}, bell(0.6), undamped);
    EXPECT_EQ(v.v1, 0.0);
    EXPECT_EQ(v.v2, 0.0);
    // A maximally mixed state has no current.
    v = velocity_analytic({0.7, -1.3, 2.1}, WernerParams::from_a(0.3, 1, 0.0), undamped);
    EXPECT_EQ(v.v1, 0.0);
    EXPECT_EQ(v.v2, 0.0);
}

TEST(VelocityAnalytic, DampedVacuumRelaxesTowardOrigin) {
    // Long after the excitations decay only the ground state is left, whose
    // phase is flat; the osmotic term alone drifts configurations as −g x̃/2.
    const BathParams bath{0.2, 0.0};
    const auto v = velocity_analytic({0.8, -0.4, 400.0}, bell(0.9), bath);
    EXPECT_NEAR(v.v1, -0.08, 1e-12);
    EXPECT_NEAR(v.v2, 0.04, 1e-12);
}

TEST(VelocityAnalytic, NodeThrows) {
    const BathParams undamped{0.0, 0.0};
    EXPECT_THROW(velocity_analytic({1.0, 0.5, kPi / 2}, bell(1.0), undamped), NodalSingularity);
    EXPECT_THROW(velocity_analytic({0.0, 0.0, 1.0}, bell(0.5), BathParams{0.1, 0.2}), UnsupportedTemperatureError);
}

TEST(VelocityGeneric, AgreesWithAnalyticEverywhere) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int compared = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const WernerParams p = WernerParams::from_a(u(rng), u(rng) < 0.5 ? -1 : 1, u(rng));
        const BathParams bath{0.5 * u(rng), 0.0};
        const PhasePoint pt{6 * u(rng) - 3, 6 * u(rng) - 3, 10 * u(rng)};
        const auto t = DimensionlessTime::at_omega_t(pt.omega_t, bath);
        if (g_denominator(p, bath, t, pt.x1, pt.x2) < 1e-2) continue;
        for (auto osm : {OsmoticTerm::include, OsmoticTerm::drop}) {
            const auto va = velocity_analytic(pt, p, bath, osm);
            const auto vg = generic_at(p, bath, pt, osm);
            const double scale = std::max({std::abs(va.v1), std::abs(va.v2), 1e-6});
            EXPECT_LT(std::abs(va.v1 - vg.v1) / scale, 1e-10);
            EXPECT_LT(std::abs(va.v2 - vg.v2) / scale, 1e-10);
        }
        ++compared;
    }
    EXPECT_GT(compared, 1500);
}

TEST(VelocityGeneric, InverseMassScalesLinearly) {
    const BathParams bath{0.1, 0.0};
    const PhasePoint pt{0.3, -0.2, 0.9};
    const auto k = kernel_from_matrix(werner_damped(bell(0.8), bath, DimensionlessTime::at_omega_t(0.9, bath)));
    const auto v1 = velocity_generic(k, pt, bath, 1.0);
    const auto v3 = velocity_generic(k, pt, bath, 3.0);
    EXPECT_NEAR(v3.v1, 3.0 * v1.v1, 1e-14);
    EXPECT_NEAR(v3.v2, 3.0 * v1.v2, 1e-14);
}

TEST(VelocityGeneric, ThermalDiffusionEntersOnlyOsmoticTerm) {
    // With the same kernel, n̄ only rescales the Re(∂ρ/ρ) contribution.
    const auto k = kernel_from_matrix(werner_initial(bell(0.8)));
    const PhasePoint pt{0.4, 0.9, 0.0};
    const auto cold = velocity_generic(k, pt, {0.2, 0.0});
    const auto warm = velocity_generic(k, pt, {0.2, 1.0});
    const auto none = velocity_generic(k, pt, {0.2, 0.0}, 1.0, OsmoticTerm::drop);
    EXPECT_NEAR(warm.v1 - none.v1, 3.0 * (cold.v1 - none.v1), 1e-13);
    EXPECT_NEAR(warm.v2 - none.v2, 3.0 * (cold.v2 - none.v2), 1e-13);
}

TEST(VelocitySymmetry, ParitySwapAndSign) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const WernerParams p = WernerParams::from_a(u(rng), 1, u(rng));
        WernerParams flipped = p;
        flipped.sign = -1;
        const BathParams bath{0.5 * u(rng), 0.0};
        const double x1 = 4 * u(rng) - 2, x2 = 4 * u(rng) - 2, wt = 10 * u(rng);
        if (g_denominator(p, bath, DimensionlessTime::at_omega_t(wt, bath), x1, x2) < 1e-3) continue;
        if (g_denominator(p, bath, DimensionlessTime::at_omega_t(wt, bath), x1, -x2) < 1e-3) continue;
        const auto v = velocity_analytic({x1, x2, wt}, p, bath);
        const auto vp = velocity_analytic({-x1, -x2, wt}, p, bath);
        const auto vs = velocity_analytic({x2, x1, wt}, p, bath);
        const auto vf = velocity_analytic({x1, -x2, wt}, flipped, bath);
        EXPECT_NEAR(vp.v1, -v.v1, 1e-12);
        EXPECT_NEAR(vp.v2, -v.v2, 1e-12);
        EXPECT_NEAR(vs.v1, v.v2, 1e-12);
        EXPECT_NEAR(vs.v2, v.v1, 1e-12);
        EXPECT_NEAR(vf.v1, v.v1, 1e-12);
        EXPECT_NEAR(vf.v2, -v.v2, 1e-12);
    }
}

TEST(Trajectory, UndampedFlowConservesHyperbolicInvariant) {
    // With γ = 0, v₁ ∝ x̃₂ and v₂ ∝ x̃₁ with the same factor, so x̃₁² − x̃₂² is constant.
    const auto samples = sample_grid(0.0, 10.0, 0.1);
    for (const auto& init : default_initial_grid()) {
        const auto tr = integrate_trajectory(init, bell(0.6), {0.0, 0.0}, 10.0, samples, {1e-11});
        ASSERT_FALSE(tr.truncated);
        const double inv0 = init.x1 * init.x1 - init.x2 * init.x2;
        for (std::size_t i = 0; i < tr.size(); ++i)
            EXPECT_NEAR(tr.x1[i] * tr.x1[i] - tr.x2[i] * tr.x2[i], inv0, 1e-8);
    }
}

TEST(Trajectory, DiagonalStaysOnDiagonal) {
    const auto samples = sample_grid(0.0, 6.0, 0.5);
    const auto tr = integrate_trajectory({0.7, 0.7, 0.0}, bell(0.5), {0.1, 0.0}, 6.0, samples);
    ASSERT_FALSE(tr.truncated);
    for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_NEAR(tr.x1[i], tr.x2[i], 1e-12);
}

TEST(Trajectory, ToleranceRefinementConverges) {
    const std::array<double, 1> end = {8.0};
    const auto ref = integrate_trajectory({1.0, 1.25, 0.0}, bell(0.8), {0.1, 0.0}, 8.0, end, {1e-12});
    const auto loose = integrate_trajectory({1.0, 1.25, 0.0}, bell(0.8), {0.1, 0.0}, 8.0, end, {1e-7});
    const auto tight = integrate_trajectory({1.0, 1.25, 0.0}, bell(0.8), {0.1, 0.0}, 8.0, end, {1e-9});
    const double e_loose = std::hypot(loose.x1.back() - ref.x1.back(), loose.x2.back() - ref.x2.back());
    const double e_tight = std::hypot(tight.x1.back() - ref.x1.back(), tight.x2.back() - ref.x2.back());
    EXPECT_LT(e_tight, e_loose);
    EXPECT_LT(e_tight, 1e-6);
}

TEST(Trajectory, MaximallyMixedUndampedIsStatic) {
    const auto samples = sample_grid(0.0, 5.0, 1.0);
    const auto tr = integrate_trajectory({0.3, -1.1, 0.0}, WernerParams::from_a(0.4, 1, 0.0), {0.0, 0.0}, 5.0, samples);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_EQ(tr.x1[i], 0.3);
        EXPECT_EQ(tr.x2[i], -1.1);
    }
}

TEST(Trajectory, SampleGridIncludesEndpoint) {
    const auto g = sample_grid(0.0, 1.0, 0.3);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_THROW(sample_grid(0.0, 1.0, 0.0), ParameterError);
}

TEST(Sampling, MomentsOfMaximallyMixedState) {
    const auto pts = sample_initial_ensemble(WernerParams::from_a(0.5, 1, 0.0), {0.1, 0.0}, 20000, 7, {1});
    double m1 = 0, m2 = 0, c12 = 0;
    for (const auto& p : pts) {
        m1 += p.x1;
        m2 += p.x1 * p.x1;
        c12 += p.x1 * p.x2;
    }
    m1 /= pts.size();
    m2 /= pts.size();
    c12 /= pts.size();
    EXPECT_NEAR(m1, 0.0, 0.03);
    EXPECT_NEAR(m2, 1.0, 0.04);
    EXPECT_NEAR(c12, 0.0, 0.04);
}

TEST(Sampling, CorrelationOfBellState) {
    // ⟨x̃₁x̃₂⟩ = sign·εab·2·(1/2) for the Werner state at τ = 0.
    const auto pts = sample_initial_ensemble(bell(1.0, -1), {0.0, 0.0}, 20000, 8, {1});
    double c12 = 0;
    for (const auto& p : pts) c12 += p.x1 * p.x2;
    EXPECT_NEAR(c12 / pts.size(), -0.5, 0.04);
}

TEST(Sampling, IndependentOfThreadCount) {
    const auto a = sample_initial_ensemble(bell(0.4), {0.1, 0.0}, 500, 99, {1});
    const auto b = sample_initial_ensemble(bell(0.4), {0.1, 0.0}, 500, 99, {4});
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x1, b[i].x1);
        EXPECT_EQ(a[i].x2, b[i].x2);
    }
    const auto c = sample_initial_ensemble(bell(0.4), {0.1, 0.0}, 500, 100, {1});
    EXPECT_NE(a[0].x1, c[0].x1);
}

TEST(Sampling, DirectSampleSitsAtNoiseFloor) {
    const auto k = kernel_from_matrix(werner_initial(bell(0.4)));
    const auto pts = sample_from_kernel(k, 20000, 3, 0.0, {1});
    std::vector<Vec2> xy;
    for (const auto& p : pts) xy.push_back({p.x1, p.x2});
    const auto cmp = compare_to_density(xy, k, 20);
    EXPECT_LT(cmp.distance, 1.3 * cmp.noise_floor);
    EXPECT_GT(cmp.distance, 0.5 * cmp.noise_floor);
}

TEST(Equivariance, UndampedEnsembleTracksDensity) {
    EquivarianceOptions opt;
    opt.bins = 20;
    const auto rep = equivariance_distance(bell(0.4), {0.0, 0.0}, 10000, 2.0, opt, {1});
    EXPECT_EQ(rep.truncated, 0u);
    EXPECT_LT(rep.distance, 1.3 * rep.noise_floor);
}

// Characterization: with damping the osmotic drift does not transport |ψ|²,
// so the histogram separates from the evolved density beyond sampling noise.
TEST(Equivariance, DampedEnsembleDriftsAwayFromDensity) {
    EquivarianceOptions opt;
    opt.bins = 20;
    const auto rep = equivariance_distance(bell(0.4), {0.1, 0.0}, 10000, 5.0, opt, {1});
    EXPECT_GT(rep.distance, 1.5 * rep.noise_floor);
}

TEST(Equivariance, RejectsSmallEnsembles) {
    EXPECT_THROW(equivariance_distance(bell(0.4), {0.1, 0.0}, 999, 1.0), ParameterError);
}

TEST(Amplitude, ReferenceValuesUndamped) {
    const BathParams undamped{0.0, 0.0};
    const std::pair<double, double> table[] = {
        {0.0, 0.0}, {0.1, 0.0413}, {1.0 / 3.0, 0.1508}, {0.4, 0.1886}, {0.7, 0.488}, {1.0, 0.9728}};
    for (auto [eps, amp] : table)
        EXPECT_NEAR(amplitude_metric(bell(eps), undamped, kDefaultAmplitudeInit, 20.0), amp, 2e-3) << eps;
}

TEST(Amplitude, GrowsWithMixingParameter) {
    const BathParams undamped{0.0, 0.0};
    double prev = -1.0;
    for (int i = 0; i <= 10; ++i) {
        const double amp = amplitude_metric(bell(i / 10.0), undamped, kDefaultAmplitudeInit, 20.0);
        EXPECT_GT(amp, prev);
        prev = amp;
    }
}
