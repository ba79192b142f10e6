#pragma once

// Lattice ("beable") realisation of the guidance law: sites n·h per axis,
// probabilities P, nearest-neighbour probability currents J, the minimal
// jump rates T = max(J,0)/P and a fixed-step Markov jump simulation whose
// mean displacement per unit time tends to the continuum velocity as h → 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bohm.hpp"
#include "errors.hpp"
#include "fockspace.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "types.hpp"
#include "werner.hpp"

namespace bohmflow {

struct LatticeSpec {
    double h = 0.1;      ///< lattice spacing (dimensionless)
    int half_extent = 40;  ///< sites n ∈ [−N, N] per axis

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("lattice.h must be positive");
        if (half_extent < 4) throw ParameterError("lattice.half_extent must be >= 4");
        if (half_extent * h < kSamplingBox - 1e-12)
            throw ParameterError("lattice must cover [-4,4]: half_extent * h >= 4");
    }
    int width() const { return 2 * half_extent + 1; }
    std::size_t sites() const { return static_cast<std::size_t>(width()) * static_cast<std::size_t>(width()); }
    double coordinate(int n) const { return n * h; }
    bool contains(int n1, int n2) const {
        return std::abs(n1) <= half_extent && std::abs(n2) <= half_extent;
    }
    std::size_t index(int n1, int n2) const {
        return static_cast<std::size_t>(n1 + half_extent) * static_cast<std::size_t>(width()) +
               static_cast<std::size_t>(n2 + half_extent);
    }
    /// Site nearest to a continuum point.
    std::array<int, 2> nearest(double x1, double x2) const {
        return {static_cast<int>(std::lround(x1 / h)), static_cast<int>(std::lround(x2 / h))};
    }
};

struct LatticeSite {
    int n1 = 0;
    int n2 = 0;
    friend bool operator==(const LatticeSite&, const LatticeSite&) = default;
};

struct LatticeState {
    LatticeSite site;
    double omega_t = 0.0;
};

/// Per-site values on a LatticeSpec, site-major in (n1, n2).
struct LatticeField {
    LatticeSpec spec;
    std::vector<double> values;

    double at(int n1, int n2) const { return values[spec.index(n1, n2)]; }
    double total() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

/// P_{n₁n₂} = ρ(n₁h, n₂h)·h².
inline LatticeField lattice_probabilities(const WernerParams& p, const BathParams& bath, double omega_t,
                                          const LatticeSpec& spec) {
    spec.validate();
    const auto kernel = kernel_from_matrix(werner_damped(p, bath, DimensionlessTime::at_omega_t(omega_t, bath)));
    LatticeField f{spec, std::vector<double>(spec.sites())};
    for (int n1 = -spec.half_extent; n1 <= spec.half_extent; ++n1)
        for (int n2 = -spec.half_extent; n2 <= spec.half_extent; ++n2)
            f.values[spec.index(n1, n2)] =
                diagonal_density(kernel, spec.coordinate(n1), spec.coordinate(n2)) * spec.h * spec.h;
    return f;
}

/// Directions of the four nearest neighbours.
enum Direction : int { plus1 = 0, minus1 = 1, plus2 = 2, minus2 = 3 };
inline constexpr std::array<std::array<int, 2>, 4> kSteps = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

/// Probability currents on bonds. `axis1[index(n1,n2)]` is the current from
/// (n1,n2) to (n1+1,n2) and `axis2` likewise along n2. Values are evaluated
/// at the bond midpoint: J = ρ(mid)·v_α(mid)·h, which makes
/// J(site→nbr) = −J(nbr→site) hold exactly. Bonds leaving the lattice carry 0.
struct LatticeCurrents {
    LatticeSpec spec;
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::size_t nodal_bonds = 0;

    /// Current from `site` to its neighbour in direction `dir`.
    double out_of(int n1, int n2, Direction dir) const {
        switch (dir) {
            case plus1: return n1 < spec.half_extent ? axis1[spec.index(n1, n2)] : 0.0;
            case minus1: return n1 > -spec.half_extent ? -axis1[spec.index(n1 - 1, n2)] : 0.0;
            case plus2: return n2 < spec.half_extent ? axis2[spec.index(n1, n2)] : 0.0;
            case minus2: return n2 > -spec.half_extent ? -axis2[spec.index(n1, n2 - 1)] : 0.0;
        }
        return 0.0;
    }
};

inline LatticeCurrents lattice_current(const WernerParams& p, const BathParams& bath, double omega_t,
                                       const LatticeSpec& spec, OsmoticTerm osmotic = OsmoticTerm::include) {
    spec.validate();
    const auto kernel = kernel_from_matrix(werner_damped(p, bath, DimensionlessTime::at_omega_t(omega_t, bath)));
    LatticeCurrents c{spec, std::vector<double>(spec.sites(), 0.0), std::vector<double>(spec.sites(), 0.0), 0};
    auto bond = [&](double x1, double x2, int axis) {
        try {
            const auto v = velocity_analytic({x1, x2, omega_t}, p, bath, osmotic);
            return diagonal_density(kernel, x1, x2) * (axis == 1 ? v.v1 : v.v2) * spec.h;
        } catch (const NodalSingularity&) {
            ++c.nodal_bonds;
            return 0.0;
        }
    };
    const int N = spec.half_extent;
    for (int n1 = -N; n1 <= N; ++n1)
        for (int n2 = -N; n2 <= N; ++n2) {
            const double x1 = spec.coordinate(n1), x2 = spec.coordinate(n2);
            if (n1 < N) c.axis1[spec.index(n1, n2)] = bond(x1 + 0.5 * spec.h, x2, 1);
            if (n2 < N) c.axis2[spec.index(n1, n2)] = bond(x1, x2 + 0.5 * spec.h, 2);
        }
    return c;
}

/// Jump rates out of every site, indexed [site][Direction].
struct TransitionRates {
    LatticeSpec spec;
    std::vector<std::array<double, 4>> rates;

    const std::array<double, 4>& at(int n1, int n2) const { return rates[spec.index(n1, n2)]; }
    double exit_rate(int n1, int n2) const {
        const auto& r = at(n1, n2);
        return r[0] + r[1] + r[2] + r[3];
    }
    double max_exit_rate() const {
        double m = 0.0;
        for (const auto& r : rates) m = std::max(m, r[0] + r[1] + r[2] + r[3]);
        return m;
    }
};

/// Minimal solution of J = T₊P_m − T₋P_n: T = J/P(source) for J > 0, else 0.
inline TransitionRates transition_rates(const LatticeCurrents& currents, const LatticeField& probabilities) {
    const auto& spec = currents.spec;
    TransitionRates t{spec, std::vector<std::array<double, 4>>(spec.sites())};
    const int N = spec.half_extent;
    for (int n1 = -N; n1 <= N; ++n1)
        for (int n2 = -N; n2 <= N; ++n2) {
            const double P = probabilities.at(n1, n2);
            auto& r = t.rates[spec.index(n1, n2)];
            for (int d = 0; d < 4; ++d) {
                const double J = currents.out_of(n1, n2, static_cast<Direction>(d));
                if (!(J > 0.0)) {
                    r[d] = 0.0;
                    continue;
                }
                if (!(P > 0.0))
                    throw RateSingularity("positive current out of zero-probability site (" + std::to_string(n1) +
                                          ", " + std::to_string(n2) + ")");
                r[d] = J / P;
            }
        }
    return t;
}

/// max over bonds of |T(m→n)P_m − T(n→m)P_n − J(m→n)|.
inline double flux_reconstruction_error(const TransitionRates& rates, const LatticeField& probabilities,
                                        const LatticeCurrents& currents) {
    const auto& spec = rates.spec;
    const int N = spec.half_extent;
    double worst = 0.0;
    for (int n1 = -N; n1 <= N; ++n1)
        for (int n2 = -N; n2 <= N; ++n2) {
            const double Pm = probabilities.at(n1, n2);
            if (n1 < N) {
                const double rebuilt = rates.at(n1, n2)[plus1] * Pm - rates.at(n1 + 1, n2)[minus1] * probabilities.at(n1 + 1, n2);
                worst = std::max(worst, std::abs(rebuilt - currents.axis1[spec.index(n1, n2)]));
            }
            if (n2 < N) {
                const double rebuilt = rates.at(n1, n2)[plus2] * Pm - rates.at(n1, n2 + 1)[minus2] * probabilities.at(n1, n2 + 1);
                worst = std::max(worst, std::abs(rebuilt - currents.axis2[spec.index(n1, n2)]));
            }
        }
    return worst;
}

/// Rate table of the Werner state at time τ.
inline TransitionRates rates_at(const WernerParams& p, const BathParams& bath, double omega_t, const LatticeSpec& spec,
                                OsmoticTerm osmotic = OsmoticTerm::include) {
    return transition_rates(lattice_current(p, bath, omega_t, spec, osmotic), lattice_probabilities(p, bath, omega_t, spec));
}

/// Walker positions recorded every `record_stride` steps.
struct BeableEnsemble {
    std::vector<double> omega_t;                 ///< recorded times
    std::vector<std::vector<LatticeSite>> paths;  ///< paths[walker][record]
    double dt = 0.0;
    double max_exit_probability = 0.0;            ///< over visited sites and steps

    std::size_t walkers() const { return paths.size(); }
};

struct BeableOptions {
    std::size_t record_stride = 1;
    /// When set, every walker starts here instead of being drawn from P(τ = 0).
    std::optional<LatticeSite> start;
    OsmoticTerm osmotic = OsmoticTerm::include;
};

/// Draws the initial site of walker i from the lattice probabilities.
inline std::vector<LatticeSite> sample_lattice_sites(const LatticeField& probs, std::size_t n, std::uint64_t seed) {
    std::vector<double> cdf(probs.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = (acc += probs.values[i]);
    std::vector<LatticeSite> out(n);
    const int W = probs.spec.width(), N = probs.spec.half_extent;
    for (std::size_t w = 0; w < n; ++w) {
        // Stream index offset keeps initial draws independent of the jump streams.
        RandomStream rng(seed, (std::uint64_t{1} << 62) + w);
        const double u = rng.uniform() * acc;
        auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        k = std::min(k, cdf.size() - 1);
        out[w] = {static_cast<int>(k / static_cast<std::size_t>(W)) - N, static_cast<int>(k % static_cast<std::size_t>(W)) - N};
    }
    return out;
}

/// Fixed-step Bernoulli jump process: in each step of length dt a walker at a
/// site jumps to neighbour k with probability T_k·dt (rates taken at the start
/// of the step), otherwise it stays. Boundary sites never jump outward.
inline BeableEnsemble simulate_beables(const WernerParams& p, const BathParams& bath, const LatticeSpec& spec,
                                       std::size_t n_walkers, double dt, double omega_t_end, std::uint64_t seed,
                                       const BeableOptions& opt = {},
                                       Parallelism par = Parallelism::from_environment()) {
    spec.validate();
    if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
    if (n_walkers < 1) throw ParameterError("n_walkers must be >= 1");
    const auto steps = static_cast<std::size_t>(std::llround(omega_t_end / dt));
    const std::size_t stride = std::max<std::size_t>(1, opt.record_stride);

    std::vector<LatticeSite> current =
        opt.start ? std::vector<LatticeSite>(n_walkers, *opt.start)
                  : sample_lattice_sites(lattice_probabilities(p, bath, 0.0, spec), n_walkers, seed);
    if (opt.start && !spec.contains(opt.start->n1, opt.start->n2)) throw ParameterError("start site outside lattice");

    BeableEnsemble ens;
    ens.dt = dt;
    ens.paths.assign(n_walkers, {});
    auto record = [&](double t) {
        ens.omega_t.push_back(t);
        for (std::size_t w = 0; w < n_walkers; ++w) ens.paths[w].push_back(current[w]);
    };
    record(0.0);

    std::vector<RandomStream> streams;
    streams.reserve(n_walkers);
    for (std::size_t w = 0; w < n_walkers; ++w) streams.emplace_back(seed, w);
    std::vector<double> exit_prob(n_walkers, 0.0);

    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        const auto rates = rates_at(p, bath, t, spec, opt.osmotic);
        parallel_for(n_walkers, par, [&](std::size_t w) {
            auto& site = current[w];
            const auto& r = rates.at(site.n1, site.n2);
            const double total = (r[0] + r[1] + r[2] + r[3]) * dt;
            exit_prob[w] = std::max(exit_prob[w], total);
            const double u = streams[w].uniform();
            if (total >= 1.0)
                throw StepSizeError("exit probability " + std::to_string(total) + " >= 1 at site (" +
                                    std::to_string(site.n1) + ", " + std::to_string(site.n2) + ") at omega_t " +
                                    std::to_string(t));
            double cum = 0.0;
            for (int d = 0; d < 4; ++d) {
                cum += r[d] * dt;
                if (u < cum) {
                    site.n1 += kSteps[d][0];
                    site.n2 += kSteps[d][1];
                    break;
                }
            }
        });
        if ((s + 1) % stride == 0 || s + 1 == steps) record(static_cast<double>(s + 1) * dt);
    }
    for (double e : exit_prob) ens.max_exit_probability = std::max(ens.max_exit_probability, e);
    return ens;
}

/// Largest dt keeping the exit probability below `target` at every site,
/// probing the rate table at `probes` evenly spaced times in [0, τ_end].
inline double suggest_dt(const WernerParams& p, const BathParams& bath, const LatticeSpec& spec, double omega_t_end,
                         double target = 0.05, int probes = 64) {
    double worst = 0.0;
    for (int k = 0; k <= probes; ++k)
        worst = std::max(worst, rates_at(p, bath, omega_t_end * k / probes, spec).max_exit_rate());
    return worst > 0.0 ? target / worst : omega_t_end;
}

/// Per-axis histograms of walker positions at one record, normalised to 1.
inline std::array<std::vector<double>, 2> walker_marginals(const BeableEnsemble& ens, std::size_t record,
                                                           const LatticeSpec& spec) {
    std::array<std::vector<double>, 2> m{std::vector<double>(static_cast<std::size_t>(spec.width()), 0.0),
                                         std::vector<double>(static_cast<std::size_t>(spec.width()), 0.0)};
    const double w = 1.0 / static_cast<double>(ens.walkers());
    for (const auto& path : ens.paths) {
        m[0][static_cast<std::size_t>(path[record].n1 + spec.half_extent)] += w;
        m[1][static_cast<std::size_t>(path[record].n2 + spec.half_extent)] += w;
    }
    return m;
}

/// Per-axis marginals of lattice probabilities, normalised to 1.
inline std::array<std::vector<double>, 2> lattice_marginals(const LatticeField& probs) {
    const auto& spec = probs.spec;
    std::array<std::vector<double>, 2> m{std::vector<double>(static_cast<std::size_t>(spec.width()), 0.0),
                                         std::vector<double>(static_cast<std::size_t>(spec.width()), 0.0)};
    const double total = probs.total();
    for (int n1 = -spec.half_extent; n1 <= spec.half_extent; ++n1)
        for (int n2 = -spec.half_extent; n2 <= spec.half_extent; ++n2) {
            const double v = probs.at(n1, n2) / total;
            m[0][static_cast<std::size_t>(n1 + spec.half_extent)] += v;
            m[1][static_cast<std::size_t>(n2 + spec.half_extent)] += v;
        }
    return m;
}

/// Larger of the two per-axis total-variation distances between the walker
/// ensemble at `record` and the lattice probabilities at the same time.
inline double marginal_tv_distance(const BeableEnsemble& ens, std::size_t record, const LatticeField& probs) {
    const auto a = walker_marginals(ens, record, probs.spec);
    const auto b = lattice_marginals(probs);
    double worst = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        double d = 0.0;
        for (std::size_t i = 0; i < a[axis].size(); ++i) d += std::abs(a[axis][i] - b[axis][i]);
        worst = std::max(worst, 0.5 * d);
    }
    return worst;
}

struct DriftReport {
    Velocity empirical;       ///< h · (mean signed jump) / dt over the trials
    Velocity lattice;         ///< exact expectation h · Σ_k T_k e_k of the jump process
    Velocity analytic;        ///< continuum velocity at the site position
    double relative_error = 0.0;        ///< |empirical − analytic| / |analytic|
    double discretization_error = 0.0;  ///< |lattice − analytic| / |analytic|
    double dt = 0.0;
    std::size_t samples = 0;
};

namespace detail {
inline double relative_gap(const Velocity& a, const Velocity& ref) {
    const double diff = std::hypot(a.v1 - ref.v1, a.v2 - ref.v2);
    const double norm = std::hypot(ref.v1, ref.v2);
    return norm > 1e-12 ? diff / norm : diff;
}
}  // namespace detail

/// One-step jump trials from `site` at time τ. dt is chosen so the exit
/// probability is 1/2; with no outgoing rate the drift is exactly zero.
/// When |analytic| < 1e-12 the reported errors are absolute.
inline DriftReport drift_check(const WernerParams& p, const BathParams& bath, const LatticeSpec& spec,
                               LatticeSite site, double omega_t, std::size_t n_samples, std::uint64_t seed) {
    spec.validate();
    if (!spec.contains(site.n1, site.n2)) throw ParameterError("drift_check site outside lattice");
    const auto rates = rates_at(p, bath, omega_t, spec);
    const auto& r = rates.at(site.n1, site.n2);
    const double total = r[0] + r[1] + r[2] + r[3];

    DriftReport rep;
    rep.samples = n_samples;
    rep.analytic = velocity_analytic({spec.coordinate(site.n1), spec.coordinate(site.n2), omega_t}, p, bath);
    rep.lattice = {spec.h * (r[plus1] - r[minus1]), spec.h * (r[plus2] - r[minus2])};
    if (total > 0.0 && n_samples > 0) {
        rep.dt = 0.5 / total;
        RandomStream rng(seed, 0);
        long long s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            const double u = rng.uniform();
            double cum = 0.0;
            for (int d = 0; d < 4; ++d) {
                cum += r[d] * rep.dt;
                if (u < cum) {
                    s1 += kSteps[d][0];
                    s2 += kSteps[d][1];
                    break;
                }
            }
        }
        const double scale = spec.h / (static_cast<double>(n_samples) * rep.dt);
        rep.empirical = {scale * static_cast<double>(s1), scale * static_cast<double>(s2)};
    }
    rep.relative_error = detail::relative_gap(rep.empirical, rep.analytic);
    rep.discretization_error = detail::relative_gap(rep.lattice, rep.analytic);
    return rep;
}

}  // namespace bohmflow
