#pragma once

// Dormand–Prince 5(4) integrator for two-component systems with dense
// output and node-aware step rejection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace bohmflow {

struct IntegratorOptions {
    double tol = 1e-9;              ///< per-step relative (and absolute) error bound
    double initial_step = 1e-2;
    double max_step = 0.25;
    double fixed_step = 0.0;        ///< > 0 disables adaptivity
    int max_node_rejections = 60;   ///< consecutive nodal rejections before truncation
    std::size_t max_steps = 10'000'000;
};

struct IntegrationResult {
    std::vector<double> times;   ///< requested sample times actually reached
    std::vector<Vec2> states;
    bool truncated = false;
    double last_time = 0.0;      ///< last accepted point
    Vec2 last_state{};
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t node_rejections = 0;
    double min_step = 0.0;
    double max_step = 0.0;
};

namespace dopri {

inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer & Wanner, dense output of order 4).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

/// Integrates y' = f(t, y) from t0 to t_end and reports y at every entry of
/// `sample_times` (ascending, inside [t0, t_end]). If f throws
/// NodalSingularity during a stage the step is rejected and halved; after
/// `max_node_rejections` consecutive rejections the run is truncated.
template <class F>
IntegrationResult integrate_dopri5(F&& f, double t0, Vec2 y0, double t_end, std::span<const double> sample_times,
                                   const IntegratorOptions& opt = {}) {
    using namespace dopri;
    IntegrationResult out;
    out.last_time = t0;
    out.last_state = y0;
    out.times.reserve(sample_times.size());
    out.states.reserve(sample_times.size());

    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
        out.times.push_back(sample_times[next_sample]);
        out.states.push_back(y0);
        ++next_sample;
    }
    if (t_end <= t0) return out;

    auto axpy = [](const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
        Vec2 r = y;
        for (const auto& [coef, k] : terms) {
            r[0] += h * coef * (*k)[0];
            r[1] += h * coef * (*k)[1];
        }
        return r;
    };

    const bool adaptive = opt.fixed_step <= 0.0;
    double t = t0;
    Vec2 y = y0;
    double h = adaptive ? std::min({opt.initial_step, opt.max_step, t_end - t0}) : opt.fixed_step;
    int node_streak = 0;
    bool have_k1 = false;
    Vec2 k1{};

    while (t < t_end) {
        if (out.accepted_steps + out.rejected_steps >= opt.max_steps) {
            out.truncated = true;
            break;
        }
        const bool last = t + h >= t_end;
        const double step = last ? t_end - t : h;

        Vec2 k2, k3, k4, k5, k6, k7, y5;
        try {
            if (!have_k1) {
                k1 = f(t, y);
                have_k1 = true;
            }
            k2 = f(t + c2 * step, axpy(y, step, {{a21, &k1}}));
            k3 = f(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
            k4 = f(t + c4 * step, axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = f(t + c5 * step, axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = f(t + step, axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y5 = axpy(y, step, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
            k7 = f(t + step, y5);
        } catch (const NodalSingularity&) {
            ++out.rejected_steps;
            ++out.node_rejections;
            // Accepted steps reset the streak, so an approach that creeps up on a
            // node by halves is caught by the step-size floor instead.
            h = 0.5 * step;
            if (!have_k1 || ++node_streak >= opt.max_node_rejections || h < 1e-12 * std::max(1.0, std::abs(t))) {
                out.truncated = true;
                break;
            }
            continue;
        }

        double err = 0.0;
        if (adaptive) {
            for (int i = 0; i < 2; ++i) {
                const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double scale = opt.tol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
                err = std::max(err, std::abs(e) / scale);
            }
            if (!std::isfinite(err)) err = 1e10;
            if (err > 1.0) {
                ++out.rejected_steps;
                h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                    out.truncated = true;
                    break;
                }
                continue;
            }
        }

        // Accepted: serve dense-output requests falling inside (t, t + step].
        const double t_new = last ? t_end : t + step;
        if (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
            Vec2 r2, r3, r4, r5;
            for (int i = 0; i < 2; ++i) {
                const double dy = y5[i] - y[i];
                const double bspl = step * k1[i] - dy;
                r2[i] = dy;
                r3[i] = bspl;
                r4[i] = dy - step * k7[i] - bspl;
                r5[i] = step * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
                const double ts = sample_times[next_sample];
                Vec2 ys;
                if (ts == t_new) {
                    ys = y5;
                } else {
                    const double th = (ts - t) / step, th1 = 1.0 - th;
                    for (int i = 0; i < 2; ++i)
                        ys[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
                }
                out.times.push_back(ts);
                out.states.push_back(ys);
                ++next_sample;
            }
        }

        out.min_step = out.accepted_steps == 0 ? step : std::min(out.min_step, step);
        out.max_step = std::max(out.max_step, step);
        ++out.accepted_steps;
        node_streak = 0;
        t = t_new;
        y = y5;
        k1 = k7;  // first-same-as-last
        out.last_time = t;
        out.last_state = y;

        if (adaptive) {
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(opt.max_step, step * fac);
        }
    }
    return out;
}

}  // namespace bohmflow
