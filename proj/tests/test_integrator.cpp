#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bohmflow/integrator.hpp"

using namespace bohmflow;

namespace {

// y'' = −y written as a first-order system; exact solution (cos t, −sin t).
Vec2 rotation(double, const Vec2& y) { return {y[1], -y[0]}; }

double final_error(const IntegratorOptions& opt, double t_end = 10.0) {
    const std::vector<double> samples{t_end};
    const auto r = integrate_dopri5(rotation, 0.0, {1.0, 0.0}, t_end, samples, opt);
    return std::hypot(r.states.back()[0] - std::cos(t_end), r.states.back()[1] + std::sin(t_end));
}

}  // namespace

TEST(Dopri5, ErrorShrinksWithTolerance) {
    double prev = 1.0;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        IntegratorOptions opt;
        opt.tol = tol;
        const double err = final_error(opt);
        EXPECT_LT(err, 200.0 * tol) << tol;
        EXPECT_LT(err, prev);
        prev = err;
    }
}

TEST(Dopri5, FixedStepOrderAtLeastFour) {
    IntegratorOptions opt;
    opt.fixed_step = 0.1;
    const double coarse = final_error(opt);
    opt.fixed_step = 0.05;
    const double fine = final_error(opt);
    EXPECT_GT(std::log2(coarse / fine), 4.0);
}

TEST(Dopri5, DenseOutputAtArbitrarySamples) {
    std::vector<double> samples;
    for (int i = 0; i <= 200; ++i) samples.push_back(0.037 * i);
    IntegratorOptions opt;
    opt.tol = 1e-10;
    const auto r = integrate_dopri5(rotation, 0.0, {1.0, 0.0}, samples.back(), samples, opt);
    ASSERT_EQ(r.times.size(), samples.size());
    EXPECT_FALSE(r.truncated);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(r.times[i], samples[i]);
        EXPECT_NEAR(r.states[i][0], std::cos(samples[i]), 1e-8);
        EXPECT_NEAR(r.states[i][1], -std::sin(samples[i]), 1e-8);
    }
    EXPECT_EQ(r.last_time, samples.back());
}

TEST(Dopri5, RespectsMaximumStep) {
    IntegratorOptions opt;
    opt.tol = 1e-3;
    opt.max_step = 0.1;
    const std::vector<double> samples{5.0};
    const auto r = integrate_dopri5(rotation, 0.0, {1.0, 0.0}, 5.0, samples, opt);
    EXPECT_LE(r.max_step, 0.1 + 1e-15);
    EXPECT_GE(r.accepted_steps, 50u);
}

TEST(Dopri5, TransientNodeRejectionsRecover) {
    int failures = 0;
    auto f = [&](double t, const Vec2& y) {
        if (t > 0.5 && failures < 3) {
            ++failures;
            throw NodalSingularity(y[0], y[1], t, 0.0);
        }
        return rotation(t, y);
    };
    const std::vector<double> samples{2.0};
    const auto r = integrate_dopri5(f, 0.0, {1.0, 0.0}, 2.0, samples, {});
    EXPECT_FALSE(r.truncated);
    EXPECT_EQ(r.node_rejections, 3u);
    EXPECT_NEAR(r.states.back()[0], std::cos(2.0), 1e-7);
}

TEST(Dopri5, PersistentNodeTruncates) {
    auto f = [](double t, const Vec2& y) {
        if (t > 0.5) throw NodalSingularity(y[0], y[1], t, 0.0);
        return rotation(t, y);
    };
    const std::vector<double> samples{0.25, 0.5, 1.0, 2.0};
    const auto r = integrate_dopri5(f, 0.0, {1.0, 0.0}, 2.0, samples, {});
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(r.last_time, 0.5);
    EXPECT_LE(r.times.size(), 2u);
    EXPECT_GE(r.node_rejections, 60u);
}

TEST(Dopri5, SamplesAtStartAreReturnedImmediately) {
    const std::vector<double> samples{0.0};
    const auto r = integrate_dopri5(rotation, 0.0, {0.3, 0.4}, 0.0, samples, {});
    ASSERT_EQ(r.states.size(), 1u);
    EXPECT_EQ(r.states[0][0], 0.3);
    EXPECT_EQ(r.states[0][1], 0.4);
}
