// Minimal use of the library: concurrence, threshold and one trajectory.

#include <cstdio>
#include <numbers>

#include "bohmflow/bohmflow.hpp"

int main() {
    using namespace bohmflow;
    const auto p = WernerParams::from_a(std::numbers::sqrt2 / 2.0, +1, 0.4);
    const BathParams bath{0.1, 0.0};

    std::printf("C(t=0)        = %.6f\n", concurrence(werner_initial(p)).value);
    std::printf("epsilon*      = %.9f\n", separability_threshold(p.a, p.b, p.sign).value());
    std::printf("gamma t_SD    = %.9f\n", sudden_death_time(p, bath).gamma_t);

    const auto times = sample_grid(0.0, 10.0, 1.0);
    const auto tr = integrate_trajectory({1.0, 1.25, 0.0}, p, bath, 10.0, times);
    for (std::size_t i = 0; i < tr.size(); ++i)
        std::printf("omega t = %4.1f   x1 = % .6f   x2 = % .6f\n", tr.omega_t[i], tr.x1[i], tr.x2[i]);
}
