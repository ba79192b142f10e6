#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bohmflow/fockspace.hpp"
#include "test_support.hpp"

using namespace bohmflow;

namespace {

TwoModeDensityMatrix projector(int n1, int n2) {
    Matrix4c m = Matrix4c::Zero();
    m(fock_index(n1, n2), fock_index(n1, n2)) = 1.0;
    return TwoModeDensityMatrix(m);
}

TwoModeDensityMatrix maximally_mixed() { return TwoModeDensityMatrix(Matrix4c::Identity() / 4.0); }

}  // namespace

TEST(HermiteMode, ClosedFormValues) {
    EXPECT_NEAR(hermite_mode(0, 0.0), 0.751125544464942482858703, 1e-15);
    EXPECT_EQ(hermite_mode(1, 0.0), 0.0);
    EXPECT_NEAR(hermite_mode(1, 1.0), 0.644288365113475181510838, 1e-15);
}

TEST(HermiteMode, RejectsHigherLevels) {
    EXPECT_THROW(hermite_mode(2, 0.3), UnsupportedModeError);
    EXPECT_THROW(hermite_mode(-1, 0.3), UnsupportedModeError);
}

TEST(HermiteMode, Orthonormal) {
    auto inner = [](int m, int n) {
        double s = 0.0, h = 1e-3;
        for (double x = -10.0; x <= 10.0; x += h) s += hermite_mode(m, x) * hermite_mode(n, x) * h;
        return s;
    };
    EXPECT_NEAR(inner(0, 0), 1.0, 1e-10);
    EXPECT_NEAR(inner(1, 1), 1.0, 1e-10);
    EXPECT_NEAR(inner(0, 1), 0.0, 1e-10);
}

TEST(DensityMatrix, ValidationRejectsBadInput) {
    Matrix4c m = Matrix4c::Identity() / 4.0;
    m(0, 1) = 0.1;  // not Hermitian
    EXPECT_THROW(TwoModeDensityMatrix{m}, ValidationError);

    EXPECT_THROW(TwoModeDensityMatrix{Matrix4c(Matrix4c::Identity() / 3.0)}, ValidationError);

    Matrix4c neg = Matrix4c::Zero();
    neg(0, 0) = 1.2;
    neg(1, 1) = -0.2;
    EXPECT_THROW(TwoModeDensityMatrix{neg}, ValidationError);
}

TEST(Kernel, GroundStateIsPlainGaussian) {
    const auto k = kernel_from_matrix(projector(0, 0));
    EXPECT_EQ(k.coefficient(0, 0, 0, 0), cplx(1.0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (i + j + a + b > 0) EXPECT_EQ(k.coefficient(i, j, a, b), cplx(0.0));
    const double x1 = 0.3, x2 = -0.7, y1 = 1.1, y2 = 0.2;
    const double expected = std::exp(-0.5 * (x1 * x1 + x2 * x2 + y1 * y1 + y2 * y2)) / std::numbers::pi;
    EXPECT_NEAR(k(x1, x2, y1, y2).real(), expected, 1e-15);
}

TEST(Kernel, DoublyExcitedCoefficient) {
    const auto k = kernel_from_matrix(projector(1, 1));
    EXPECT_NEAR(k.coefficient(1, 1, 1, 1).real(), 4.0, 1e-14);
}

TEST(Kernel, MatchesProductOfModeFunctions) {
    std::mt19937_64 rng(7);
    const auto rho = test_support::random_density_matrix(rng);
    const auto k = kernel_from_matrix(rho);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
        const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
        cplx direct = 0.0;
        for (int n1 = 0; n1 < 2; ++n1)
            for (int n2 = 0; n2 < 2; ++n2)
                for (int m1 = 0; m1 < 2; ++m1)
                    for (int m2 = 0; m2 < 2; ++m2)
                        direct += rho(fock_index(n1, n2), fock_index(m1, m2)) * hermite_mode(n1, x1) *
                                  hermite_mode(n2, x2) * hermite_mode(m1, y1) * hermite_mode(m2, y2);
        EXPECT_NEAR(std::abs(k(x1, x2, y1, y2) - direct), 0.0, 1e-14);
    }
}

TEST(DiagonalDensity, ReferencePoints) {
    EXPECT_NEAR(diagonal_density(kernel_from_matrix(projector(0, 0)), 0.0, 0.0), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_EQ(diagonal_density(kernel_from_matrix(projector(1, 1)), 0.0, 0.73), 0.0);
    EXPECT_NEAR(diagonal_density(kernel_from_matrix(maximally_mixed()), 0.0, 0.0), 1.0 / (4.0 * std::numbers::pi),
                1e-15);
}

TEST(DiagonalDensity, NegativeValueIsRejected) {
    CoordinateKernel::Table t{};
    t[0][0][0][0] = -1.0;
    EXPECT_THROW(diagonal_density(CoordinateKernel(t), 0.0, 0.0), PositivityViolation);
}

TEST(DiagonalDensity, ImaginaryDiagonalIsRejected) {
    CoordinateKernel::Table t{};
    t[0][0][0][0] = cplx(1.0, 0.5);
    EXPECT_THROW(diagonal_density(CoordinateKernel(t), 0.0, 0.0), ValidationError);
}

TEST(KernelProperties, TracePreservedInCoordinates) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto k = kernel_from_matrix(test_support::random_density_matrix(rng));
        const double mass = test_support::plane_integral([&](double x1, double x2) { return diagonal_density(k, x1, x2); });
        EXPECT_NEAR(mass, 1.0, 1e-6);
    }
}

TEST(KernelProperties, LinearInDensityMatrix) {
    std::mt19937_64 rng(12);
    const auto r1 = test_support::random_density_matrix(rng);
    const auto r2 = test_support::random_density_matrix(rng);
    const double alpha = 0.37;
    const auto mixed = kernel_from_matrix(TwoModeDensityMatrix(alpha * r1.matrix() + (1.0 - alpha) * r2.matrix()));
    const auto combo = alpha * kernel_from_matrix(r1) + (1.0 - alpha) * kernel_from_matrix(r2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
        EXPECT_LT(std::abs(mixed(x1, x2, y1, y2) - combo(x1, x2, y1, y2)), 1e-12);
    }
}

TEST(KernelProperties, Hermitian) {
    std::mt19937_64 rng(13);
    const auto k = kernel_from_matrix(test_support::random_density_matrix(rng));
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
        EXPECT_LT(std::abs(k(x1, x2, y1, y2) - std::conj(k(y1, y2, x1, x2))), 1e-12);
    }
}

TEST(KernelProperties, DiagonalNonnegativeOnGrid) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const auto k = kernel_from_matrix(test_support::random_density_matrix(rng));
        for (double x1 = -4.0; x1 <= 4.0; x1 += 0.25)
            for (double x2 = -4.0; x2 <= 4.0; x2 += 0.25) {
                const auto v = k(x1, x2, x1, x2);
                EXPECT_GE(v.real(), -1e-12);
                EXPECT_LT(std::abs(v.imag()), 1e-12);
            }
    }
}

TEST(KernelProperties, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(15);
    const auto k = kernel_from_matrix(test_support::random_density_matrix(rng));
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    const double step = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const double x1 = u(rng), x2 = u(rng), y1 = u(rng), y2 = u(rng);
        const auto g = k.gradient(x1, x2, y1, y2);
        const cplx fd1 = (k(x1 + step, x2, y1, y2) - k(x1 - step, x2, y1, y2)) / (2.0 * step);
        const cplx fd2 = (k(x1, x2 + step, y1, y2) - k(x1, x2 - step, y1, y2)) / (2.0 * step);
        EXPECT_LT(std::abs(g[0] - fd1), 1e-6);
        EXPECT_LT(std::abs(g[1] - fd2), 1e-6);
    }
}
