#pragma once

// Two-mode Fock space truncated to levels {0,1} per mode, and the
// coordinate-space kernel ρ(x̃₁,x̃₂,x̃₁′,x̃₂′) built from a 4×4 density matrix.
// All coordinates are dimensionless, x̃ = √(Mω/ħ)·x.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace bohmflow {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;

/// Basis index of |n₁n₂⟩ in the ordering {|00⟩,|01⟩,|10⟩,|11⟩}.
constexpr int fock_index(int n1, int n2) { return 2 * n1 + n2; }

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenFloor = -1e-10;

/// 4×4 Hermitian, unit-trace, positive-semidefinite matrix on the two-qubit
/// Fock subspace. Construction validates; instances are immutable.
class TwoModeDensityMatrix {
public:
    explicit TwoModeDensityMatrix(const Matrix4c& m) : m_(m) { validate(m_); }

    const Matrix4c& matrix() const noexcept { return m_; }
    cplx operator()(int row, int col) const { return m_(row, col); }

    /// Eigenvalues (ascending) of the Hermitian matrix.
    Eigen::Vector4d eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    static void validate(const Matrix4c& m) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                    throw ValidationError("density matrix has non-finite entries");
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                if (std::abs(m(i, j) - std::conj(m(j, i))) > kHermitianTol)
                    throw ValidationError("density matrix is not Hermitian");
        const cplx tr = m.trace();
        if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol)
            throw ValidationError("density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Matrix4c> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < kEigenFloor)
            throw ValidationError("density matrix is not positive semidefinite");
    }

private:
    Matrix4c m_;
};

/// Oscillator eigenfunction φₙ(x̃) for n ∈ {0,1}.
inline double hermite_mode(int n, double x) {
    const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
    const double gauss = std::exp(-0.5 * x * x);
    switch (n) {
        case 0: return norm * gauss;
        case 1: return norm * std::numbers::sqrt2 * x * gauss;
        default: throw UnsupportedModeError("hermite_mode: only n in {0,1} is supported");
    }
}

/// Polynomial-times-Gaussian kernel
///   ρ(x,x′) = (1/π) Σ c[i][j][k][l] x̃₁ⁱ x̃₂ʲ x̃₁′ᵏ x̃₂′ˡ · exp[−(x̃₁²+x̃₂²+x̃₁′²+x̃₂′²)/2]
/// with i,j,k,l ∈ {0,1}.
class CoordinateKernel {
public:
    using Table = std::array<std::array<std::array<std::array<cplx, 2>, 2>, 2>, 2>;

    CoordinateKernel() : c_{} {}
    explicit CoordinateKernel(const Table& coefficients) : c_(coefficients) {}

    cplx coefficient(int i, int j, int k, int l) const { return c_[i][j][k][l]; }
    const Table& table() const noexcept { return c_; }

    /// Polynomial factor alone, without (1/π) and the Gaussian.
    cplx polynomial(double x1, double x2, double y1, double y2) const {
        const double p1[2] = {1.0, x1}, p2[2] = {1.0, x2}, q1[2] = {1.0, y1}, q2[2] = {1.0, y2};
        cplx s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) s += c_[i][j][k][l] * (p1[i] * p2[j] * q1[k] * q2[l]);
        return s;
    }

    /// ∂/∂x̃₁ and ∂/∂x̃₂ (unprimed arguments) of the polynomial factor.
    std::array<cplx, 2> polynomial_gradient(double x1, double x2, double y1, double y2) const {
        const double p2[2] = {1.0, x2}, q1[2] = {1.0, y1}, q2[2] = {1.0, y2};
        const double p1[2] = {1.0, x1};
        cplx d1 = 0.0, d2 = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) d1 += c_[1][j][k][l] * (p2[j] * q1[k] * q2[l]);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) d2 += c_[i][1][k][l] * (p1[i] * q1[k] * q2[l]);
        return {d1, d2};
    }

    static double envelope(double x1, double x2, double y1, double y2) {
        return std::exp(-0.5 * (x1 * x1 + x2 * x2 + y1 * y1 + y2 * y2)) / std::numbers::pi;
    }

    /// ρ(x̃₁,x̃₂,x̃₁′,x̃₂′).
    cplx operator()(double x1, double x2, double y1, double y2) const {
        return polynomial(x1, x2, y1, y2) * envelope(x1, x2, y1, y2);
    }

    /// Gradient of ρ with respect to the unprimed coordinates.
    std::array<cplx, 2> gradient(double x1, double x2, double y1, double y2) const {
        const cplx p = polynomial(x1, x2, y1, y2);
        const auto dp = polynomial_gradient(x1, x2, y1, y2);
        const double env = envelope(x1, x2, y1, y2);
        return {(dp[0] - x1 * p) * env, (dp[1] - x2 * p) * env};
    }

    CoordinateKernel& operator+=(const CoordinateKernel& o) {
        for_each([&](int i, int j, int k, int l) { c_[i][j][k][l] += o.c_[i][j][k][l]; });
        return *this;
    }
    CoordinateKernel& operator*=(double s) {
        for_each([&](int i, int j, int k, int l) { c_[i][j][k][l] *= s; });
        return *this;
    }
    friend CoordinateKernel operator+(CoordinateKernel a, const CoordinateKernel& b) { return a += b; }
    friend CoordinateKernel operator*(double s, CoordinateKernel a) { return a *= s; }

private:
    template <class F>
    static void for_each(F&& f) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) f(i, j, k, l);
    }

    Table c_;
};

/// ρ(x,x′) = Σ ρ_{(n₁n₂),(m₁m₂)} φ_{n₁}(x̃₁)φ_{n₂}(x̃₂)φ_{m₁}(x̃₁′)φ_{m₂}(x̃₂′).
/// Each φ₁ contributes √2·x̃, so the monomial coefficient is ρ·(√2)^(n₁+n₂+m₁+m₂).
inline CoordinateKernel kernel_from_matrix(const TwoModeDensityMatrix& rho) {
    CoordinateKernel::Table t{};
    for (int n1 = 0; n1 < 2; ++n1)
        for (int n2 = 0; n2 < 2; ++n2)
            for (int m1 = 0; m1 < 2; ++m1)
                for (int m2 = 0; m2 < 2; ++m2) {
                    const double scale = std::pow(std::numbers::sqrt2, n1 + n2 + m1 + m2);
                    t[n1][n2][m1][m2] = rho(fock_index(n1, n2), fock_index(m1, m2)) * scale;
                }
    return CoordinateKernel(t);
}

inline constexpr double kDiagonalImagTol = 1e-12;
inline constexpr double kDiagonalNegativeFloor = -1e-10;

/// Probability density ρ(x,x) at the configuration (x̃₁, x̃₂).
inline double diagonal_density(const CoordinateKernel& kernel, double x1, double x2) {
    const cplx v = kernel(x1, x2, x1, x2);
    if (std::abs(v.imag()) >= kDiagonalImagTol)
        throw ValidationError("diagonal kernel value has a non-negligible imaginary part");
    if (v.real() < kDiagonalNegativeFloor)
        throw PositivityViolation("diagonal density is negative at (" + std::to_string(x1) + ", " +
                                  std::to_string(x2) + ")");
    return std::max(v.real(), 0.0);
}

}  // namespace bohmflow
