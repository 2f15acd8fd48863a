/**
 * @brief Collective-spin picture of N two-mode bosons: Dicke basis,
 * angular momentum matrices, Dicke and spin coherent states.
 *
 * Basis ordering is m ascending, so the amplitude of |j,m> lives at
 * index m + j.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace dwqfi {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Spin j = N/2, stored as the integer 2j.
class SpinQuantumNumber {
public:
    static SpinQuantumNumber from_twice_j(int twice_j)
    {
        if (twice_j <= 0)
            throw std::invalid_argument("spin: 2j must be positive, got " + std::to_string(twice_j));
        return SpinQuantumNumber(twice_j);
    }
    static SpinQuantumNumber from_particles(int n_particles) { return from_twice_j(n_particles); }

    int twice_j() const noexcept { return twice_j_; }
    int n_particles() const noexcept { return twice_j_; }
    double j() const noexcept { return 0.5 * twice_j_; }
    Eigen::Index dim() const noexcept { return twice_j_ + 1; }
    double casimir() const noexcept { return j() * (j() + 1.0); }

    /// Basis index of magnetic number m; throws if m is not one of -j..j.
    Eigen::Index index_of(double m) const
    {
        const double shifted = m + j();
        const double rounded = std::round(shifted);
        if (std::abs(shifted - rounded) > 1e-9 || rounded < 0 || rounded > twice_j_)
            throw std::invalid_argument("spin: m = " + std::to_string(m) + " is not in -j..j for j = "
                                        + std::to_string(j()));
        return static_cast<Eigen::Index>(rounded);
    }
    double m_of(Eigen::Index index) const noexcept { return static_cast<double>(index) - j(); }

    friend bool operator==(SpinQuantumNumber, SpinQuantumNumber) = default;

private:
    explicit SpinQuantumNumber(int twice_j) : twice_j_(twice_j) {}
    int twice_j_;
};

/// Normalized pure state over the Dicke basis.
class StateVector {
public:
    static constexpr double norm_tolerance = 1e-9;

    StateVector(SpinQuantumNumber spin, ComplexVector amplitudes)
        : spin_(spin), amplitudes_(std::move(amplitudes))
    {
        if (amplitudes_.size() != spin_.dim())
            throw DimensionMismatch("state: expected " + std::to_string(spin_.dim()) + " amplitudes, got "
                                    + std::to_string(amplitudes_.size()));
        if (std::abs(amplitudes_.norm() - 1.0) > norm_tolerance)
            throw std::invalid_argument("state: amplitudes are not normalized (norm "
                                        + std::to_string(amplitudes_.norm()) + ")");
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static StateVector normalized(SpinQuantumNumber spin, ComplexVector amplitudes)
    {
        const double n = amplitudes.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::invalid_argument("state: cannot normalize a zero or non-finite vector");
        amplitudes /= n;
        return StateVector(spin, std::move(amplitudes));
    }

    SpinQuantumNumber spin() const noexcept { return spin_; }
    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }

private:
    SpinQuantumNumber spin_;
    ComplexVector amplitudes_;
};

/// J_x, J_y, J_z and J_z^2 in the Dicke basis.
struct AngularMomentumSet {
    SpinQuantumNumber spin;
    ComplexMatrix jx;
    ComplexMatrix jy;
    ComplexMatrix jz;
    RealMatrix jz2;

    Eigen::Index dim() const noexcept { return spin.dim(); }
    const ComplexMatrix& component(int k) const { return k == 0 ? jx : (k == 1 ? jy : jz); }
};

/// Off-diagonal ladder element <j,m+1| J+ |j,m>.
inline double raising_element(SpinQuantumNumber spin, double m)
{
    return std::sqrt(spin.casimir() - m * (m + 1.0));
}

inline AngularMomentumSet build_operators(SpinQuantumNumber spin)
{
    const Eigen::Index d = spin.dim();
    RealMatrix raising = RealMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i + 1 < d; ++i)
        raising(i + 1, i) = raising_element(spin, spin.m_of(i));

    RealVector m(d);
    for (Eigen::Index i = 0; i < d; ++i)
        m[i] = spin.m_of(i);

    const Complex imag_unit{0.0, 1.0};
    AngularMomentumSet ops{spin, {}, {}, {}, {}};
    ops.jx = (0.5 * (raising + raising.transpose())).cast<Complex>();
    ops.jy = (raising - raising.transpose()).cast<Complex>() / (2.0 * imag_unit);
    ops.jz = m.cast<Complex>().asDiagonal();
    ops.jz2 = m.array().square().matrix().asDiagonal();
    return ops;
}

inline StateVector dicke_state(SpinQuantumNumber spin, double m)
{
    ComplexVector amplitudes = ComplexVector::Zero(spin.dim());
    amplitudes[spin.index_of(m)] = 1.0;
    return StateVector(spin, std::move(amplitudes));
}

inline double log_binomial(int n, int k)
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/**
 * Spin coherent state |theta, phi> obtained by rotating |j,-j>.
 *
 * With tau = exp(-i phi) tan(theta/2) the amplitude of |j,m> is
 * sqrt(C(2j, j+m)) tau^(j+m) / (1+|tau|^2)^j, which equals
 * sqrt(C(2j,k)) sin(theta/2)^k cos(theta/2)^(2j-k) exp(-i k phi) with k = j+m.
 * Magnitudes are evaluated in log space so that N = 1000 does not overflow.
 * The poles are separate branches: theta = 0 is |j,-j>, theta = pi is the
 * tau -> infinity limit exp(-2ij phi)|j,j>.
 */
inline StateVector spin_coherent_state(SpinQuantumNumber spin, double theta, double phi)
{
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("coherent state: theta must lie in [0, pi]");
    if (!std::isfinite(phi))
        throw std::invalid_argument("coherent state: phi must be finite");

    const int n = spin.twice_j();
    ComplexVector amplitudes = ComplexVector::Zero(spin.dim());
    if (theta == 0.0) {
        amplitudes[0] = 1.0;
        return StateVector(spin, std::move(amplitudes));
    }
    if (theta == std::numbers::pi) {
        amplitudes[n] = std::polar(1.0, -phi * n);
        return StateVector(spin, std::move(amplitudes));
    }

    const double log_sin = std::log(std::sin(0.5 * theta));
    const double log_cos = std::log(std::cos(0.5 * theta));
    for (int k = 0; k <= n; ++k) {
        const double log_magnitude = 0.5 * log_binomial(n, k) + k * log_sin + (n - k) * log_cos;
        amplitudes[k] = std::polar(std::exp(log_magnitude), -phi * k);
    }
    // Rounding in lgamma leaves the norm off by ~1e-15; renormalize.
    return StateVector::normalized(spin, std::move(amplitudes));
}

namespace detail {

inline void require_same_dim(const AngularMomentumSet& ops, const StateVector& state)
{
    if (ops.dim() != state.dim())
        throw DimensionMismatch("operator dimension " + std::to_string(ops.dim())
                                + " does not match state dimension " + std::to_string(state.dim()));
}

inline double checked_real(Complex value, double scale, const char* what)
{
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, scale))
        throw std::runtime_error(std::string(what) + ": imaginary residue "
                                 + std::to_string(value.imag()) + " on a Hermitian expectation");
    return value.real();
}

} // namespace detail

/// J_x psi, J_y psi, J_z psi.
using SpinImages = std::array<ComplexVector, 3>;

inline SpinImages spin_images(const AngularMomentumSet& ops, const StateVector& state)
{
    detail::require_same_dim(ops, state);
    const auto& psi = state.amplitudes();
    return {ops.jx * psi, ops.jy * psi, ops.jz * psi};
}

inline Eigen::Vector3d expectation(const StateVector& state, const SpinImages& images)
{
    Eigen::Vector3d out;
    for (int k = 0; k < 3; ++k)
        out[k] = detail::checked_real(state.amplitudes().dot(images[k]), state.spin().j(), "expectation");
    return out;
}

/// (<J_x>, <J_y>, <J_z>).
inline Eigen::Vector3d expectation(const AngularMomentumSet& ops, const StateVector& state)
{
    return expectation(state, spin_images(ops, state));
}

/// Entry (k,l) is <J_k J_l + J_l J_k>/2 = Re<J_k psi | J_l psi>.
inline Eigen::Matrix3d symmetrized_second_moments(const SpinImages& images)
{
    Eigen::Matrix3d out;
    for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l)
            out(k, l) = out(l, k) = images[k].dot(images[l]).real();
    return out;
}

inline Eigen::Matrix3d symmetrized_second_moments(const AngularMomentumSet& ops, const StateVector& state)
{
    return symmetrized_second_moments(spin_images(ops, state));
}

} // namespace dwqfi
