/**
 * @brief Exact dynamics of the two-mode Hamiltonian H = Omega J_x + 2 kappa J_z^2.
 *
 * Energies are in units of kappa, time is s = kappa t, and the tunnelling
 * strength enters through lambda = Omega / kappa_r with kappa_r = (N-1) kappa.
 * States are propagated by a one-off eigendecomposition of H, so there is no
 * time-step error.
 */
#pragma once

#include "dwqfi/spin_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwqfi {

namespace detail {

template <typename RealMat>
ComplexVector real_times_complex(const RealMat& m, const ComplexVector& v)
{
    const RealVector re = m * v.real();
    const RealVector im = m * v.imag();
    ComplexVector out(re.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

} // namespace detail

struct ModelParams {
    int n_particles = 2;
    double lambda = 0.0;

    void validate() const
    {
        if (n_particles < 2)
            throw std::invalid_argument("model: N must be at least 2, got " + std::to_string(n_particles));
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("model: lambda must be finite and non-negative");
    }
    SpinQuantumNumber spin() const { return SpinQuantumNumber::from_particles(n_particles); }
    /// Omega / kappa = lambda (N - 1).
    double omega_over_kappa() const { return lambda * (n_particles - 1); }
};

/// Real symmetric tridiagonal matrix a J_x + b J_z^2 in the Dicke basis.
class TwoModeHamiltonian {
public:
    static TwoModeHamiltonian build(const ModelParams& params)
    {
        params.validate();
        return TwoModeHamiltonian(params.spin(), params.omega_over_kappa(), 2.0);
    }

    /// Pure tunnelling Omega J_x (no interaction). Only meaningful as an
    /// analytic check: <J_z>(t) = -j cos(Omega t) from |j,-j>.
    static TwoModeHamiltonian tunnelling_only(SpinQuantumNumber spin, double omega)
    {
        return TwoModeHamiltonian(spin, omega, 0.0);
    }

    SpinQuantumNumber spin() const noexcept { return spin_; }
    const RealMatrix& matrix() const noexcept { return matrix_; }
    double tunnelling() const noexcept { return tunnelling_; }
    double interaction() const noexcept { return interaction_; }
    Eigen::Index dim() const noexcept { return matrix_.rows(); }

private:
    TwoModeHamiltonian(SpinQuantumNumber spin, double tunnelling, double interaction)
        : spin_(spin), tunnelling_(tunnelling), interaction_(interaction)
    {
        const Eigen::Index d = spin.dim();
        matrix_ = RealMatrix::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double m = spin.m_of(i);
            matrix_(i, i) = interaction * m * m;
            if (i + 1 < d)
                matrix_(i, i + 1) = matrix_(i + 1, i) = 0.5 * tunnelling * raising_element(spin, m);
        }
    }

    SpinQuantumNumber spin_;
    double tunnelling_;
    double interaction_;
    RealMatrix matrix_;
};

inline TwoModeHamiltonian build_hamiltonian(const ModelParams& params)
{
    return TwoModeHamiltonian::build(params);
}

class Propagator {
public:
    explicit Propagator(TwoModeHamiltonian hamiltonian) : hamiltonian_(std::move(hamiltonian))
    {
        Eigen::SelfAdjointEigenSolver<RealMatrix> solver(hamiltonian_.matrix());
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("propagator: eigendecomposition did not converge");
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    }
    explicit Propagator(const ModelParams& params) : Propagator(TwoModeHamiltonian::build(params)) {}

    const TwoModeHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
    const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
    const RealMatrix& eigenvectors() const noexcept { return eigenvectors_; }
    SpinQuantumNumber spin() const noexcept { return hamiltonian_.spin(); }

    /// Components of psi in the energy eigenbasis.
    ComplexVector to_eigenbasis(const StateVector& psi) const
    {
        require_dim(psi);
        return detail::real_times_complex(eigenvectors_.transpose(), psi.amplitudes());
    }

    /// V exp(-i E s) coefficients.
    ComplexVector from_eigenbasis(const ComplexVector& coefficients, double s) const
    {
        ComplexVector phased(coefficients.size());
        for (Eigen::Index k = 0; k < coefficients.size(); ++k)
            phased[k] = coefficients[k] * std::polar(1.0, -eigenvalues_[k] * s);
        return detail::real_times_complex(eigenvectors_, phased);
    }

    /// psi(s) = V exp(-i E s) V^T psi(0); negative s runs backwards.
    StateVector evolve(const StateVector& psi0, double s) const
    {
        if (!std::isfinite(s))
            throw std::invalid_argument("evolve: time must be finite");
        return StateVector(spin(), from_eigenbasis(to_eigenbasis(psi0), s));
    }

    double energy(const StateVector& psi) const
    {
        require_dim(psi);
        const auto& a = psi.amplitudes();
        return a.dot(detail::real_times_complex(hamiltonian_.matrix(), a)).real();
    }

private:
    void require_dim(const StateVector& psi) const
    {
        if (psi.dim() != hamiltonian_.dim())
            throw DimensionMismatch("propagator dimension " + std::to_string(hamiltonian_.dim())
                                    + " does not match state dimension " + std::to_string(psi.dim()));
    }

    TwoModeHamiltonian hamiltonian_;
    RealVector eigenvalues_;
    RealMatrix eigenvectors_;
};

/// |<a|b>|.
inline double fidelity(const StateVector& a, const StateVector& b)
{
    if (a.dim() != b.dim())
        throw DimensionMismatch("fidelity: state dimensions differ");
    return std::min(1.0, std::abs(a.amplitudes().dot(b.amplitudes())));
}

struct ObservableSample {
    double kappa_t;
    Eigen::Vector3d spin_expectation;
    double fidelity;
    double energy;
};

inline std::vector<ObservableSample> observable_series(const Propagator& prop, const StateVector& psi0,
                                                       const AngularMomentumSet& ops,
                                                       std::span<const double> times)
{
    const ComplexVector coefficients = prop.to_eigenbasis(psi0);
    std::vector<ObservableSample> series;
    series.reserve(times.size());
    for (double s : times) {
        if (!std::isfinite(s))
            throw std::invalid_argument("observable_series: time must be finite");
        const StateVector psi(prop.spin(), prop.from_eigenbasis(coefficients, s));
        series.push_back({s, expectation(ops, psi), fidelity(psi0, psi), prop.energy(psi)});
    }
    return series;
}

} // namespace dwqfi
