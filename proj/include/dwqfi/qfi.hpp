/**
 * @brief Quantum Fisher information for rotations generated by J_n.
 *
 * Both the pure-state and the density-matrix routes produce a 3x3 matrix C
 * with F(n) = n C n^T, so the maximal QFI over directions is simply the top
 * eigenvalue of C. For pure states the factor 4 of F = 4 Var(J_n) is folded
 * into C.
 */
#pragma once

#include "dwqfi/spin_algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwqfi {

class QfiMatrix {
public:
    /// Symmetrizes, diagonalizes and picks the optimal direction. Tiny
    /// negative eigenvalues from rounding are clamped to zero.
    static QfiMatrix from_matrix(const Eigen::Matrix3d& c)
    {
        QfiMatrix out;
        out.c_ = 0.5 * (c + c.transpose());

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(out.c_);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("qfi: 3x3 eigendecomposition failed");
        // Eigen sorts ascending; store descending.
        const Eigen::Vector3d ascending = solver.eigenvalues();
        const Eigen::Matrix3d vectors = solver.eigenvectors();
        const double scale = std::max(1.0, std::abs(ascending[2]));
        for (int k = 0; k < 3; ++k) {
            double value = ascending[2 - k];
            if (value < -1e-9 * scale)
                throw std::invalid_argument("qfi: matrix is not positive semidefinite (eigenvalue "
                                            + std::to_string(value) + ")");
            out.eigenvalues_[k] = std::max(value, 0.0);
            out.eigenvectors_.col(k) = vectors.col(2 - k);
        }
        out.direction_ = pick_direction(out.eigenvalues_, out.eigenvectors_, scale);
        return out;
    }

    const Eigen::Matrix3d& matrix() const noexcept { return c_; }
    /// Descending.
    const Eigen::Vector3d& eigenvalues() const noexcept { return eigenvalues_; }
    const Eigen::Vector3d& optimal_direction() const noexcept { return direction_; }
    double lambda_max() const noexcept { return eigenvalues_[0]; }
    /// Maximal QFI over unit directions.
    double f_max() const noexcept { return eigenvalues_[0]; }
    double fisher(const Eigen::Vector3d& n) const { return n.dot(c_ * n); }

private:
    // Within a degenerate top eigenspace, take the unit vector closest to z,
    // then to y, then to x. Sign is fixed so that component is positive.
    static Eigen::Vector3d pick_direction(const Eigen::Vector3d& values, const Eigen::Matrix3d& vectors,
                                          double scale)
    {
        int top_dim = 1;
        while (top_dim < 3 && values[0] - values[top_dim] <= 1e-9 * scale)
            ++top_dim;
        const Eigen::MatrixXd basis = vectors.leftCols(top_dim);
        const int priority[3] = {2, 1, 0};
        for (int axis : priority) {
            const Eigen::Vector3d projected = basis * basis.transpose().col(axis);
            if (projected.norm() > 1e-6) {
                Eigen::Vector3d n = projected.normalized();
                return n[axis] < 0.0 ? Eigen::Vector3d(-n) : n;
            }
        }
        return vectors.col(0); // unreachable: some axis always projects
    }

    Eigen::Matrix3d c_ = Eigen::Matrix3d::Zero();
    Eigen::Vector3d eigenvalues_ = Eigen::Vector3d::Zero();
    Eigen::Matrix3d eigenvectors_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d direction_ = Eigen::Vector3d::UnitZ();
};

/// Hermitian, unit-trace, positive semidefinite matrix over the Dicke basis.
class DensityOperator {
public:
    DensityOperator(SpinQuantumNumber spin, ComplexMatrix matrix) : spin_(spin), matrix_(std::move(matrix))
    {
        if (matrix_.rows() != spin.dim() || matrix_.cols() != spin.dim())
            throw DimensionMismatch("density operator: expected a square matrix of dimension "
                                    + std::to_string(spin.dim()));
        if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("density operator: matrix is not Hermitian");
        if (std::abs(matrix_.trace() - Complex(1.0)) > 1e-10)
            throw std::invalid_argument("density operator: trace differs from 1");

        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("density operator: eigendecomposition failed");
        populations_ = solver.eigenvalues();
        if (populations_.minCoeff() < -1e-10)
            throw std::invalid_argument("density operator: negative eigenvalue "
                                        + std::to_string(populations_.minCoeff()));
        populations_ = populations_.cwiseMax(0.0);
        eigenstates_ = solver.eigenvectors();
    }

    static DensityOperator pure(const StateVector& psi)
    {
        const auto& a = psi.amplitudes();
        ComplexMatrix rho = a * a.adjoint() / a.squaredNorm();
        rho = 0.5 * (rho + rho.adjoint()).eval();
        return DensityOperator(psi.spin(), std::move(rho));
    }

    static DensityOperator maximally_mixed(SpinQuantumNumber spin)
    {
        return DensityOperator(spin, ComplexMatrix::Identity(spin.dim(), spin.dim()) / double(spin.dim()));
    }

    /// weight * a + (1 - weight) * b.
    static DensityOperator mixture(double weight, const DensityOperator& a, const DensityOperator& b)
    {
        if (!(weight >= 0.0 && weight <= 1.0))
            throw std::invalid_argument("density operator: mixture weight must lie in [0, 1]");
        if (a.spin() != b.spin())
            throw DimensionMismatch("density operator: mixing operators of different dimension");
        return DensityOperator(a.spin(), weight * a.matrix() + (1.0 - weight) * b.matrix());
    }

    SpinQuantumNumber spin() const noexcept { return spin_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    /// Eigenvalues p_i (ascending, clamped at zero) and eigenvectors |i>.
    const RealVector& populations() const noexcept { return populations_; }
    const ComplexMatrix& eigenstates() const noexcept { return eigenstates_; }

private:
    SpinQuantumNumber spin_;
    ComplexMatrix matrix_;
    RealVector populations_;
    ComplexMatrix eigenstates_;
};

/// C = 4 (symmetrized second moments - <J><J>^T).
inline QfiMatrix pure_qfi_matrix(const StateVector& state, const AngularMomentumSet& ops)
{
    const SpinImages images = spin_images(ops, state);
    const Eigen::Vector3d mean = expectation(state, images);
    const Eigen::Matrix3d moments = symmetrized_second_moments(images);
    return QfiMatrix::from_matrix(4.0 * (moments - mean * mean.transpose()));
}

/**
 * C_kl = sum over i != j of (p_i - p_j)^2 / (p_i + p_j)
 *        * [<i|J_k|j><j|J_l|i> + <i|J_l|j><j|J_k|i>].
 *
 * Pairs with p_i + p_j <= eigen_floor contribute 0/0 and are skipped.
 */
inline QfiMatrix mixed_qfi_matrix(const DensityOperator& rho, const AngularMomentumSet& ops,
                                  double eigen_floor = 1e-10)
{
    if (rho.spin() != ops.spin)
        throw DimensionMismatch("qfi: density operator and operators have different dimensions");
    if (!(eigen_floor >= 0.0))
        throw std::invalid_argument("qfi: eigen_floor must be non-negative");

    const auto& p = rho.populations();
    const auto& u = rho.eigenstates();
    const Eigen::Index d = p.size();

    // A pair contributes only if p_i + p_j exceeds the floor, so at least one
    // member has p > floor / 2. Rows of U^dag J_k U are formed for those
    // eigenvectors only; A_k(j, i) = conj(A_k(i, j)) covers the rest.
    std::vector<Eigen::Index> support;
    std::vector<char> in_support(static_cast<std::size_t>(d), 0);
    for (Eigen::Index i = 0; i < d; ++i)
        if (p[i] > 0.5 * eigen_floor) {
            support.push_back(i);
            in_support[static_cast<std::size_t>(i)] = 1;
        }
    ComplexMatrix u_support(d, static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s)
        u_support.col(static_cast<Eigen::Index>(s)) = u.col(support[s]);
    const ComplexMatrix rows[3] = {(ops.jx * u_support).adjoint() * u, (ops.jy * u_support).adjoint() * u,
                                   (ops.jz * u_support).adjoint() * u};

    Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
    for (std::size_t s = 0; s < support.size(); ++s) {
        const Eigen::Index i = support[s];
        const auto r = static_cast<Eigen::Index>(s);
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j || p[i] + p[j] <= eigen_floor)
                continue;
            const double diff = p[i] - p[j];
            double weight = diff * diff / (p[i] + p[j]);
            if (weight == 0.0)
                continue;
            // (j, i) gives the same term; count it here unless j is visited as a row itself.
            if (!in_support[static_cast<std::size_t>(j)])
                weight *= 2.0;
            for (int k = 0; k < 3; ++k)
                for (int l = k; l < 3; ++l)
                    c(k, l) += weight * (rows[k](r, j) * std::conj(rows[l](r, j))
                                         + rows[l](r, j) * std::conj(rows[k](r, j)));
        }
    }
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < k; ++l)
            c(k, l) = c(l, k);

    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (c.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::runtime_error("qfi: imaginary residue in the mixed-state Fisher matrix");
    return QfiMatrix::from_matrix(c.real());
}

/// F_max / N.
inline double max_mean_qfi(const QfiMatrix& qm, int n_particles)
{
    if (n_particles < 1)
        throw std::invalid_argument("qfi: particle number must be positive");
    return qm.f_max() / n_particles;
}

/// 1 / sqrt(v F): the quantum Cramer-Rao phase uncertainty after v repetitions.
inline double cramer_rao_bound(double fisher, double experiments)
{
    if (!(fisher > 0.0))
        throw std::invalid_argument("cramer-rao: Fisher information must be positive");
    if (!(experiments >= 1.0))
        throw std::invalid_argument("cramer-rao: experiment count must be at least 1");
    return 1.0 / std::sqrt(experiments * fisher);
}

} // namespace dwqfi
