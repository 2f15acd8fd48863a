// Independent reference computations used only by the tests. Nothing here
// calls into the propagator or the QFI code paths it is compared against.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// exp(A) by scaling and squaring with a truncated Taylor series.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.25)
        ++squarings;
    const Eigen::MatrixXcd scaled = a / std::ldexp(1.0, squarings);

    const auto d = a.rows();
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(d, d);
    for (int k = 1; k <= 24; ++k) {
        term = (term * scaled / double(k)).eval();
        result += term;
    }
    for (int s = 0; s < squarings; ++s)
        result = (result * result).eval();
    return result;
}

/// C(n, k) by a running product in long double; exact enough up to n = 500.
inline long double binomial(int n, int k)
{
    long double value = 1.0L;
    for (int i = 1; i <= k; ++i)
        value = value * (n - k + i) / i;
    return value;
}

/**
 * Fourth-order Runge-Kutta on the amplitude equations
 *   i dc_m/ds = 2 m^2 c_m + (w/2) c_{m-1} sqrt((j+m)(j-m+1)) + (w/2) c_{m+1} sqrt((j-m)(j+m+1))
 * with w = Omega/kappa and s = kappa t; c is indexed by m + j.
 */
inline Eigen::VectorXcd rk4_amplitudes(int n_particles, double omega_over_kappa, Eigen::VectorXcd c, double s_end,
                                       double step)
{
    const double j = 0.5 * n_particles;
    const int d = n_particles + 1;
    const Complex minus_i{0.0, -1.0};
    auto rhs = [&](const Eigen::VectorXcd& x) {
        Eigen::VectorXcd out(d);
        for (int idx = 0; idx < d; ++idx) {
            const double m = idx - j;
            Complex value = 2.0 * m * m * x[idx];
            if (idx > 0)
                value += 0.5 * omega_over_kappa * x[idx - 1] * std::sqrt((j + m) * (j - m + 1.0));
            if (idx + 1 < d)
                value += 0.5 * omega_over_kappa * x[idx + 1] * std::sqrt((j - m) * (j + m + 1.0));
            out[idx] = minus_i * value;
        }
        return out;
    };
    const long steps = std::lround(s_end / step);
    for (long n = 0; n < steps; ++n) {
        const Eigen::VectorXcd k1 = rhs(c);
        const Eigen::VectorXcd k2 = rhs(c + 0.5 * step * k1);
        const Eigen::VectorXcd k3 = rhs(c + 0.5 * step * k2);
        const Eigen::VectorXcd k4 = rhs(c + step * k3);
        c += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return c;
}

inline Eigen::VectorXcd random_amplitudes(int dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = Complex(gauss(rng), gauss(rng));
    return v / v.norm();
}

inline Eigen::Vector3d random_unit_vector(std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
    return v.normalized();
}

} // namespace oracle
