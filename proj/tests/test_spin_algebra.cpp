#include <catch_amalgamated.hpp>

#include "dwqfi/spin_algebra.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace dwqfi;
using Catch::Approx;

namespace {

SpinQuantumNumber spin_j(double j) { return SpinQuantumNumber::from_twice_j(static_cast<int>(std::lround(2 * j))); }

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("spin quantum number rejects non-positive 2j", "[spin]")
{
    CHECK_THROWS_AS(SpinQuantumNumber::from_twice_j(0), std::invalid_argument);
    CHECK_THROWS_AS(SpinQuantumNumber::from_twice_j(-3), std::invalid_argument);
    const auto s = SpinQuantumNumber::from_particles(100);
    CHECK(s.j() == 50.0);
    CHECK(s.dim() == 101);
}

TEST_CASE("operators for spin 1/2 are Pauli matrices over two", "[spin][operators]")
{
    const auto ops = build_operators(spin_j(0.5));
    CHECK(ops.jz(0, 0).real() == -0.5);
    CHECK(ops.jz(1, 1).real() == 0.5);
    CHECK(ops.jx(0, 1).real() == Approx(0.5).margin(1e-15));
    CHECK(ops.jx(1, 0).real() == Approx(0.5).margin(1e-15));
    // J_y = sigma_y / 2 with m ascending: <+1/2|J_y|-1/2> = -i/2.
    CHECK(ops.jy(1, 0).imag() == Approx(-0.5).margin(1e-15));
    CHECK(ops.jy(0, 1).imag() == Approx(0.5).margin(1e-15));
}

TEST_CASE("operators for spin 1 follow the ladder formula", "[spin][operators]")
{
    const auto ops = build_operators(spin_j(1.0));
    CHECK(ops.jz.diagonal().real().isApprox(Eigen::Vector3d(-1, 0, 1)));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(ops.jx(0, 1).real() == Approx(r).epsilon(1e-15));
    CHECK(ops.jx(1, 2).real() == Approx(r).epsilon(1e-15));
    CHECK(ops.jx(0, 2).real() == 0.0);
    CHECK(ops.jz2.diagonal().isApprox(Eigen::Vector3d(1, 0, 1)));
}

TEST_CASE("angular momentum algebra holds", "[spin][operators][property]")
{
    for (double j : {0.5, 1.0, 5.0, 50.0}) {
        INFO("j = " << j);
        const auto ops = build_operators(spin_j(j));
        const Complex i{0.0, 1.0};
        const auto d = ops.dim();
        const ComplexMatrix identity = ComplexMatrix::Identity(d, d);

        CHECK(max_abs(ops.jx.imag().cast<Complex>()) == 0.0);
        CHECK(max_abs(ops.jz.imag().cast<Complex>()) == 0.0);
        CHECK(max_abs(ops.jy.real().cast<Complex>()) == 0.0);
        CHECK(max_abs(ops.jx - ops.jx.transpose()) == 0.0);
        CHECK(max_abs(ops.jy + ops.jy.transpose()) == 0.0);

        CHECK(max_abs(ops.jx * ops.jy - ops.jy * ops.jx - i * ops.jz) < 1e-12);
        CHECK(max_abs(ops.jy * ops.jz - ops.jz * ops.jy - i * ops.jx) < 1e-12);
        CHECK(max_abs(ops.jz * ops.jx - ops.jx * ops.jz - i * ops.jy) < 1e-12);

        const ComplexMatrix casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
        CHECK(max_abs(casimir - j * (j + 1) * identity) < 1e-10);
        CHECK((ops.jz2 - (ops.jz * ops.jz).real()).cwiseAbs().maxCoeff() == 0.0);

        const ComplexMatrix inner = ops.jx * ops.jz - ops.jz * ops.jx;
        CHECK(max_abs(ops.jx * inner - inner * ops.jx) > 0.1);
    }
}

TEST_CASE("Dicke states", "[spin][states]")
{
    const auto one = dicke_state(spin_j(1.0), 0.0);
    CHECK(one.amplitudes().isApprox(Eigen::Vector3cd(0, 1, 0)));

    const auto bottom = dicke_state(spin_j(50.0), -50.0);
    CHECK(bottom[0] == Complex(1.0));
    CHECK(bottom.amplitudes().tail(100).norm() == 0.0);

    CHECK_THROWS_AS(dicke_state(spin_j(1.0), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(dicke_state(spin_j(1.0), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(dicke_state(spin_j(0.5), 0.0), std::invalid_argument);
}

TEST_CASE("state vectors must be normalized", "[spin][states]")
{
    const auto s = spin_j(0.5);
    CHECK_THROWS_AS(StateVector(s, Eigen::Vector2cd(1.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(s, Eigen::Vector3cd(1.0, 0.0, 0.0)), DimensionMismatch);
    CHECK_THROWS_AS(StateVector::normalized(s, Eigen::Vector2cd(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("spin coherent state examples", "[spin][coherent]")
{
    const auto half = spin_coherent_state(spin_j(0.5), std::numbers::pi / 2, 0.0);
    CHECK(std::abs(half[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(half[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

    for (double j : {0.5, 3.0, 250.0}) {
        const auto s = spin_j(j);
        CHECK(spin_coherent_state(s, 0.0, 1.3).amplitudes() == dicke_state(s, -j).amplitudes());
        const auto top = spin_coherent_state(s, std::numbers::pi, 0.0);
        CHECK(top.amplitudes() == dicke_state(s, j).amplitudes());
        const auto top_phase = spin_coherent_state(s, std::numbers::pi, 0.7);
        CHECK(std::abs(std::abs(top_phase[s.twice_j()]) - 1.0) < 1e-15);
    }

    CHECK_THROWS_AS(spin_coherent_state(spin_j(1.0), -0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spin_coherent_state(spin_j(1.0), 3.2, 0.0), std::invalid_argument);
}

TEST_CASE("equator coherent state amplitudes are 2^-j sqrt(C(2j, j+m))", "[spin][coherent][property]")
{
    for (int twice_j = 1; twice_j <= 500; twice_j += (twice_j < 20 ? 1 : 37)) {
        const auto s = SpinQuantumNumber::from_twice_j(twice_j);
        const auto state = spin_coherent_state(s, std::numbers::pi / 2, 0.0);
        double worst = 0.0;
        for (int k = 0; k <= twice_j; ++k) {
            const long double expected = std::sqrt(oracle::binomial(twice_j, k)) * std::pow(2.0L, -0.5L * twice_j);
            worst = std::max(worst, double(std::abs((state[k].real() - expected) / expected)));
            CHECK(state[k].imag() == 0.0);
        }
        INFO("2j = " << twice_j);
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("coherent state expectation values lie on the Bloch sphere", "[spin][coherent][property]")
{
    for (double j : {0.5, 7.5, 250.0}) {
        const auto s = spin_j(j);
        const auto ops = build_operators(s);
        for (int a = 0; a < 10; ++a) {
            for (int b = 0; b < 10; ++b) {
                const double theta = std::numbers::pi * a / 9.0;
                const double phi = 2.0 * std::numbers::pi * b / 10.0;
                const Eigen::Vector3d expected =
                    j * Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), -std::cos(theta));
                const Eigen::Vector3d got = expectation(ops, spin_coherent_state(s, theta, phi));
                INFO("j=" << j << " theta=" << theta << " phi=" << phi);
                CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-9 * j);
            }
        }
    }
}

TEST_CASE("coherent state equals the rotated lowest-weight state", "[spin][coherent][oracle]")
{
    const Complex i{0.0, 1.0};
    for (double j : {0.5, 1.0, 2.5, 5.0}) {
        const auto s = spin_j(j);
        const auto ops = build_operators(s);
        for (double theta : {0.3, 1.1, std::numbers::pi / 2, 2.9}) {
            for (double phi : {0.0, 0.8, 3.5, 5.9}) {
                const ComplexMatrix generator = -i * theta * (ops.jx * std::sin(phi) - ops.jy * std::cos(phi));
                const ComplexVector rotated = oracle::expm(generator) * dicke_state(s, -j).amplitudes();
                const ComplexVector direct = spin_coherent_state(s, theta, phi).amplitudes();
                INFO("j=" << j << " theta=" << theta << " phi=" << phi);
                CHECK((rotated - direct).norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("expectation values of Dicke states", "[spin][expectation]")
{
    const auto s = spin_j(3.0);
    const auto ops = build_operators(s);
    for (double m = -3.0; m <= 3.0; m += 1.0) {
        const Eigen::Vector3d e = expectation(ops, dicke_state(s, m));
        CHECK(e[0] == Approx(0.0).margin(1e-15));
        CHECK(e[1] == Approx(0.0).margin(1e-15));
        CHECK(e[2] == m);
    }
    const auto n100 = SpinQuantumNumber::from_particles(100);
    const auto ops100 = build_operators(n100);
    const Eigen::Vector3d x = expectation(ops100, spin_coherent_state(n100, std::numbers::pi / 2, 0.0));
    CHECK(x[0] == Approx(50.0).epsilon(1e-12));
    CHECK(x[1] == Approx(0.0).margin(1e-10));
    CHECK(x[2] == Approx(0.0).margin(1e-10));
    const Eigen::Vector3d z = expectation(ops100, spin_coherent_state(n100, 0.0, 0.0));
    CHECK(z[2] == -50.0);

    CHECK_THROWS_AS(expectation(ops, dicke_state(spin_j(1.0), 0.0)), DimensionMismatch);
}

TEST_CASE("symmetrized second moments", "[spin][moments]")
{
    const double j = 4.0;
    const auto s = spin_j(j);
    const auto ops = build_operators(s);
    for (double m = -j; m <= j; m += 1.0) {
        const Eigen::Matrix3d mom = symmetrized_second_moments(ops, dicke_state(s, m));
        const double transverse = 0.5 * (j * (j + 1) - m * m);
        CHECK(mom(0, 0) == Approx(transverse).epsilon(1e-13));
        CHECK(mom(1, 1) == Approx(transverse).epsilon(1e-13));
        CHECK(mom(2, 2) == Approx(m * m).margin(1e-13));
        CHECK(std::abs(mom(0, 1)) < 1e-13);
    }

    const auto half = spin_j(0.5);
    const Eigen::Matrix3d mh =
        symmetrized_second_moments(build_operators(half), spin_coherent_state(half, std::numbers::pi / 2, 0.0));
    for (int k = 0; k < 3; ++k)
        CHECK(mh(k, k) == Approx(0.25).epsilon(1e-14));

    std::mt19937_64 rng(7);
    const auto s25 = spin_j(25.0);
    const auto ops25 = build_operators(s25);
    for (int trial = 0; trial < 10; ++trial) {
        const StateVector psi(s25, oracle::random_amplitudes(51, rng));
        const Eigen::Matrix3d mom = symmetrized_second_moments(ops25, psi);
        CHECK((mom - mom.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(mom.trace() == Approx(25.0 * 26.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(symmetrized_second_moments(ops, dicke_state(half, 0.5)), DimensionMismatch);
}
