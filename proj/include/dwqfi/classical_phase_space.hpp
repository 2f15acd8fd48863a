/**
 * @brief Mean-field phase space of the double well.
 *
 * Canonical pair (p, phi) with p = -cos(theta) the population imbalance and
 * phi the relative phase. Time is measured in units of 1/kappa_r, so the
 * rescaled Hamiltonian is
 *
 *     H(p, phi) = lambda sqrt(1 - p^2) cos(phi) + p^2
 *
 * with dp/dt = -dH/dphi and dphi/dt = dH/dp.
 */
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwqfi::classical {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Thrown when the phase equation is evaluated at (or next to) |p| = 1.
struct PoleSingularity : std::domain_error {
    using std::domain_error::domain_error;
};

struct ClassicalParams {
    double lambda = 0.0;

    void validate() const
    {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("classical: lambda must be finite and non-negative");
    }
};

struct PhaseState {
    double p = 0.0;
    double phi = 0.0;
};

/// phi reduced to [0, 2 pi).
inline double wrap_phase(double phi)
{
    double wrapped = std::fmod(phi, two_pi);
    if (wrapped < 0.0)
        wrapped += two_pi;
    return wrapped >= two_pi ? 0.0 : wrapped;
}

/// Euclidean distance on the cylinder, phase difference taken in (-pi, pi].
inline double phase_distance(const PhaseState& a, const PhaseState& b)
{
    double dphi = std::remainder(a.phi - b.phi, two_pi);
    return std::hypot(a.p - b.p, dphi);
}

/// Point on the cylinder corresponding to polar angles of a coherent state.
inline PhaseState from_angles(double theta, double phi) { return {-std::cos(theta), phi}; }

inline double classical_hamiltonian(const PhaseState& s, const ClassicalParams& params)
{
    if (!(std::abs(s.p) <= 1.0))
        throw std::invalid_argument("classical: |p| must not exceed 1");
    return params.lambda * std::sqrt(1.0 - s.p * s.p) * std::cos(s.phi) + s.p * s.p;
}

struct Velocity {
    double dp;
    double dphi;
};

inline Velocity equations_of_motion(const PhaseState& s, const ClassicalParams& params)
{
    if (!(std::abs(s.p) < 1.0 - 1e-12))
        throw PoleSingularity("classical: phase velocity diverges at p = " + std::to_string(s.p));
    const double root = std::sqrt(1.0 - s.p * s.p);
    return {params.lambda * root * std::sin(s.phi),
            2.0 * s.p - params.lambda * s.p * std::cos(s.phi) / root};
}

/// [[-H_pphi, -H_phiphi], [H_pp, H_pphi]] acting on (dp, dphi).
inline Eigen::Matrix2d linearize(const PhaseState& s, const ClassicalParams& params)
{
    if (!(std::abs(s.p) < 1.0 - 1e-12))
        throw PoleSingularity("classical: cannot linearize at the pole p = " + std::to_string(s.p));
    const double lambda = params.lambda;
    const double q = 1.0 - s.p * s.p;
    const double root = std::sqrt(q);
    const double h_pphi = lambda * s.p * std::sin(s.phi) / root;
    const double h_phiphi = -lambda * root * std::cos(s.phi);
    const double h_pp = 2.0 - lambda * std::cos(s.phi) / (q * root);
    Eigen::Matrix2d m;
    m << -h_pphi, -h_phiphi, h_pp, h_pphi;
    return m;
}

enum class Stability { StableCenter, UnstableSaddle, Marginal };
enum class Regime { AboveBifurcation, BelowBifurcation, AtBifurcation };

inline constexpr double bifurcation_lambda = 2.0;
inline constexpr double stability_tolerance = 1e-9;

inline const char* to_string(Stability s)
{
    switch (s) {
    case Stability::StableCenter: return "stable_center";
    case Stability::UnstableSaddle: return "unstable_saddle";
    case Stability::Marginal: return "marginal";
    }
    return "?";
}

inline const char* to_string(Regime r)
{
    switch (r) {
    case Regime::AboveBifurcation: return "above_bifurcation";
    case Regime::BelowBifurcation: return "below_bifurcation";
    case Regime::AtBifurcation: return "at_bifurcation";
    }
    return "?";
}

inline Regime regime_of(double lambda)
{
    if (std::abs(lambda - bifurcation_lambda) <= 1e-12)
        return Regime::AtBifurcation;
    return lambda > bifurcation_lambda ? Regime::AboveBifurcation : Regime::BelowBifurcation;
}

/// The Jacobian is trace-free at fixed points, so its eigenvalues are
/// +-sqrt(-det M); only the sign of lambda^2 = -det M matters.
inline Stability classify(double eigenvalue_squared)
{
    if (eigenvalue_squared < -stability_tolerance)
        return Stability::StableCenter;
    if (eigenvalue_squared > stability_tolerance)
        return Stability::UnstableSaddle;
    return Stability::Marginal;
}

struct FixedPointReport {
    PhaseState location;
    double theta_equivalent;
    Eigen::Matrix2d jacobian;
    double eigenvalue_squared;
    Stability stability;
    Regime regime;
};

inline FixedPointReport describe_fixed_point(const PhaseState& s, const ClassicalParams& params)
{
    FixedPointReport report;
    report.location = {s.p, wrap_phase(s.phi)};
    report.theta_equivalent = std::acos(-s.p);
    report.jacobian = linearize(s, params);
    report.eigenvalue_squared = -report.jacobian.determinant();
    report.stability = classify(report.eigenvalue_squared);
    report.regime = regime_of(params.lambda);
    return report;
}

/**
 * Fixed points, in the order (0,0), (0,pi), then for lambda < 2 the pair
 * p = +-sqrt(1 - (lambda/2)^2) at phi = 0 (positive branch first).
 * The p = +-1 candidates are poles of the phase equation and never returned;
 * at lambda = 0 the branch pair sits on the poles and is dropped.
 */
inline std::vector<FixedPointReport> find_fixed_points(const ClassicalParams& params)
{
    params.validate();
    std::vector<FixedPointReport> points;
    points.push_back(describe_fixed_point({0.0, 0.0}, params));
    points.push_back(describe_fixed_point({0.0, std::numbers::pi}, params));

    if (regime_of(params.lambda) == Regime::BelowBifurcation) {
        const double half = 0.5 * params.lambda;
        const double p = std::sqrt(1.0 - half * half);
        if (1.0 - p > 1e-12) {
            points.push_back(describe_fixed_point({p, 0.0}, params));
            points.push_back(describe_fixed_point({-p, 0.0}, params));
        }
    }
    return points;
}

enum class TrajectoryStatus { Ok, StepTooLarge, PoleSingularity };

inline const char* to_string(TrajectoryStatus s)
{
    switch (s) {
    case TrajectoryStatus::Ok: return "ok";
    case TrajectoryStatus::StepTooLarge: return "step_too_large";
    case TrajectoryStatus::PoleSingularity: return "pole_singularity";
    }
    return "?";
}

struct TrajectorySample {
    double t;
    double p;
    double phi;           ///< reduced to [0, 2 pi)
    double phi_unwrapped; ///< continuous along the trajectory
    double energy;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::Ok;
    double max_energy_drift = 0.0;
};

inline constexpr double pole_start_margin = 1e-6;
inline constexpr double pole_step_margin = 1e-9;

/// Clamps |p| to 1 - pole_start_margin so a trajectory may start there.
/// Returns whether an offset was applied.
inline bool offset_from_pole(PhaseState& s)
{
    const double limit = 1.0 - pole_start_margin;
    if (std::abs(s.p) <= limit)
        return false;
    s.p = std::copysign(limit, s.p);
    return true;
}

/**
 * Classical RK4 from s0 up to t_end with step dt, keeping every
 * record_every-th step (the final step is always kept).
 *
 * The energy drift bound is 1e-8 * max(1, |H(0)|); exceeding it flags the
 * trajectory StepTooLarge but integration continues. A step that reaches
 * |p| >= 1 - 1e-9 is rejected and ends the trajectory as PoleSingularity.
 */
inline Trajectory integrate_trajectory(const PhaseState& s0, const ClassicalParams& params, double t_end,
                                       double dt, int record_every = 1)
{
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("classical: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("classical: t_end must be finite and non-negative");
    if (record_every < 1)
        throw std::invalid_argument("classical: record_every must be positive");
    if (!(std::abs(s0.p) <= 1.0 - pole_start_margin))
        throw PoleSingularity("classical: initial state lies within 1e-6 of a pole");

    Trajectory out;
    const double h0 = classical_hamiltonian(s0, params);
    const double drift_bound = 1e-8 * std::max(1.0, std::abs(h0));
    out.samples.push_back({0.0, s0.p, wrap_phase(s0.phi), s0.phi, h0});

    auto advance = [&](PhaseState s, double step) {
        auto shifted = [](PhaseState base, Velocity v, double h) {
            return PhaseState{base.p + h * v.dp, base.phi + h * v.dphi};
        };
        const Velocity k1 = equations_of_motion(s, params);
        const Velocity k2 = equations_of_motion(shifted(s, k1, 0.5 * step), params);
        const Velocity k3 = equations_of_motion(shifted(s, k2, 0.5 * step), params);
        const Velocity k4 = equations_of_motion(shifted(s, k3, step), params);
        return PhaseState{s.p + step / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
                          s.phi + step / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi)};
    };

    const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
    PhaseState s = s0;
    for (long long n = 1; n <= steps; ++n) {
        const double t_prev = (n - 1) * dt;
        const double t = std::min(t_end, n * dt);
        PhaseState next;
        try {
            next = advance(s, t - t_prev);
        } catch (const PoleSingularity&) {
            out.status = TrajectoryStatus::PoleSingularity;
            break;
        }
        if (!(std::abs(next.p) < 1.0 - pole_step_margin)) {
            out.status = TrajectoryStatus::PoleSingularity;
            break;
        }
        s = next;
        const double h = classical_hamiltonian(s, params);
        out.max_energy_drift = std::max(out.max_energy_drift, std::abs(h - h0));
        if (n % record_every == 0 || n == steps)
            out.samples.push_back({t, s.p, wrap_phase(s.phi), s.phi, h});
    }
    if (out.status == TrajectoryStatus::Ok && out.max_energy_drift >= drift_bound)
        out.status = TrajectoryStatus::StepTooLarge;
    return out;
}

/// lambda * sin(theta0) cos(phi0) + cos^2(theta0) > lambda: the initial
/// condition is self-trapped.
inline bool is_self_trapped(double theta0, double phi0, double lambda)
{
    const double c = std::cos(theta0);
    return lambda * std::sin(theta0) * std::cos(phi0) + c * c > lambda;
}

/**
 * Critical lambda_c = cos^2(theta0) / (1 - sin(theta0) cos(phi0)); below it the
 * initial condition is self-trapped, above it the imbalance oscillates about
 * zero. Returns nullopt when the denominator vanishes (theta0 = pi/2,
 * phi0 = 0), where the expression is 0/0.
 */
inline std::optional<double> self_trapping_critical_omega(double theta0, double phi0)
{
    if (!(theta0 >= 0.0 && theta0 <= std::numbers::pi))
        throw std::invalid_argument("classical: theta0 must lie in [0, pi]");
    if (!std::isfinite(phi0))
        throw std::invalid_argument("classical: phi0 must be finite");
    const double denominator = 1.0 - std::sin(theta0) * std::cos(phi0);
    if (std::abs(denominator) <= 1e-12)
        return std::nullopt;
    const double c = std::cos(theta0);
    return c * c / denominator;
}

} // namespace dwqfi::classical
