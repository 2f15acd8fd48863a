/**
 * @brief Experiment runners. Each runner turns a config into a set of named
 * CSV tables; run_experiment writes them together with a manifest.
 *
 * Tables are built in memory in grid order, so output bytes are independent
 * of the worker count.
 */
#pragma once

#include "dwqfi/classical_phase_space.hpp"
#include "dwqfi/experiments/config.hpp"
#include "dwqfi/experiments/format.hpp"
#include "dwqfi/experiments/worker_pool.hpp"
#include "dwqfi/qfi.hpp"
#include "dwqfi/quantum_dynamics.hpp"
#include "dwqfi/spin_algebra.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef DWQFI_VERSION
#define DWQFI_VERSION "0.0.0"
#endif

namespace dwqfi::experiments {

inline constexpr std::string_view software_name = "doublewell-qfi";
inline constexpr std::string_view software_version = DWQFI_VERSION;

struct OutputFile {
    std::string name;
    std::string text;
};

struct RunOutput {
    std::vector<OutputFile> files;
    std::vector<std::string> notes;
};

// Quantities evaluated on an evolved state. Shared by the dedicated runners
// and the generic sweep so both produce bit-identical numbers.
namespace observables {

inline double jz(const StateVector& psi)
{
    const auto spin = psi.spin();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < psi.dim(); ++i)
        sum += std::norm(psi[i]) * spin.m_of(i);
    return sum;
}

inline double f_bar_max(const AngularMomentumSet& ops, const StateVector& psi)
{
    return max_mean_qfi(pure_qfi_matrix(psi, ops), ops.spin.n_particles());
}

} // namespace observables

/// A propagator with a fixed initial state, evaluated at arbitrary times.
class Evolution {
public:
    Evolution(const ModelParams& params, const StateVector& psi0)
        : propagator_(params), psi0_(psi0), coefficients_(propagator_.to_eigenbasis(psi0))
    {
    }

    StateVector at(double kappa_t) const
    {
        return StateVector(propagator_.spin(), propagator_.from_eigenbasis(coefficients_, kappa_t));
    }
    const StateVector& initial() const noexcept { return psi0_; }

private:
    Propagator propagator_;
    StateVector psi0_;
    ComplexVector coefficients_;
};

inline std::vector<std::string> metadata_lines(const ExperimentConfig& c, std::vector<std::string> extra = {})
{
    std::vector<std::string> lines{
        std::string(software_name) + " " + std::string(software_version) + " experiment="
            + std::string(to_string(c.experiment)),
        "config_hash: sha256:" + sha256_hex(canonical_text(c)),
        "units: " + std::string(c.experiment == ExperimentKind::PhasePortrait ? classical_units_note : units_note),
        "float format: " + std::string(float_format_note),
    };
    for (auto& line : extra)
        lines.push_back(std::move(line));
    return lines;
}

/// File-name friendly rendering of a parameter value.
inline std::string value_tag(double value)
{
    std::string s = format_double(value);
    for (char& ch : s)
        if (ch == '-')
            ch = 'm';
    return s;
}

inline RunOutput run_phase_portrait(const ExperimentConfig& c)
{
    c.validate();
    const auto& opt = c.phase_portrait;
    const std::vector<double> p_values = linspace(opt.p_min, opt.p_max, opt.p_count);
    std::vector<double> phi_values(static_cast<std::size_t>(opt.phi_count));
    for (int k = 0; k < opt.phi_count; ++k)
        phi_values[static_cast<std::size_t>(k)] = classical::two_pi * k / opt.phi_count;

    const double t_end = c.time.max;
    const long long steps = static_cast<long long>(std::ceil(t_end / opt.dt - 1e-9));
    const int record_every =
        c.time.samples <= 1 ? static_cast<int>(std::max<long long>(1, steps))
                            : static_cast<int>(std::max<long long>(1, std::llround(double(steps) / (c.time.samples - 1))));

    const std::size_t per_lambda = p_values.size() * phi_values.size();
    const std::size_t total = c.lambda.size() * per_lambda;

    struct Item {
        classical::PhaseState start;
        bool offset = false;
        classical::Trajectory trajectory;
    };
    std::vector<Item> items(total);
    parallel_for(total, c.workers, [&](std::size_t idx) {
        const std::size_t l = idx / per_lambda;
        const std::size_t k = idx % per_lambda;
        Item& item = items[idx];
        item.start = {p_values[k / phi_values.size()], phi_values[k % phi_values.size()]};
        item.offset = classical::offset_from_pole(item.start);
        item.trajectory = classical::integrate_trajectory(item.start, {c.lambda[l]}, t_end, opt.dt, record_every);
    });

    RunOutput out;
    CsvTable fixed(metadata_lines(c),
                   {"lambda", "p", "phi", "theta", "eigenvalue_squared", "stability", "regime"});
    for (std::size_t l = 0; l < c.lambda.size(); ++l) {
        const double lambda = c.lambda[l];
        for (const auto& fp : classical::find_fixed_points({lambda}))
            fixed.add_row({format_double(lambda), format_double(fp.location.p), format_double(fp.location.phi),
                           format_double(fp.theta_equivalent), format_double(fp.eigenvalue_squared),
                           classical::to_string(fp.stability), classical::to_string(fp.regime)});

        int offsets = 0;
        for (std::size_t k = 0; k < per_lambda; ++k)
            offsets += items[l * per_lambda + k].offset ? 1 : 0;

        CsvTable table(metadata_lines(c, {"lambda: " + format_double(lambda),
                                          "classical time t in units of 1/kappa_r, RK4 step "
                                              + format_double(opt.dt),
                                          "pole offset " + format_double(classical::pole_start_margin)
                                              + " applied to " + std::to_string(offsets) + " starting points"}),
                       {"trajectory", "p0", "phi0", "t", "p", "phi", "H", "status"});
        for (std::size_t k = 0; k < per_lambda; ++k) {
            const Item& item = items[l * per_lambda + k];
            const std::string status = classical::to_string(item.trajectory.status);
            for (const auto& s : item.trajectory.samples)
                table.add_row({std::to_string(k), format_double(item.start.p), format_double(item.start.phi),
                               format_double(s.t), format_double(s.p), format_double(s.phi),
                               format_double(s.energy), status});
        }
        out.files.push_back({"trajectories_lambda_" + value_tag(lambda) + ".csv", table.text()});
    }
    out.files.push_back({"fixed_points.csv", fixed.text()});
    return out;
}

namespace detail {

/// Evaluates `metric(evolution, t)` on every (lambda, time) pair, one work
/// item per lambda.
template <typename Metric>
std::vector<std::vector<double>> lambda_time_table(const ExperimentConfig& c, const std::vector<double>& times,
                                                   Metric metric)
{
    const auto spin = SpinQuantumNumber::from_particles(c.n_particles);
    const StateVector psi0 = spin_coherent_state(spin, c.initial_state.theta, c.initial_state.phi);
    std::vector<std::vector<double>> values(c.lambda.size());
    parallel_for(c.lambda.size(), c.workers, [&](std::size_t l) {
        const Evolution evolution({c.n_particles, c.lambda[l]}, psi0);
        auto& row = values[l];
        row.reserve(times.size());
        for (double t : times) {
            try {
                row.push_back(metric(evolution, t));
            } catch (const std::exception& e) {
                throw std::runtime_error("failed at lambda=" + format_double(c.lambda[l])
                                         + ", kappa_t=" + format_double(t) + ": " + e.what());
            }
        }
    });
    return values;
}

inline std::string initial_state_note(const ExperimentConfig& c)
{
    return "initial spin coherent state theta=" + format_double(c.initial_state.theta)
           + " phi=" + format_double(c.initial_state.phi) + ", N=" + std::to_string(c.n_particles);
}

} // namespace detail

inline RunOutput run_fidelity(const ExperimentConfig& c)
{
    c.validate();
    const auto times = c.time.values();
    const auto values = detail::lambda_time_table(c, times, [](const Evolution& ev, double t) {
        return fidelity(ev.initial(), ev.at(t));
    });
    CsvTable table(metadata_lines(c, {detail::initial_state_note(c)}), {"lambda", "kappa_t", "fidelity"});
    for (std::size_t l = 0; l < c.lambda.size(); ++l)
        for (std::size_t i = 0; i < times.size(); ++i)
            table.add_row({c.lambda[l], times[i], values[l][i]});
    return {{{"fidelity.csv", table.text()}}, {}};
}

inline RunOutput run_jz_series(const ExperimentConfig& c)
{
    c.validate();
    const auto times = c.time.values();
    const auto values = detail::lambda_time_table(c, times, [](const Evolution& ev, double t) {
        return observables::jz(ev.at(t));
    });
    CsvTable table(metadata_lines(c, {detail::initial_state_note(c)}), {"lambda", "kappa_t", "jz_expectation"});
    for (std::size_t l = 0; l < c.lambda.size(); ++l)
        for (std::size_t i = 0; i < times.size(); ++i)
            table.add_row({c.lambda[l], times[i], values[l][i]});
    return {{{"jz_series.csv", table.text()}}, {}};
}

inline RunOutput run_qfi_map(const ExperimentConfig& c)
{
    c.validate();
    const auto spin = SpinQuantumNumber::from_particles(c.n_particles);
    const AngularMomentumSet ops = build_operators(spin);

    // Grid times first, then slice times, evaluated in one pass per lambda.
    std::vector<double> times = c.time.values();
    const std::size_t grid_count = times.size();
    times.insert(times.end(), c.qfi_map.slices.begin(), c.qfi_map.slices.end());

    const auto values = detail::lambda_time_table(c, times, [&](const Evolution& ev, double t) {
        return observables::f_bar_max(ops, ev.at(t));
    });

    RunOutput out;
    CsvTable map(metadata_lines(c, {detail::initial_state_note(c)}), {"lambda", "kappa_t", "f_bar_max"});
    for (std::size_t l = 0; l < c.lambda.size(); ++l)
        for (std::size_t i = 0; i < grid_count; ++i)
            map.add_row({c.lambda[l], times[i], values[l][i]});
    out.files.push_back({"qfi_map.csv", map.text()});

    for (std::size_t s = 0; s < c.qfi_map.slices.size(); ++s) {
        const double kt = c.qfi_map.slices[s];
        CsvTable slice(metadata_lines(c, {detail::initial_state_note(c), "slice at kappa_t=" + format_double(kt)}),
                       {"lambda", "f_bar_max"});
        for (std::size_t l = 0; l < c.lambda.size(); ++l)
            slice.add_row({c.lambda[l], values[l][grid_count + s]});
        out.files.push_back({"qfi_slice_kt_" + value_tag(kt) + ".csv", slice.text()});
    }

    if (c.qfi_map.matrix) {
        std::vector<std::string> header{"lambda"};
        for (std::size_t i = 0; i < grid_count; ++i)
            header.push_back("kt=" + format_double(times[i]));
        CsvTable matrix(metadata_lines(c, {detail::initial_state_note(c), "rows: lambda, columns: kappa_t"}),
                        header);
        for (std::size_t l = 0; l < c.lambda.size(); ++l) {
            std::vector<std::string> row{format_double(c.lambda[l])};
            for (std::size_t i = 0; i < grid_count; ++i)
                row.push_back(format_double(values[l][i]));
            matrix.add_row(row);
        }
        out.files.push_back({"qfi_map_matrix.csv", matrix.text()});
    }
    out.notes.push_back("lambda grid bounds and time resolution are a resolution choice");
    return out;
}

/**
 * Grid runner over one scalar metric. lambda_c depends only on the initial
 * angles; the quantum metrics run over (lambda, theta, phi, kappa_t) in
 * lexicographic index order.
 */
inline RunOutput run_sweep(const ExperimentConfig& c)
{
    c.validate();
    const auto& sw = c.sweep;
    RunOutput out;

    if (sw.metric == SweepMetric::LambdaC) {
        CsvTable table(metadata_lines(c, {"metric: lambda_c (indeterminate where the criterion is 0/0)"}),
                       {"theta0", "phi0", "lambda_c"});
        for (double theta : sw.theta)
            for (double phi : sw.phi) {
                const auto lc = classical::self_trapping_critical_omega(theta, phi);
                table.add_row({format_double(theta), format_double(phi),
                               lc ? format_double(*lc) : std::string("indeterminate")});
            }
        out.files.push_back({"sweep.csv", table.text()});
        return out;
    }

    const auto spin = SpinQuantumNumber::from_particles(c.n_particles);
    const AngularMomentumSet ops = build_operators(spin);
    const auto times = c.time.values();
    const std::size_t angles = sw.theta.size() * sw.phi.size();

    std::vector<std::vector<double>> values(c.lambda.size());
    parallel_for(c.lambda.size(), c.workers, [&](std::size_t l) {
        const Propagator propagator(ModelParams{c.n_particles, c.lambda[l]});
        auto& row = values[l];
        row.reserve(angles * times.size());
        for (double theta : sw.theta)
            for (double phi : sw.phi) {
                const StateVector psi0 = spin_coherent_state(spin, theta, phi);
                const ComplexVector coefficients = propagator.to_eigenbasis(psi0);
                for (double t : times) {
                    const StateVector psi(spin, propagator.from_eigenbasis(coefficients, t));
                    switch (sw.metric) {
                    case SweepMetric::FBarMax: row.push_back(observables::f_bar_max(ops, psi)); break;
                    case SweepMetric::Fidelity: row.push_back(fidelity(psi0, psi)); break;
                    case SweepMetric::Jz: row.push_back(observables::jz(psi)); break;
                    case SweepMetric::LambdaC: break;
                    }
                }
            }
    });

    CsvTable table(metadata_lines(c, {"metric: " + std::string(to_string(sw.metric)) + ", N="
                                      + std::to_string(c.n_particles)}),
                   {"lambda", "theta0", "phi0", "kappa_t", std::string(to_string(sw.metric))});
    for (std::size_t l = 0; l < c.lambda.size(); ++l) {
        std::size_t k = 0;
        for (double theta : sw.theta)
            for (double phi : sw.phi)
                for (double t : times)
                    table.add_row({c.lambda[l], theta, phi, t, values[l][k++]});
    }
    out.files.push_back({"sweep.csv", table.text()});
    return out;
}

inline RunOutput run_tables(const ExperimentConfig& c)
{
    switch (c.experiment) {
    case ExperimentKind::PhasePortrait: return run_phase_portrait(c);
    case ExperimentKind::Fidelity: return run_fidelity(c);
    case ExperimentKind::QfiMap: return run_qfi_map(c);
    case ExperimentKind::JzSeries: return run_jz_series(c);
    case ExperimentKind::Sweep: return run_sweep(c);
    }
    throw std::logic_error("unhandled experiment kind");
}

struct RunSummary {
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0.0;
};

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Runs the experiment, writes every table and then manifest.json.
inline RunSummary run_experiment(const ExperimentConfig& c)
{
    const auto start = std::chrono::steady_clock::now();
    RunOutput output = run_tables(c);

    std::filesystem::create_directories(c.output);
    RunSummary summary;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : output.files) {
        const auto path = c.output / f.name;
        write_text_file(path, f.text);
        summary.files.push_back(path);
        files.push_back({{"name", f.name}, {"sha256", sha256_hex(f.text)}, {"bytes", f.text.size()}});
    }
    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::istringstream canonical(canonical_text(c));
    for (std::string line; std::getline(canonical, line);) {
        const auto eq = line.find(" = ");
        config[line.substr(0, eq)] = line.substr(eq + 3);
    }
    config["output"] = c.output.string();
    config["workers"] = c.workers;

    nlohmann::ordered_json manifest{
        {"software", software_name},
        {"version", software_version},
        {"experiment", to_string(c.experiment)},
        {"timestamp", utc_timestamp()},
        {"wall_time_seconds", summary.wall_seconds},
        {"config_hash", "sha256:" + sha256_hex(canonical_text(c))},
        {"config", config},
        {"files", files},
        {"notes", output.notes},
    };
    summary.manifest = c.output / "manifest.json";
    write_text_file(summary.manifest, manifest.dump(2) + "\n");
    return summary;
}

} // namespace dwqfi::experiments
