/**
 * @brief Experiment configuration: INI-style key/value files, command-line
 * overrides, and a canonical text form used for hashing.
 *
 * Example:
 *
 *     experiment = qfi-map
 *     n_particles = 500
 *     lambda = grid(0.2, 4, 60)
 *
 *     [time]
 *     max = 30
 *     samples = 240
 *
 *     [initial_state]
 *     theta = pi/2
 *     phi = 0
 *
 * Scalars accept plain numbers, fractions and multiples of pi
 * ("2/3", "pi/6", "3*pi/2"). Lists are comma separated; grid(min, max, count)
 * expands to count evenly spaced values including both ends.
 */
#pragma once

#include "dwqfi/experiments/format.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dwqfi::experiments {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { PhasePortrait, Fidelity, QfiMap, JzSeries, Sweep };

inline std::string_view to_string(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::PhasePortrait: return "phase-portrait";
    case ExperimentKind::Fidelity: return "fidelity";
    case ExperimentKind::QfiMap: return "qfi-map";
    case ExperimentKind::JzSeries: return "jz-series";
    case ExperimentKind::Sweep: return "sweep";
    }
    return "?";
}

inline ExperimentKind parse_experiment(std::string_view name)
{
    for (auto kind : {ExperimentKind::PhasePortrait, ExperimentKind::Fidelity, ExperimentKind::QfiMap,
                      ExperimentKind::JzSeries, ExperimentKind::Sweep})
        if (name == to_string(kind))
            return kind;
    throw ConfigError("unknown experiment '" + std::string(name)
                      + "' (expected phase-portrait, fidelity, qfi-map, jz-series or sweep)");
}

enum class SweepMetric { LambdaC, FBarMax, Fidelity, Jz };

inline std::string_view to_string(SweepMetric metric)
{
    switch (metric) {
    case SweepMetric::LambdaC: return "lambda_c";
    case SweepMetric::FBarMax: return "f_bar_max";
    case SweepMetric::Fidelity: return "fidelity";
    case SweepMetric::Jz: return "jz";
    }
    return "?";
}

inline SweepMetric parse_metric(std::string_view name)
{
    for (auto metric : {SweepMetric::LambdaC, SweepMetric::FBarMax, SweepMetric::Fidelity, SweepMetric::Jz})
        if (name == to_string(metric))
            return metric;
    throw ConfigError("invalid metric name '" + std::string(name)
                      + "' (expected lambda_c, f_bar_max, fidelity or jz)");
}

namespace detail {

inline std::string trim(std::string_view s)
{
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline double parse_factor(const std::string& token)
{
    if (token == "pi")
        return std::numbers::pi;
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty() || !std::isfinite(value))
        throw ConfigError("cannot parse number '" + token + "'");
    return value;
}

} // namespace detail

/// number | pi, combined with '*' and '/', with an optional leading '-'.
inline double parse_scalar(std::string_view text)
{
    std::string s = detail::trim(text);
    if (s.empty())
        throw ConfigError("empty value where a number was expected");
    double sign = 1.0;
    if (s.front() == '-' && s.size() > 1 && (s[1] == 'p' || s.find_first_of("*/") != std::string::npos)) {
        sign = -1.0;
        s.erase(0, 1);
    }
    double value = 0.0;
    char op = '*';
    bool first = true;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find_first_of("*/", pos);
        const std::string token = detail::trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        const double factor = detail::parse_factor(token);
        if (first) {
            value = factor;
            first = false;
        } else if (op == '*') {
            value *= factor;
        } else {
            if (factor == 0.0)
                throw ConfigError("division by zero in '" + std::string(text) + "'");
            value /= factor;
        }
        if (next == std::string::npos)
            break;
        op = s[next];
        pos = next + 1;
    }
    return sign * value;
}

inline std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> items;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            items.push_back(detail::trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    items.push_back(detail::trim(current));
    return items;
}

inline std::vector<double> linspace(double lo, double hi, int count)
{
    if (count < 1)
        throw ConfigError("grid count must be at least 1");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        values[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return values;
}

/// "1", "1, 4", "2/3, 3" or "grid(0.2, 4, 60)".
inline std::vector<double> parse_values(std::string_view text)
{
    const std::string s = detail::trim(text);
    if (s.rfind("grid(", 0) == 0) {
        if (s.back() != ')')
            throw ConfigError("malformed grid '" + s + "'");
        const auto args = split_list(std::string_view(s).substr(5, s.size() - 6));
        if (args.size() != 3)
            throw ConfigError("grid expects (min, max, count), got '" + s + "'");
        const double count = parse_scalar(args[2]);
        if (count != std::floor(count))
            throw ConfigError("grid count must be an integer");
        return linspace(parse_scalar(args[0]), parse_scalar(args[1]), static_cast<int>(count));
    }
    std::vector<double> values;
    for (const auto& item : split_list(s))
        values.push_back(parse_scalar(item));
    return values;
}

inline long long parse_integer(std::string_view text, const std::string& key)
{
    const std::string s = detail::trim(text);
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw ConfigError("key '" + key + "' expects an integer, got '" + s + "'");
    return value;
}

inline bool parse_bool(std::string_view text, const std::string& key)
{
    const std::string s = detail::trim(text);
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + s + "'");
}

struct TimeGrid {
    double max = 30.0;
    int samples = 600;

    std::vector<double> values() const { return linspace(0.0, max, samples); }
};

struct InitialState {
    double theta = std::numbers::pi / 2;
    double phi = 0.0;
};

struct PhasePortraitOptions {
    int p_count = 12;
    int phi_count = 12;
    double p_min = -0.95;
    double p_max = 0.95;
    double dt = 1e-3;
};

struct QfiMapOptions {
    std::vector<double> slices{6.0, 24.0};
    bool matrix = false;
};

struct SweepOptions {
    SweepMetric metric = SweepMetric::LambdaC;
    std::vector<double> theta{0.0, std::numbers::pi / 6};
    std::vector<double> phi{0.0, std::numbers::pi};
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Fidelity;
    int n_particles = 100;
    std::vector<double> lambda{1.0, 4.0};
    TimeGrid time;
    InitialState initial_state;
    std::filesystem::path output = "out";
    std::uint64_t seed = 0;
    int workers = 1;
    PhasePortraitOptions phase_portrait;
    QfiMapOptions qfi_map;
    SweepOptions sweep;

    void validate() const
    {
        if (n_particles < 2)
            throw ConfigError("n_particles must be at least 2");
        if (lambda.empty())
            throw ConfigError("lambda grid must contain at least one value");
        for (double l : lambda)
            if (!(l >= 0.0))
                throw ConfigError("lambda values must be non-negative");
        if (!(time.max > 0.0))
            throw ConfigError("time max must be positive");
        if (time.samples < 1)
            throw ConfigError("time samples must be at least 1");
        if (!(initial_state.theta >= 0.0 && initial_state.theta <= std::numbers::pi))
            throw ConfigError("initial_state theta must lie in [0, pi]");
        if (workers < 1)
            throw ConfigError("workers must be at least 1");
        if (phase_portrait.p_count < 1 || phase_portrait.phi_count < 1)
            throw ConfigError("phase_portrait lattice counts must be at least 1");
        if (!(phase_portrait.dt > 0.0))
            throw ConfigError("phase_portrait dt must be positive");
        if (!(phase_portrait.p_min >= -1.0 && phase_portrait.p_max <= 1.0 && phase_portrait.p_min <= phase_portrait.p_max))
            throw ConfigError("phase_portrait p range must lie within [-1, 1]");
        if (sweep.theta.empty() || sweep.phi.empty())
            throw ConfigError("sweep theta and phi grids must be non-empty");
        for (double t : sweep.theta)
            if (!(t >= 0.0 && t <= std::numbers::pi))
                throw ConfigError("sweep theta values must lie in [0, pi]");
    }
};

/// Per-experiment defaults (N = 100 for fidelity and <J_z>, N = 500 for QFI maps).
inline ExperimentConfig default_config(ExperimentKind kind)
{
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
    case ExperimentKind::PhasePortrait:
        c.lambda = {4.0, 1.0};
        c.time = {20.0, 201};
        c.output = "out/phase-portrait";
        break;
    case ExperimentKind::Fidelity:
        c.n_particles = 100;
        c.lambda = {1.0, 4.0};
        c.time = {30.0, 600};
        c.initial_state = {std::numbers::pi / 2, 0.0};
        c.output = "out/fidelity";
        break;
    case ExperimentKind::QfiMap:
        c.n_particles = 500;
        c.lambda = linspace(0.2, 4.0, 60);
        c.time = {30.0, 240};
        c.initial_state = {std::numbers::pi / 2, 0.0};
        c.output = "out/qfi-map";
        break;
    case ExperimentKind::JzSeries:
        c.n_particles = 100;
        c.lambda = {3.0, 2.0 / 3.0};
        c.time = {2.0, 400};
        c.initial_state = {0.0, 0.0};
        c.output = "out/jz-series";
        break;
    case ExperimentKind::Sweep:
        c.n_particles = 100;
        c.lambda = {1.0};
        c.time = {1.0, 1};
        c.output = "out/sweep";
        break;
    }
    return c;
}

/// Applies one "section.key = value" assignment; unknown keys are errors.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value)
{
    if (key == "experiment") {
        const auto kind = parse_experiment(detail::trim(value));
        if (kind != c.experiment)
            throw ConfigError("config file is for experiment '" + std::string(to_string(kind))
                              + "' but '" + std::string(to_string(c.experiment)) + "' was requested");
    } else if (key == "n_particles") {
        c.n_particles = static_cast<int>(parse_integer(value, key));
    } else if (key == "lambda") {
        c.lambda = parse_values(value);
    } else if (key == "output") {
        c.output = detail::trim(value);
    } else if (key == "seed") {
        const long long seed = parse_integer(value, key);
        if (seed < 0)
            throw ConfigError("seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "workers") {
        c.workers = static_cast<int>(parse_integer(value, key));
    } else if (key == "time.max") {
        c.time.max = parse_scalar(value);
    } else if (key == "time.samples") {
        c.time.samples = static_cast<int>(parse_integer(value, key));
    } else if (key == "initial_state.theta") {
        c.initial_state.theta = parse_scalar(value);
    } else if (key == "initial_state.phi") {
        c.initial_state.phi = parse_scalar(value);
    } else if (key == "phase_portrait.p_count") {
        c.phase_portrait.p_count = static_cast<int>(parse_integer(value, key));
    } else if (key == "phase_portrait.phi_count") {
        c.phase_portrait.phi_count = static_cast<int>(parse_integer(value, key));
    } else if (key == "phase_portrait.p_min") {
        c.phase_portrait.p_min = parse_scalar(value);
    } else if (key == "phase_portrait.p_max") {
        c.phase_portrait.p_max = parse_scalar(value);
    } else if (key == "phase_portrait.dt") {
        c.phase_portrait.dt = parse_scalar(value);
    } else if (key == "qfi_map.slices") {
        c.qfi_map.slices = detail::trim(value).empty() ? std::vector<double>{} : parse_values(value);
    } else if (key == "qfi_map.matrix") {
        c.qfi_map.matrix = parse_bool(value, key);
    } else if (key == "sweep.metric") {
        c.sweep.metric = parse_metric(detail::trim(value));
    } else if (key == "sweep.theta") {
        c.sweep.theta = parse_values(value);
    } else if (key == "sweep.phi") {
        c.sweep.phi = parse_values(value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

/// Reads INI text on top of the defaults for `kind`.
inline ExperimentConfig parse_config(std::istream& in, ExperimentKind kind)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c = default_config(kind);
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            apply_setting(c, name, node.data());
            continue;
        }
        for (const auto& [sub, leaf] : node) {
            if (!leaf.empty())
                throw ConfigError("config: nested sections are not supported ('" + name + "." + sub + "')");
            apply_setting(c, name + "." + sub, leaf.data());
        }
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in, kind);
}

inline std::string join_values(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

/**
 * Canonical key = value text of every setting that affects results. The
 * output directory and worker count are left out so that the hash and the
 * data files do not depend on them.
 */
inline std::string canonical_text(const ExperimentConfig& c)
{
    std::ostringstream out;
    out << "experiment = " << to_string(c.experiment) << '\n'
        << "n_particles = " << c.n_particles << '\n'
        << "lambda = " << join_values(c.lambda) << '\n'
        << "seed = " << c.seed << '\n'
        << "time.max = " << format_double(c.time.max) << '\n'
        << "time.samples = " << c.time.samples << '\n'
        << "initial_state.theta = " << format_double(c.initial_state.theta) << '\n'
        << "initial_state.phi = " << format_double(c.initial_state.phi) << '\n';
    switch (c.experiment) {
    case ExperimentKind::PhasePortrait:
        out << "phase_portrait.p_count = " << c.phase_portrait.p_count << '\n'
            << "phase_portrait.phi_count = " << c.phase_portrait.phi_count << '\n'
            << "phase_portrait.p_min = " << format_double(c.phase_portrait.p_min) << '\n'
            << "phase_portrait.p_max = " << format_double(c.phase_portrait.p_max) << '\n'
            << "phase_portrait.dt = " << format_double(c.phase_portrait.dt) << '\n';
        break;
    case ExperimentKind::QfiMap:
        out << "qfi_map.slices = " << join_values(c.qfi_map.slices) << '\n'
            << "qfi_map.matrix = " << (c.qfi_map.matrix ? "true" : "false") << '\n';
        break;
    case ExperimentKind::Sweep:
        out << "sweep.metric = " << to_string(c.sweep.metric) << '\n'
            << "sweep.theta = " << join_values(c.sweep.theta) << '\n'
            << "sweep.phi = " << join_values(c.sweep.phi) << '\n';
        break;
    default:
        break;
    }
    return out.str();
}

} // namespace dwqfi::experiments
