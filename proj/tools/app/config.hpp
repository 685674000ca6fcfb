// Run configuration: JSON file (schema 1) merged with command-line overrides.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ckepler::app {

inline constexpr int config_schema = 1;

/// Invalid or inconsistent configuration; mapped to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };
enum class Chart { polar, ambient, poincare_disk };

inline const char* to_string(Chart c) {
    switch (c) {
        case Chart::polar: return "polar";
        case Chart::ambient: return "ambient";
        case Chart::poincare_disk: return "poincare_disk";
    }
    return "?";
}

inline Chart chart_from_string(const std::string& s) {
    if (s == "polar") return Chart::polar;
    if (s == "ambient") return Chart::ambient;
    if (s == "poincare_disk") return Chart::poincare_disk;
    throw ConfigError("unknown chart '" + s + "' (expected polar, ambient or poincare_disk)");
}

inline OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("unknown output format '" + s + "' (expected csv or json)");
}

/// Every setting a command may read. Unset optionals fall back to per-command defaults.
struct Settings {
    std::optional<double> kappa, k;
    // Initial condition as a phase-space state...
    std::optional<double> r, phi, v_r, v_phi;
    // ...or as (E, J, phi0), started at the periastron.
    std::optional<double> energy, j, phi0;
    std::optional<double> t_end, tol;
    std::optional<std::string> format, chart;
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
};

namespace detail {

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("config key '") + key + "': " + ex.what());
    }
}

template <class T>
void overlay(std::optional<T>& base, const std::optional<T>& top) {
    if (top) base = top;
}

}  // namespace detail

inline Settings settings_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schema")) throw ConfigError("config is missing \"schema\"");
    if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != config_schema)
        throw ConfigError("unsupported config schema (expected \"schema\": 1)");
    Settings s;
    using detail::read_optional;
    read_optional(j, "kappa", s.kappa);
    read_optional(j, "k", s.k);
    read_optional(j, "t_end", s.t_end);
    read_optional(j, "tol", s.tol);
    read_optional(j, "output", s.format);
    read_optional(j, "chart", s.chart);
    read_optional(j, "seed", s.seed);
    read_optional(j, "samples", s.samples);
    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        if (!init.is_object()) throw ConfigError("\"initial\" must be an object");
        read_optional(init, "r", s.r);
        read_optional(init, "phi", s.phi);
        read_optional(init, "v_r", s.v_r);
        read_optional(init, "v_phi", s.v_phi);
        read_optional(init, "energy", s.energy);
        read_optional(init, "j", s.j);
        read_optional(init, "phi0", s.phi0);
    }
    return s;
}

inline Settings load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& ex) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + ex.what());
    }
    return settings_from_json(j);
}

inline bool has_state_form(const Settings& s) { return s.r || s.phi || s.v_r || s.v_phi; }
inline bool has_orbit_form(const Settings& s) { return s.energy || s.j || s.phi0; }

/// Flags win over the file. A flag set that names one initial-condition form
/// replaces the other form from the file entirely.
inline Settings merge(Settings file, const Settings& flags) {
    if (has_state_form(flags) && !has_orbit_form(flags)) file.energy = file.j = file.phi0 = std::nullopt;
    if (has_orbit_form(flags) && !has_state_form(flags)) file.r = file.phi = file.v_r = file.v_phi = std::nullopt;
    using detail::overlay;
    overlay(file.kappa, flags.kappa);
    overlay(file.k, flags.k);
    overlay(file.r, flags.r);
    overlay(file.phi, flags.phi);
    overlay(file.v_r, flags.v_r);
    overlay(file.v_phi, flags.v_phi);
    overlay(file.energy, flags.energy);
    overlay(file.j, flags.j);
    overlay(file.phi0, flags.phi0);
    overlay(file.t_end, flags.t_end);
    overlay(file.tol, flags.tol);
    overlay(file.format, flags.format);
    overlay(file.chart, flags.chart);
    overlay(file.seed, flags.seed);
    overlay(file.samples, flags.samples);
    return file;
}

template <class T>
T require(const std::optional<T>& v, const char* name) {
    if (!v) throw ConfigError(std::string("missing required setting '") + name + "'");
    return *v;
}

/// Validated settings of a simulation run.
struct RunConfig {
    double kappa = 0.0;
    double k = 1.0;
    struct State {
        double r, phi, v_r, v_phi;
    };
    struct Orbit {
        double energy, j, phi0;
    };
    std::optional<State> state;
    std::optional<Orbit> orbit;
    double t_end = 10.0;
    double tol = 1e-10;
    OutputFormat format = OutputFormat::csv;
    Chart chart = Chart::polar;
    std::uint64_t seed = 42;
    int samples = 0;  ///< 0: one row per accepted step
};

inline RunConfig run_config(const Settings& s) {
    RunConfig c;
    c.kappa = require(s.kappa, "kappa");
    c.k = s.k.value_or(1.0);
    const bool state_form = has_state_form(s), orbit_form = has_orbit_form(s);
    if (state_form == orbit_form)
        throw ConfigError("give exactly one initial condition: a state (r, phi, v_r, v_phi) or (energy, j, phi0)");
    if (state_form)
        c.state = RunConfig::State{require(s.r, "r"), s.phi.value_or(0.0), require(s.v_r, "v_r"),
                                   require(s.v_phi, "v_phi")};
    else
        c.orbit = RunConfig::Orbit{require(s.energy, "energy"), require(s.j, "j"), s.phi0.value_or(0.0)};
    c.t_end = s.t_end.value_or(c.t_end);
    c.tol = s.tol.value_or(c.tol);
    if (!(c.tol >= 1e-13 && c.tol <= 1e-6)) throw ConfigError("tol must lie in [1e-13, 1e-6]");
    if (!(c.t_end > 0)) throw ConfigError("t_end must be positive");
    if (!(c.k > 0)) throw ConfigError("k must be positive");
    if (s.format) c.format = format_from_string(*s.format);
    if (s.chart) c.chart = chart_from_string(*s.chart);
    if (c.chart == Chart::poincare_disk && !(c.kappa < 0))
        throw ConfigError("the poincare_disk chart needs kappa < 0");
    c.seed = s.seed.value_or(c.seed);
    c.samples = s.samples.value_or(0);
    if (c.samples < 0 || c.samples == 1) throw ConfigError("samples must be 0 or at least 2");
    return c;
}

}  // namespace ckepler::app
