// Command-line front end: argument parsing, config merging, dispatch and exit codes.
#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

namespace ckepler::app {

namespace detail {

// Writes to a file when a path is given, to the fallback stream otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
        stream_ = file_.get();
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

}  // namespace detail

/// Parse argv, run one subcommand and return its exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kepler problem on the sphere, the plane and the hyperbolic plane", "ckepler"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ckepler 0.1.0");

    std::string config_path, output_path, report_path;
    Settings flags;

    auto add_physics = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file (\"schema\": 1)")->check(CLI::ExistingFile);
        sub->add_option("--kappa", flags.kappa, "Gaussian curvature");
        sub->add_option("--k", flags.k, "coupling constant, > 0 (default 1)");
        sub->add_option("-o,--output", output_path, "write results to this file instead of stdout");
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate a trajectory and report conserved-quantity drift");
    add_physics(sim);
    sim->add_option("--r", flags.r, "initial radius");
    sim->add_option("--phi", flags.phi, "initial angle");
    sim->add_option("--v-r", flags.v_r, "initial radial velocity");
    sim->add_option("--v-phi", flags.v_phi, "initial angular velocity");
    sim->add_option("--energy", flags.energy, "energy (start at the periastron)");
    sim->add_option("--j", flags.j, "angular momentum (start at the periastron)");
    sim->add_option("--phi0", flags.phi0, "periastron angle");
    sim->add_option("--t-end", flags.t_end, "integration time (default 10)");
    sim->add_option("--tol", flags.tol, "tolerance in [1e-13, 1e-6] (default 1e-10)");
    sim->add_option("--format", flags.format, "csv or json (default csv)");
    sim->add_option("--chart", flags.chart, "polar, ambient or poincare_disk (default polar)");
    sim->add_option("--samples", flags.samples, "rows on a uniform time grid (default: one per step)");
    sim->add_option("--report", report_path, "write the drift report here instead of stderr");
    sim->add_option("--seed", flags.seed, "random seed (default 42)");

    CLI::App* cls = app.add_subcommand("classify", "classify the orbit with energy E and angular momentum J");
    add_physics(cls);
    cls->add_option("--j", flags.j, "angular momentum");
    cls->add_option("--energy", flags.energy, "energy");

    double r_min = 0.0, r_max = 0.0;
    int scan_samples = 400;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    CLI::App* scan = app.add_subcommand("potential-scan", "sample the effective potential W(r)");
    add_physics(scan);
    scan->add_option("--j", flags.j, "angular momentum");
    scan->add_option("--r-min", r_min, "smallest radius (default 1e-2)");
    scan->add_option("--r-max", r_max, "largest radius (default 10, or 0.999 pi/sqrt(kappa))");
    scan->add_option("--samples", scan_samples, "number of radii")->capture_default_str();
    scan->add_option("--threads", threads, "worker threads");

    std::optional<double> d, ecc, p, periastron;
    std::string family = "latus";
    int phi_steps = 360;
    CLI::App* conic = app.add_subcommand("conic", "sample a conic, or the family of conics with a given periastron");
    add_physics(conic);
    conic->add_option("--d", d, "focal parameter D of Tan(r) = D/(1 + e cos phi)");
    conic->add_option("--ecc", ecc, "eccentricity");
    conic->add_option("--family", family, "latus, colatus or separatrix (with --p)")->capture_default_str();
    conic->add_option("--p", p, "semilatus rectum p (latus) or p~ (colatus)");
    conic->add_option("--periastron", periastron, "emit the landmark family for this periastron distance");
    conic->add_option("--phi-steps", phi_steps, "angular samples per conic")->capture_default_str();
    conic->add_option("--chart", flags.chart, "polar, ambient or poincare_disk (default polar)");

    int trig_samples = 100000;
    CLI::App* trig = app.add_subcommand("trig-check", "check the curvature-trigonometry identities on random inputs");
    trig->add_option("--samples", trig_samples, "number of random (kappa, x) pairs")->capture_default_str();
    trig->add_option("--seed", flags.seed, "random seed (default 42)");
    trig->add_option("-o,--output", output_path, "write results to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        Settings s = flags;
        if (!config_path.empty()) s = merge(load_config_file(config_path), flags);

        if (sim->parsed()) {
            const RunConfig rc = run_config(s);
            const SimulationResult res = simulate(rc);
            detail::Sink sink(output_path, out);
            write_simulation(sink.get(), res, rc.format);
            detail::Sink rep(report_path, err);
            rep.get() << drift_json(res).dump(2) << '\n';
            if (res.event != TrajectoryEvent::none)
                err << "simulation ended early: " << to_string(res.event) << '\n';
            return exit_code_for(res.event);
        }
        if (cls->parsed()) {
            const ClassifyRecord rec =
                classify(require(s.kappa, "kappa"), s.k.value_or(1.0), require(s.j, "j"), require(s.energy, "energy"));
            detail::Sink sink(output_path, out);
            sink.get() << dump_json(to_json(rec)) << '\n';
            return exit_ok;
        }
        if (scan->parsed()) {
            const Curvature kappa(require(s.kappa, "kappa"));
            const double lo = r_min > 0 ? r_min : 1e-2;
            const double hi = r_max > 0 ? r_max : (kappa.value() > 0 ? 0.999 * kappa.radial_limit() : 10.0);
            const ScanResult res =
                potential_scan(kappa.value(), s.k.value_or(1.0), require(s.j, "j"), lo, hi, scan_samples, threads);
            detail::Sink sink(output_path, out);
            write_scan(sink.get(), res);
            return exit_ok;
        }
        if (conic->parsed()) {
            const Curvature kappa(require(s.kappa, "kappa"));
            const Chart chart = s.chart ? chart_from_string(*s.chart) : Chart::polar;
            if (chart == Chart::poincare_disk && kappa.value() >= 0)
                throw ConfigError("the poincare_disk chart needs kappa < 0");
            ConicOutput res;
            if (periastron) {
                if (d || ecc || p) throw ConfigError("--periastron excludes --d, --ecc and --p");
                res = periastron_conics(kappa.value(), *periastron, phi_steps);
            } else {
                if (!ecc) throw ConfigError("missing --ecc");
                if (d && p) throw ConfigError("give either --d or --family/--p, not both");
                ConicSpec spec;
                if (d) {
                    spec = conic_from_dynamics(kappa, *d, *ecc);
                } else {
                    spec.kappa = kappa;
                    spec.ecc = *ecc;
                    if (family == "latus") spec.family = ConicFamily::latus;
                    else if (family == "colatus") spec.family = ConicFamily::colatus;
                    else if (family == "separatrix") spec.family = ConicFamily::separatrix;
                    else throw ConfigError("unknown conic family '" + family + "'");
                    if (spec.family != ConicFamily::latus && kappa.value() >= 0)
                        throw ConfigError("colatus and separatrix families need kappa < 0");
                    if (spec.family != ConicFamily::separatrix) spec.parameter = require(p, "p");
                    if (spec.family == ConicFamily::latus && kappa.value() < 0 && spec.d() * kappa.root() >= 1.0)
                        throw InfeasibleError("latus family needs Tan_k(p) < 1/sqrt(-kappa)");
                    if (!(spec.ecc >= 0)) throw ConfigError("eccentricity must be >= 0");
                }
                res = single_conic(spec, phi_steps);
            }
            detail::Sink sink(output_path, out);
            write_conics(sink.get(), res, chart);
            return exit_ok;
        }
        if (trig->parsed()) {
            const TrigCheck tc = trig_check(trig_samples, s.seed.value_or(42));
            detail::Sink sink(output_path, out);
            sink.get() << to_json(tc).dump(2) << '\n';
            return tc.pass() ? exit_ok : exit_numerical;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_config;
}

}  // namespace ckepler::app
