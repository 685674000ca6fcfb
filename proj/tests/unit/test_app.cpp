#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "app/cli.hpp"

using namespace ckepler;
using namespace ckepler::app;

namespace {

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ckepler");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(CKEPLER_CONFIG_DIR) + "/" + name; }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

}  // namespace

TEST(Config, RequiresSchemaOne) {
    EXPECT_THROW(settings_from_json(nlohmann::json{{"kappa", 1.0}}), ConfigError);
    EXPECT_THROW(settings_from_json(nlohmann::json{{"schema", 2}}), ConfigError);
    EXPECT_THROW(settings_from_json(nlohmann::json{{"schema", 1}, {"kappa", "one"}}), ConfigError);
    const Settings s = settings_from_json(nlohmann::json::parse(R"({"schema": 1, "kappa": -1,
        "initial": {"energy": -0.5, "j": 0.5}, "seed": 7})"));
    EXPECT_EQ(*s.kappa, -1.0);
    EXPECT_EQ(*s.energy, -0.5);
    EXPECT_EQ(*s.seed, 7u);
    EXPECT_FALSE(s.r);
}

TEST(Config, FlagsOverrideFileAndReplaceTheOtherForm) {
    const Settings file = load_config_file(config("sphere_orbit.json"));
    Settings flags;
    flags.kappa = 0.5;
    flags.t_end = 3.0;
    const Settings merged = merge(file, flags);
    EXPECT_EQ(*merged.kappa, 0.5);
    EXPECT_EQ(*merged.t_end, 3.0);
    EXPECT_EQ(*merged.energy, 0.2);
    EXPECT_EQ(*merged.tol, 1e-11);

    Settings state;
    state.r = 0.5;
    state.v_r = 0.0;
    state.v_phi = 2.0;
    const RunConfig rc = run_config(merge(file, state));
    ASSERT_TRUE(rc.state);
    EXPECT_FALSE(rc.orbit);
    EXPECT_EQ(rc.state->r, 0.5);
    EXPECT_EQ(rc.chart, Chart::ambient);
    EXPECT_EQ(rc.seed, 42u);
}

TEST(Config, Validation) {
    Settings s;
    s.kappa = 1.0;
    EXPECT_THROW(run_config(s), ConfigError);
    s.energy = 0.1;
    s.j = 1.0;
    EXPECT_NO_THROW(run_config(s));
    s.r = 1.0;
    EXPECT_THROW(run_config(s), ConfigError);
    s.r.reset();
    s.tol = 1e-3;
    EXPECT_THROW(run_config(s), ConfigError);
    s.tol = 1e-10;
    s.chart = "poincare_disk";
    EXPECT_THROW(run_config(s), ConfigError);
    s.chart = "mercator";
    EXPECT_THROW(run_config(s), ConfigError);
    EXPECT_THROW(load_config_file(config("missing.json")), ConfigError);
}

TEST(Csv, SeventeenDigitsReadBackBitIdentical) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 10000; ++i) {
        const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
        const std::string s = fmt17(x);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
    }
}

TEST(Simulate, CsvRowsReparseExactly) {
    Settings s = load_config_file(config("flat_circle.json"));
    s.samples = 50;
    const RunConfig rc = run_config(s);
    const SimulationResult res = simulate(rc);
    std::ostringstream os;
    write_simulation(os, res, OutputFormat::csv);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    const auto header = split(line, ',');
    ASSERT_EQ(header.size(), res.columns.size() + 1);
    EXPECT_EQ(header.front(), "t");
    EXPECT_EQ(header.back(), "event");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const auto cells = split(line, ',');
        ASSERT_EQ(cells.size(), header.size());
        for (std::size_t c = 0; c + 1 < cells.size(); ++c)
            EXPECT_EQ(std::strtod(cells[c].c_str(), nullptr), res.rows[row][c]);
        EXPECT_EQ(cells.back(), "none");
        EXPECT_NEAR(res.rows[row][1], 1.0, 1e-9);
        ++row;
    }
    EXPECT_EQ(row, 50u);
    EXPECT_LT(res.drift.e, 1e-9);
}

TEST(Simulate, SphereRunStaysConserved) {
    const RunConfig rc = run_config(load_config_file(config("sphere_orbit.json")));
    const SimulationResult res = simulate(rc);
    EXPECT_EQ(res.event, TrajectoryEvent::none);
    EXPECT_LT(res.drift.e, 1e-9);
    EXPECT_LT(res.drift.j, 1e-9);
    EXPECT_LT(res.drift.i3, 1e-9);
    EXPECT_LT(res.drift.i4, 1e-9);
    for (const auto& row : res.rows) {
        const double x = row[9], y = row[10], z = row[11];
        EXPECT_NEAR(x * x + y * y + z * z, 1.0, 1e-12);
    }
}

TEST(Simulate, RadialRunEndsWithCollisionRow) {
    const auto r = run_cli({"simulate", "--kappa", "0", "--r", "1", "--v-r", "0", "--v-phi", "0", "--t-end", "5"});
    EXPECT_EQ(r.code, exit_numerical);
    std::istringstream in(r.out);
    std::string line, last;
    while (std::getline(in, line)) last = line;
    EXPECT_EQ(split(last, ',').back(), "collision");
    EXPECT_NE(r.err.find("collision"), std::string::npos);
}

TEST(Simulate, JsonOutputAndReportFile) {
    const auto r = run_cli({"simulate", "--config", config("hyperbolic_ellipse.json"), "--format", "json",
                            "--samples", "20"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("rows").size(), 20u);
    EXPECT_EQ(j.at("event"), "none");
    const auto cols = j.at("columns").get<std::vector<std::string>>();
    EXPECT_EQ(cols.back(), "disk_y");
    for (const auto& row : j.at("rows")) {
        const double x = row.at(cols.size() - 2).get<double>(), y = row.back().get<double>();
        EXPECT_LT(x * x + y * y, 1.0);
    }
    const auto rep = nlohmann::json::parse(r.err);
    EXPECT_LT(rep.at("max_relative_drift").at("E").get<double>(), 1e-8);
}

TEST(Classify, ReferenceRecords) {
    const ClassifyRecord circle = classify(-1.0, 1.0, 0.5, -2.125);
    EXPECT_EQ(circle.orbit_class, "hyp_circle");
    EXPECT_TRUE(circle.bounded);
    EXPECT_EQ(*circle.conic_type, "circle");

    const ClassifyRecord open = classify(-1.0, 4.0, 1.0, 0.0);
    EXPECT_EQ(open.orbit_class, "hyp_open");
    EXPECT_EQ(*open.conic_type, "parabola");
    EXPECT_NEAR(open.eccentricity, std::sqrt(17.0) / 4.0, 1e-15);
    EXPECT_DOUBLE_EQ(*open.e_infinity, -4.0);

    const ClassifyRecord flat = classify(0.0, 1.0, 1.0, -0.5);
    EXPECT_EQ(flat.orbit_class, "circle");
    EXPECT_FALSE(flat.e_infinity);

    const ClassifyRecord radial = classify(1.0, 1.0, 0.0, 0.3);
    EXPECT_EQ(radial.orbit_class, "radial_collision");
    EXPECT_FALSE(radial.conic_family);
}

TEST(Classify, JsonRoundTrip) {
    for (auto [kv, k, j, e] : std::vector<std::tuple<double, double, double, double>>{
             {-1.0, 1.0, 0.5, -2.125}, {-1.0, 4.0, 1.0, 0.0}, {0.0, 1.0, 1.0, -0.5}, {1.0, 1.0, 1.0, 0.7},
             {-0.3, 1.7, 0.123456789, -0.1}, {1.0, 1.0, 0.0, 0.3}}) {
        const ClassifyRecord rec = classify(kv, k, j, e);
        const ClassifyRecord back = classify_record_from_json(nlohmann::json::parse(dump_json(to_json(rec))));
        EXPECT_EQ(back, rec) << kv << " " << j << " " << e;
    }
}

TEST(Classify, ExitCodes) {
    const auto ok = run_cli({"classify", "--kappa", "-1", "--k", "1", "--j", "0.5", "--energy", "-2.125"});
    EXPECT_EQ(ok.code, exit_ok);
    EXPECT_EQ(nlohmann::json::parse(ok.out).at("orbit_class"), "hyp_circle");
    EXPECT_EQ(run_cli({"classify", "--kappa", "-1", "--j", "0.5", "--energy", "-3"}).code, exit_infeasible);
    EXPECT_EQ(run_cli({"classify", "--kappa", "-1", "--j", "0.5"}).code, exit_config);
    EXPECT_EQ(run_cli({"classify", "--kappa", "x"}).code, exit_config);
    EXPECT_EQ(run_cli({"classify", "--kappa", "1", "--k", "-1", "--j", "1", "--energy", "0"}).code, exit_config);
    EXPECT_EQ(run_cli({"--help"}).code, exit_ok);
    EXPECT_EQ(run_cli({}).code, exit_config);
}

TEST(PotentialScan, DeterministicAcrossThreadCounts) {
    const ScanResult one = potential_scan(-1.0, 4.0, 1.0, 0.05, 5.0, 1001, 1);
    for (unsigned t : {2u, 3u, 8u}) {
        const ScanResult many = potential_scan(-1.0, 4.0, 1.0, 0.05, 5.0, 1001, t);
        EXPECT_EQ(many.r, one.r);
        EXPECT_EQ(many.w, one.w);
    }
    std::ostringstream a, b;
    write_scan(a, one);
    write_scan(b, potential_scan(-1.0, 4.0, 1.0, 0.05, 5.0, 1001, 5));
    EXPECT_EQ(a.str(), b.str());
}

TEST(PotentialScan, FigureParameterSets) {
    const ScanResult sphere = potential_scan(1.0, 1.0, 1.0, 0.05, 3.0, 500, 2);
    ASSERT_TRUE(sphere.profile.critical_radius);
    EXPECT_NEAR(*sphere.profile.critical_radius, std::numbers::pi / 4, 1e-15);
    EXPECT_NEAR(*sphere.profile.critical_value, 0.0, 1e-15);

    const ScanResult barrier = potential_scan(-1.0, 1.0, 2.0, 0.05, 5.0, 500, 2);
    EXPECT_FALSE(barrier.profile.critical_radius);
    for (std::size_t i = 1; i < barrier.w.size(); ++i) EXPECT_LT(barrier.w[i], barrier.w[i - 1]);

    const ScanResult well = potential_scan(-1.0, 4.0, 1.0, 0.05, 5.0, 500, 2);
    ASSERT_TRUE(well.profile.critical_radius);
    EXPECT_NEAR(*well.profile.critical_radius, std::atanh(0.25), 1e-15);

    EXPECT_THROW(potential_scan(1.0, 1.0, 1.0, 0.1, 4.0, 10, 1), ConfigError);
    EXPECT_THROW(potential_scan(1.0, 1.0, 1.0, 0.1, 1.0, 1, 1), ConfigError);
}

TEST(Conic, PeriastronFamilyOutput) {
    const ConicOutput h = periastron_conics(-1.0, std::atanh(0.2), 64);
    ASSERT_TRUE(h.landmarks);
    std::vector<std::string> types;
    for (const auto& c : h.conics) types.push_back(to_string(c.type));
    EXPECT_EQ(types, (std::vector<std::string>{"circle", "ellipse", "horoellipse", "parabola", "horohyperbola",
                                                "hyperbola", "hyperbola"}));
    const ConicOutput flat = periastron_conics(0.0, 1.0, 64);
    types.clear();
    for (const auto& c : flat.conics) types.push_back(to_string(c.type));
    EXPECT_EQ(types, (std::vector<std::string>{"circle", "ellipse", "parabola", "hyperbola", "hyperbola"}));
    for (const auto& c : flat.conics)
        for (const auto& p : c.points) EXPECT_NEAR(*acot_k(Curvature(0.0), (1 + c.spec.ecc * std::cos(p.phi)) / c.spec.d()), p.r, 1e-12);
}

TEST(Conic, CliModes) {
    const auto fam = run_cli({"conic", "--kappa", "-1", "--periastron", "0.5", "--phi-steps", "16"});
    ASSERT_EQ(fam.code, exit_ok) << fam.err;
    EXPECT_NE(fam.out.find("# tan_p_horoellipse="), std::string::npos);
    EXPECT_NE(fam.out.find("conic_id,ecc,d,phi,r,"), std::string::npos);
    EXPECT_NE(fam.out.find(",family,type\n"), std::string::npos);

    const auto disk = run_cli({"conic", "--kappa", "-1", "--d", "0.5", "--ecc", "0.3", "--chart", "poincare_disk",
                               "--phi-steps", "16"});
    ASSERT_EQ(disk.code, exit_ok) << disk.err;
    EXPECT_NE(disk.out.find("disk_x,disk_y"), std::string::npos);

    EXPECT_EQ(run_cli({"conic", "--kappa", "-1", "--d", "3", "--ecc", "0.5"}).code, exit_infeasible);
    EXPECT_EQ(run_cli({"conic", "--kappa", "1", "--d", "1"}).code, exit_config);
    EXPECT_EQ(run_cli({"conic", "--kappa", "1", "--family", "colatus", "--p", "1", "--ecc", "1"}).code, exit_config);
    EXPECT_EQ(run_cli({"conic", "--kappa", "0", "--d", "1", "--ecc", "1", "--chart", "poincare_disk"}).code,
              exit_config);
}

TEST(TrigCheck, SeededAndPassing) {
    const TrigCheck a = trig_check(5000, 42), b = trig_check(5000, 42), c = trig_check(5000, 7);
    EXPECT_TRUE(a.pass());
    EXPECT_EQ(a.pythagorean, b.pythagorean);
    EXPECT_EQ(a.double_angle_sin, b.double_angle_sin);
    EXPECT_TRUE(c.pass());
    const auto r = run_cli({"trig-check", "--samples", "1000", "--seed", "9"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(nlohmann::json::parse(r.out).at("seed"), 9u);
    EXPECT_EQ(nlohmann::json::parse(run_cli({"trig-check", "--samples", "10"}).out).at("seed"), 42u);
}

TEST(Cli, BadConfigFileIsAConfigError) {
    EXPECT_EQ(run_cli({"simulate", "--config", config("../tests/data/bad_schema.json")}).code, exit_config);
}
