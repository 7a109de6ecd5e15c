#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sar/cli.hpp"
#include "sar/config.hpp"
#include "sar/errors.hpp"
#include "sar/output.hpp"

using namespace sar;
namespace fs = std::filesystem;

namespace {

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path d = fs::temp_directory_path() /
                       ("sar_test_" + std::to_string(::getpid()) + "_" + tag + "_" +
                        std::to_string(counter++));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// reduced-resolution overrides: keeps CLI runs in the millisecond range
std::vector<std::string> small_run_args() {
    return {
        "--set", "grid.x_min=-2",
        "--set", "grid.x_max=2",
        "--set", "grid.n_points=2048",
        "--set", "propagator.dt=4.3961e-06", // ~t_end/1024
    };
}

int cli(std::vector<std::string> args) { return run_cli(args); }

} // namespace

TEST_CASE("parse_config: empty text reproduces the standard defaults") {
    const RunConfig cfg = parse_config("");
    const UnitSystem& u = cfg.units;
    CHECK(cfg.schedule.kind == BarrierSchedule::Kind::linear_width);
    CHECK(cfg.schedule.v0 == doctest::Approx(1.5 * u.E0).epsilon(1e-14));
    CHECK(cfg.schedule.w_i == doctest::Approx(0.08 * u.sigma1).epsilon(1e-14));
    CHECK(cfg.schedule.w_f == doctest::Approx(0.48 * u.sigma1).epsilon(1e-14));
    CHECK(cfg.schedule.t_p == doctest::Approx(7.14 * u.t0).epsilon(1e-14));
    CHECK(cfg.schedule.epsilon == doctest::Approx(0.27 * u.t0).epsilon(1e-14));
    CHECK(cfg.packet.x0 == doctest::Approx(-6.0 * u.sigma1).epsilon(1e-14));
    CHECK(cfg.packet.p0 == doctest::Approx(u.p0).epsilon(1e-14));
    CHECK(cfg.grid.x_min == doctest::Approx(-500.0 * u.sigma0).epsilon(1e-14));
    CHECK(cfg.grid.x_max == doctest::Approx(500.0 * u.sigma0).epsilon(1e-14));
    CHECK(cfg.grid.n_points == 131072);
    CHECK(cfg.propagation.t_end == doctest::Approx(40.0 * u.t0).epsilon(1e-14));
    CHECK(cfg.propagation.dt == doctest::Approx(40.0 * u.t0 / 8192.0).epsilon(1e-14));
    CHECK(cfg.propagation.store_every == 8);
    CHECK(cfg.analysis.x_d == doctest::Approx(10.0 * u.sigma1).epsilon(1e-14));
    CHECK(cfg.analysis.delta_dev == 1e-3);
}

TEST_CASE("parse_config: validation errors name the violated constraint") {
    CHECK_THROWS_WITH_AS(parse_config("schedule.w_f = 0.001\nschedule.w_i = 0.004\n"),
                         doctest::Contains("w_f"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("schedule.kind = height_ramp\nschedule.a = 0.3\n"
                                      "schedule.b = 0.3\n"),
                         doctest::Contains("a + b"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("no_such.key = 1\n"), doctest::Contains("unknown key"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("grid.n_points = 4\ngrid.n_points = 8\n"),
                         doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("grid.n_points = abc\n"), doctest::Contains("integer"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("units.p0 = -3\n"), doctest::Contains("p0"), ConfigError);
    // line numbers are reported
    CHECK_THROWS_WITH_AS(parse_config("\n# comment\nbogus line\n"), doctest::Contains("line 3"),
                         ConfigError);
}

TEST_CASE("serialize/parse round trip is exact") {
    RunConfig cfg = parse_config("");
    cfg.analysis.trajectory_points = {-0.31, -0.2987654321};
    cfg.analysis.sweep_axis = "epsilon";
    cfg.analysis.sweep_values = {0.27, 0.4, 0.6, 0.8};
    const std::string s1 = serialize_config(cfg);
    const RunConfig cfg2 = parse_config(s1);
    const std::string s2 = serialize_config(cfg2);
    CHECK(s1 == s2);
    CHECK(config_hash(cfg) == config_hash(cfg2));

    // a height-ramp config round-trips its own key set
    const RunConfig hr = parse_config("schedule.kind = height_ramp\nschedule.b = 0.7\n"
                                      "schedule.a = 0.3\n");
    const RunConfig hr2 = parse_config(serialize_config(hr));
    CHECK(serialize_config(hr) == serialize_config(hr2));
    CHECK(config_hash(hr) != config_hash(cfg));
}

TEST_CASE("parse_config: command-line overrides win over file keys") {
    const RunConfig cfg = parse_config("grid.n_points = 4096\n",
                                       {{"grid.n_points", "512"}, {"analysis.delta_dev", "0.01"}});
    CHECK(cfg.grid.n_points == 512);
    CHECK(cfg.analysis.delta_dev == 0.01);
    CHECK_THROWS_AS(parse_config("", {{"bogus.key", "1"}}), ConfigError);
}

TEST_CASE("cli: pair emits the contract files and is byte-deterministic") {
    const fs::path d1 = fresh_dir("pair1");
    const fs::path d2 = fresh_dir("pair2");
    auto args = small_run_args();
    args.insert(args.begin(), "pair");

    auto run_into = [&](const fs::path& d) {
        auto a = args;
        a.push_back("--out");
        a.push_back(d.string());
        a.push_back("--threads");
        a.push_back("2");
        REQUIRE(cli(a) == 0);
    };
    run_into(d1);
    run_into(d2);

    for (const char* name : {"ts_static.csv", "ts_perturbed.csv", "report.json"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(d1 / name));
        CHECK(slurp_file(d1 / name) == slurp_file(d2 / name));
    }
    CHECK(fs::exists(d1 / "manifest.json"));
}

TEST_CASE("cli: analyze reproduces report.json byte for byte") {
    const fs::path d = fresh_dir("analyze");
    auto args = small_run_args();
    args.insert(args.begin(), "pair");
    args.push_back("--out");
    args.push_back(d.string());
    REQUIRE(cli(args) == 0);

    const std::string before = slurp_file(d / "report.json");
    fs::remove(d / "report.json");
    REQUIRE(cli({"analyze", "--dir", d.string()}) == 0);
    CHECK(slurp_file(d / "report.json") == before);
}

TEST_CASE("cli: sweep writes a sorted axis file") {
    const fs::path d = fresh_dir("sweep");
    auto args = small_run_args();
    args.insert(args.begin(), "sweep");
    args.push_back("--axis");
    args.push_back("epsilon");
    args.push_back("--values");
    args.push_back("0.8,0.27");
    args.push_back("--out");
    args.push_back(d.string());
    args.push_back("--threads");
    args.push_back("2");
    REQUIRE(cli(args) == 0);

    const std::string csv = slurp_file(d / "sweep_epsilon.csv");
    const auto p1 = csv.find("\n0.27");
    const auto p2 = csv.find("\n0.8");
    REQUIRE(p1 != std::string::npos);
    REQUIRE(p2 != std::string::npos);
    CHECK(p1 < p2);
}

TEST_CASE("cli: simulate and trajectories emit their outputs") {
    const fs::path d = fresh_dir("sim");
    auto args = small_run_args();
    args.insert(args.begin(), "simulate");
    args.push_back("--out");
    args.push_back(d.string());
    args.push_back("--snapshots");
    args.push_back("--set");
    args.push_back("output.snapshot_stride=64");
    REQUIRE(cli(args) == 0);
    CHECK(fs::exists(d / "ts_perturbed.csv"));
    CHECK(fs::exists(d / "expectations.csv"));
    CHECK(fs::exists(d / "manifest.json"));
    CHECK(fs::exists(d / "snapshots"));

    const fs::path dt = fresh_dir("traj");
    auto targs = small_run_args();
    targs.insert(targs.begin(), "trajectories");
    targs.push_back("--count");
    targs.push_back("8");
    targs.push_back("--out");
    targs.push_back(dt.string());
    REQUIRE(cli(targs) == 0);
    CHECK(fs::exists(dt / "trajectories.csv"));
    // bundle rows: id, t/t0, x/sigma1, classification
    const std::string csv = slurp_file(dt / "trajectories.csv");
    CHECK(csv.find("transmitted") != std::string::npos);
}

TEST_CASE("cli: exit codes for bad input") {
    CHECK(cli({"pair", "--config", "/nonexistent/file.conf"}) == 3);
    CHECK(cli({"analyze", "--dir", "/nonexistent/dir"}) == 3);
    const fs::path d = fresh_dir("badcfg");
    {
        std::ofstream out(d / "bad.conf");
        out << "schedule.w_f = 0.0001\n";
    }
    CHECK(cli({"pair", "--config", (d / "bad.conf").string(), "--out", d.string()}) == 1);
    CHECK(cli({"sweep", "--axis", "bogus", "--out", d.string()}) == 1);
}

TEST_CASE("read_series_csv round-trips the written series") {
    const fs::path d = fresh_dir("csv");
    ReducedSeries s;
    s.label = "perturbed";
    s.x_d_over_sigma1 = 10.0;
    s.t_p_over_t0 = 7.14;
    s.epsilon_over_t0 = 0.27;
    s.delta_dev = 1e-3;
    for (int i = 0; i <= 100; ++i) {
        s.t_over_t0.push_back(0.4 * i);
        s.values.push_back(std::tanh(0.07 * i) * 0.816234567890123);
    }
    const std::string path = (d / "ts.csv").string();
    write_series_csv(path, s, "deadbeef");
    const ReducedSeries r = read_series_csv(path);
    CHECK(r.label == s.label);
    CHECK(r.x_d_over_sigma1 == s.x_d_over_sigma1);
    CHECK(r.t_p_over_t0 == s.t_p_over_t0);
    CHECK(r.delta_dev == s.delta_dev);
    REQUIRE(r.values.size() == s.values.size());
    // %.17g round-trips doubles exactly
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(r.t_over_t0[i] == s.t_over_t0[i]);
        CHECK(r.values[i] == s.values[i]);
    }
}
