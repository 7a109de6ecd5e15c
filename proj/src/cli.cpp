#include "sar/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sar/bohmian.hpp"
#include "sar/config.hpp"
#include "sar/errors.hpp"
#include "sar/observables.hpp"
#include "sar/output.hpp"
#include "sar/superarrival.hpp"

namespace sar {

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::pair<std::string, std::string>> split_overrides(
    const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        std::string key = s.substr(0, eq);
        std::string value = s.substr(eq + 1);
        const auto trim = [](std::string& t) {
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
            while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        };
        trim(key);
        trim(value);
        out.emplace_back(key, value);
    }
    return out;
}

SweepAxis::Name parse_axis_name(const std::string& s) {
    if (s == "epsilon") return SweepAxis::Name::epsilon;
    if (s == "w_f") return SweepAxis::Name::w_f;
    if (s == "x_d") return SweepAxis::Name::x_d;
    if (s == "b") return SweepAxis::Name::b;
    if (s == "separation") return SweepAxis::Name::separation;
    if (s == "alpha") return SweepAxis::Name::alpha;
    throw ConfigError("unknown sweep axis '" + s + "'");
}

std::vector<double> parse_value_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') throw ConfigError("bad value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void prepare_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output.directory, ec);
    if (ec) throw IoError("cannot create output directory: " + cfg.output.directory);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output.directory) / name).string();
}

TransmissionSeries::Label run_label(const BarrierSchedule& s) {
    return s.kind == BarrierSchedule::Kind::static_rect ? TransmissionSeries::Label::static_ref
                                                        : TransmissionSeries::Label::perturbed;
}

int cmd_simulate(const RunConfig& cfg, unsigned /*threads*/) {
    Timer timer;
    prepare_out_dir(cfg);
    const std::string hash = config_hash(cfg);
    const SpatialGrid grid = cfg.grid.build();
    const WaveState psi0 = build_packet(cfg.packet, grid, cfg.units);

    TransmissionObserver t_obs(grid, cfg.analysis.x_d, run_label(cfg.schedule));
    ExpectationObserver e_obs(grid, cfg.units, cfg.schedule, cfg.analysis.x_d);
    std::vector<Observer*> observers{&t_obs, &e_obs};
    std::unique_ptr<SnapshotWriter> snap;
    if (cfg.output.snapshots) {
        snap = std::make_unique<SnapshotWriter>(grid, cfg.units, out_path(cfg, "snapshots"),
                                                cfg.output.snapshot_stride);
        observers.push_back(snap.get());
    }

    const RunResult rr = propagate(psi0, cfg.schedule, grid, cfg.units, cfg.propagation,
                                   std::span<Observer* const>(observers));

    const double t_p = cfg.schedule.is_time_dependent() ? cfg.schedule.t_p : 0.0;
    const double eps = cfg.schedule.is_time_dependent() ? cfg.schedule.epsilon : 0.0;
    const ReducedSeries series =
        reduce_series(t_obs.series(), cfg.units, t_p, eps, cfg.analysis.delta_dev);
    std::vector<std::string> outputs;
    const std::string ts_name = std::string("ts_") + series.label + ".csv";
    write_series_csv(out_path(cfg, ts_name), series, hash);
    outputs.push_back(ts_name);
    write_expectations_csv(out_path(cfg, "expectations.csv"), e_obs.series(), cfg.units, hash);
    outputs.push_back("expectations.csv");
    if (snap) outputs.push_back("snapshots/");
    write_manifest(out_path(cfg, "manifest.json"), cfg, "simulate", timer.seconds(), outputs);

    std::cout << "simulate: T(t_end) = " << t_obs.series().values.back()
              << ", norm drift " << rr.max_norm_drift << "\n";
    return 0;
}

int cmd_pair(const RunConfig& cfg, unsigned threads) {
    Timer timer;
    prepare_out_dir(cfg);
    const std::string hash = config_hash(cfg);
    const PairOutcome pair = run_pair(cfg, threads);

    const double t_p = cfg.schedule.is_time_dependent() ? cfg.schedule.t_p : 0.0;
    const double eps = cfg.schedule.is_time_dependent() ? cfg.schedule.epsilon : 0.0;
    const ReducedSeries ref =
        reduce_series(pair.reference, cfg.units, t_p, eps, cfg.analysis.delta_dev);
    const ReducedSeries pert =
        reduce_series(pair.perturbed, cfg.units, t_p, eps, cfg.analysis.delta_dev);

    const std::string ref_name = ref.label == "free_analytic" ? "ts_free.csv" : "ts_static.csv";
    write_series_csv(out_path(cfg, ref_name), ref, hash);
    write_series_csv(out_path(cfg, "ts_perturbed.csv"), pert, hash);
    write_pair_report(out_path(cfg, "report.json"), ref, pert);
    write_manifest(out_path(cfg, "manifest.json"), cfg, "pair", timer.seconds(),
                   {ref_name, "ts_perturbed.csv", "report.json"});

    std::cout << "pair: T_ref(t_end) = " << pair.reference_final
              << ", T_pert(t_end) = " << pair.perturbed_final;
    if (pair.report) {
        std::cout << ", eta = " << pair.report->eta << " over ["
                  << pair.report->t_d / cfg.units.t0 << ", " << pair.report->t_c / cfg.units.t0
                  << "] t0";
    } else {
        std::cout << ", no superarrival window";
    }
    std::cout << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, unsigned threads, const std::string& axis_flag,
              const std::string& values_flag) {
    Timer timer;
    prepare_out_dir(cfg);
    const std::string hash = config_hash(cfg);

    const std::string axis_name = !axis_flag.empty() ? axis_flag : cfg.analysis.sweep_axis;
    if (axis_name.empty()) throw ConfigError("sweep: no axis given (--axis or analysis.sweep_axis)");
    SweepAxis axis;
    axis.name = parse_axis_name(axis_name);
    axis.values = !values_flag.empty() ? parse_value_list(values_flag) : cfg.analysis.sweep_values;
    if (axis.values.size() < 2) throw ConfigError("sweep: need at least two axis values");

    const SweepResult result = sweep(cfg, axis, threads);

    const std::string name = std::string("sweep_") + SweepAxis::label(axis.name) + ".csv";
    write_sweep_csv(out_path(cfg, name), result, cfg.units, hash);
    write_manifest(out_path(cfg, "manifest.json"), cfg, "sweep", timer.seconds(), {name});

    std::cout << "sweep over " << SweepAxis::label(axis.name) << ": " << result.points.size()
              << " points\n";
    for (const SweepPoint& p : result.points) {
        std::cout << "  " << p.parameter << ": "
                  << (p.report ? ("eta = " + std::to_string(p.report->eta)) : p.status) << "\n";
    }
    return 0;
}

int cmd_trajectories(const RunConfig& cfg, unsigned /*threads*/, std::size_t count_flag,
                     const std::string& points_flag) {
    Timer timer;
    prepare_out_dir(cfg);
    const std::string hash = config_hash(cfg);
    const SpatialGrid grid = cfg.grid.build();
    const WaveState psi0 = build_packet(cfg.packet, grid, cfg.units);

    const auto [win_lo, win_hi] = snapshot_window(cfg);
    SnapshotObserver snap(grid, cfg.units, win_lo, win_hi);
    TransmissionObserver t_obs(grid, cfg.analysis.x_d, run_label(cfg.schedule));
    Observer* observers[] = {&snap, &t_obs};
    propagate(psi0, cfg.schedule, grid, cfg.units, cfg.propagation, observers);

    const std::size_t count = count_flag != 0 ? count_flag : cfg.analysis.trajectory_count;
    std::vector<double> starts = ensemble_positions(count, cfg.packet, grid, cfg.units);
    if (!points_flag.empty()) {
        for (const double p : parse_value_list(points_flag)) starts.push_back(p);
    } else {
        for (const double p : cfg.analysis.trajectory_points) starts.push_back(p);
    }

    const SnapshotRecord record = snap.take();
    std::vector<Trajectory> bundle;
    bundle.reserve(starts.size());
    std::size_t transmitted = 0;
    for (const double s : starts) {
        bundle.push_back(integrate_trajectory(s, record, grid, cfg.units, cfg.analysis.x_d));
        if (bundle.back().classification == Trajectory::Classification::transmitted) ++transmitted;
    }

    write_trajectories_csv(out_path(cfg, "trajectories.csv"), bundle, cfg.units, hash);
    write_manifest(out_path(cfg, "manifest.json"), cfg, "trajectories", timer.seconds(),
                   {"trajectories.csv"});

    std::cout << "trajectories: " << transmitted << "/" << bundle.size()
              << " transmitted; T(t_end) = " << t_obs.series().values.back() << "\n";
    return 0;
}

int cmd_analyze(const std::string& dir) {
    const fs::path d(dir);
    const std::string pert_path = (d / "ts_perturbed.csv").string();
    if (!fs::exists(pert_path)) throw IoError("analyze: missing " + pert_path);
    std::string ref_path = (d / "ts_static.csv").string();
    if (!fs::exists(ref_path)) ref_path = (d / "ts_free.csv").string();
    if (!fs::exists(ref_path)) throw IoError("analyze: no ts_static.csv or ts_free.csv in " + dir);

    const ReducedSeries ref = read_series_csv(ref_path);
    const ReducedSeries pert = read_series_csv(pert_path);
    write_pair_report((d / "report.json").string(), ref, pert);
    std::cout << "analyze: report.json rewritten from " << ref_path << " and " << pert_path
              << "\n";
    return 0;
}

} // namespace

std::pair<double, double> snapshot_window(const RunConfig& cfg) {
    const double v0 = cfg.packet.p0 / cfg.units.mass;
    const double lo = std::max(cfg.grid.x_min,
                               cfg.packet.x0 - 5.0 * cfg.packet.sigma0 -
                                   v0 * cfg.propagation.t_end);
    const double hi = std::min(cfg.grid.x_max,
                               cfg.analysis.x_d + (cfg.analysis.x_d - cfg.packet.x0));
    return {lo, hi};
}

int run_cli(const std::vector<std::string>& argv) {
    CLI::App app{"1D wavepacket scattering off time-dependent rectangular barriers: "
                 "transmission series, superarrival windows, Bohmian trajectories"};
    app.name(kToolName);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_file;
    std::string out_dir;
    std::vector<std::string> sets;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool snapshots = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_file, "configuration file (key = value lines)");
        cmd->add_option("--out", out_dir, "output directory (overrides output.directory)");
        cmd->add_option("--set", sets, "override a config key, e.g. --set grid.n_points=65536");
        cmd->add_option("--threads", threads, "worker cap for concurrent runs");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "single propagation: T(t) and expectations");
    add_common(simulate);
    simulate->add_flag("--snapshots", snapshots, "dump wavefunction snapshots");

    CLI::App* pair = app.add_subcommand("pair", "reference + perturbed runs, window and eta");
    add_common(pair);

    std::string axis_flag;
    std::string values_flag;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "eta over a parameter axis");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis_flag, "epsilon|w_f|x_d|b|separation|alpha");
    sweep_cmd->add_option("--values", values_flag, "comma list in the axis unit (t0/sigma1/plain)");

    std::size_t traj_count = 0;
    std::string points_flag;
    CLI::App* traj_cmd = app.add_subcommand("trajectories", "Bohmian ensemble over a stored run");
    add_common(traj_cmd);
    traj_cmd->add_option("--count", traj_count, "quantile ensemble size");
    traj_cmd->add_option("--points", points_flag, "extra start positions (natural units)");

    std::string analyze_dir = ".";
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "recompute report.json from emitted series");
    analyze_cmd->add_option("--dir", analyze_dir, "directory holding ts_*.csv");

    std::vector<const char*> cargv;
    cargv.push_back(kToolName);
    for (const auto& a : argv) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_dir);

        auto overrides = split_overrides(sets);
        if (!out_dir.empty()) overrides.emplace_back("output.directory", out_dir);
        if (snapshots) overrides.emplace_back("output.snapshots", "true");
        const std::string text = config_file.empty() ? std::string() : slurp(config_file);
        const RunConfig cfg = parse_config(text, overrides);

        if (simulate->parsed()) return cmd_simulate(cfg, threads);
        if (pair->parsed()) return cmd_pair(cfg, threads);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, threads, axis_flag, values_flag);
        if (traj_cmd->parsed()) return cmd_trajectories(cfg, threads, traj_count, points_flag);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sar
