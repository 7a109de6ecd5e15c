#include "sar/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sar/config.hpp"
#include "sar/errors.hpp"

namespace sar {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

const char* classification_name(Trajectory::Classification c) {
    switch (c) {
    case Trajectory::Classification::transmitted: return "transmitted";
    case Trajectory::Classification::reflected: return "reflected";
    case Trajectory::Classification::undecided: return "undecided";
    }
    return "?";
}

} // namespace

ReducedSeries reduce_series(const TransmissionSeries& s, const UnitSystem& units, double t_p,
                            double epsilon, double delta_dev) {
    ReducedSeries r;
    switch (s.label) {
    case TransmissionSeries::Label::static_ref: r.label = "static"; break;
    case TransmissionSeries::Label::perturbed: r.label = "perturbed"; break;
    case TransmissionSeries::Label::free_analytic: r.label = "free_analytic"; break;
    }
    r.x_d_over_sigma1 = s.x_d / units.sigma1;
    r.t_p_over_t0 = t_p / units.t0;
    r.epsilon_over_t0 = epsilon / units.t0;
    r.delta_dev = delta_dev;
    r.t_over_t0.reserve(s.times.size());
    for (const double t : s.times) r.t_over_t0.push_back(t / units.t0);
    r.values = s.values;
    return r;
}

void write_series_csv(const std::string& path, const ReducedSeries& series,
                      const std::string& hash) {
    auto out = open_out(path);
    out << "# " << kToolName << " " << kToolVersion << "\n";
    out << "# observable: transmission\n";
    out << "# label: " << series.label << "\n";
    out << "# columns: t_over_t0, T\n";
    out << "# x_d_over_sigma1: " << fmt(series.x_d_over_sigma1) << "\n";
    out << "# t_p_over_t0: " << fmt(series.t_p_over_t0) << "\n";
    out << "# epsilon_over_t0: " << fmt(series.epsilon_over_t0) << "\n";
    out << "# delta_dev: " << fmt(series.delta_dev) << "\n";
    out << "# config: " << hash << "\n";
    for (std::size_t i = 0; i < series.t_over_t0.size(); ++i) {
        out << fmt(series.t_over_t0[i]) << "," << fmt(series.values[i]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

ReducedSeries read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    ReducedSeries r;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto grab = [&](const char* key) -> const char* {
                const std::string k = std::string("# ") + key + ": ";
                if (line.rfind(k, 0) == 0) return line.c_str() + k.size();
                return nullptr;
            };
            if (const char* v = grab("label")) r.label = v;
            if (const char* v = grab("x_d_over_sigma1")) r.x_d_over_sigma1 = std::strtod(v, nullptr);
            if (const char* v = grab("t_p_over_t0")) r.t_p_over_t0 = std::strtod(v, nullptr);
            if (const char* v = grab("epsilon_over_t0")) r.epsilon_over_t0 = std::strtod(v, nullptr);
            if (const char* v = grab("delta_dev")) r.delta_dev = std::strtod(v, nullptr);
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError(path + " line " + std::to_string(line_no) + ": expected 't,T'");
        }
        char* end = nullptr;
        const double t = std::strtod(line.c_str(), &end);
        const double v = std::strtod(line.c_str() + comma + 1, nullptr);
        r.t_over_t0.push_back(t);
        r.values.push_back(v);
    }
    if (r.t_over_t0.size() < 2) throw IoError(path + ": no data rows");
    return r;
}

void write_expectations_csv(const std::string& path, const ExpectationSeries& series,
                            const UnitSystem& units, const std::string& hash) {
    auto out = open_out(path);
    out << "# " << kToolName << " " << kToolVersion << "\n";
    out << "# observable: transmitted-sector expectations\n";
    out << "# columns: t_over_t0, H_over_E0, p_over_p0, x_over_sigma1, imag_residual\n";
    out << "# absent entries (T below floor) are nan\n";
    out << "# x_d_over_sigma1: " << fmt(series.x_d / units.sigma1) << "\n";
    out << "# config: " << hash << "\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << fmt(series.times[i] / units.t0) << "," << fmt(series.energy[i] / units.E0) << ","
            << fmt(series.momentum[i] / units.p0) << "," << fmt(series.position[i] / units.sigma1)
            << "," << fmt(series.imag_residual[i]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep, const UnitSystem& units,
                     const std::string& hash) {
    auto out = open_out(path);
    const double nan = std::nan("");
    out << "# " << kToolName << " " << kToolVersion << "\n";
    out << "# observable: superarrivality sweep\n";
    out << "# axis: " << SweepAxis::label(sweep.axis) << "\n";
    out << "# columns: parameter, eta, delta_t_over_t0, t_d_over_t0, t_c_over_t0, "
           "T_ref_final, T_pert_final, status\n";
    out << "# config: " << hash << "\n";
    for (const SweepPoint& p : sweep.points) {
        const bool ok = p.report.has_value();
        out << fmt(p.parameter) << "," << fmt(ok ? p.report->eta : nan) << ","
            << fmt(ok ? p.report->delta_t / units.t0 : nan) << ","
            << fmt(ok ? p.report->t_d / units.t0 : nan) << ","
            << fmt(ok ? p.report->t_c / units.t0 : nan) << "," << fmt(p.T_ref_final) << ","
            << fmt(p.T_pert_final) << "," << p.status << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_trajectories_csv(const std::string& path, const std::vector<Trajectory>& bundle,
                            const UnitSystem& units, const std::string& hash) {
    auto out = open_out(path);
    out << "# " << kToolName << " " << kToolVersion << "\n";
    out << "# observable: bohmian trajectories\n";
    out << "# columns: trajectory_id, t_over_t0, x_over_sigma1, classification\n";
    out << "# config: " << hash << "\n";
    for (std::size_t id = 0; id < bundle.size(); ++id) {
        const Trajectory& tr = bundle[id];
        const char* cls = classification_name(tr.classification);
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            out << id << "," << fmt(tr.times[i] / units.t0) << ","
                << fmt(tr.positions[i] / units.sigma1) << "," << cls << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

std::string build_pair_report_json(const ReducedSeries& reference,
                                   const ReducedSeries& perturbed) {
    TransmissionSeries ref;
    ref.times = reference.t_over_t0;
    ref.values = reference.values;
    TransmissionSeries pert;
    pert.times = perturbed.t_over_t0;
    pert.values = perturbed.values;

    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["reference_label"] = reference.label;
    j["x_d_over_sigma1"] = perturbed.x_d_over_sigma1;
    j["t_p_over_t0"] = perturbed.t_p_over_t0;
    j["epsilon_over_t0"] = perturbed.epsilon_over_t0;
    j["delta_dev"] = perturbed.delta_dev;
    j["T_reference_final"] = reference.values.back();
    j["T_perturbed_final"] = perturbed.values.back();

    const DetectionResult det =
        detect_window(ref, pert, perturbed.t_p_over_t0, perturbed.delta_dev);
    switch (det.status) {
    case DetectionResult::Status::no_deviation:
        j["status"] = "no_deviation";
        break;
    case DetectionResult::Status::window_open:
        j["status"] = "window_open";
        j["t_d_over_t0"] = det.t_d;
        break;
    case DetectionResult::Status::window: {
        const SuperarrivalReport rep = superarrivality(ref, pert, det.t_d, det.t_c);
        j["status"] = "window";
        j["t_d_over_t0"] = rep.t_d;
        j["t_c_over_t0"] = rep.t_c;
        j["delta_t_over_t0"] = rep.delta_t;
        j["I_p_over_t0"] = rep.I_p;
        j["I_s_over_t0"] = rep.I_s;
        j["eta"] = rep.eta;
        j["t_d_sensitivity_over_t0"] = {{"half_delta", det.t_d_half_delta},
                                        {"double_delta", det.t_d_double_delta}};
        break;
    }
    }
    return j.dump(2) + "\n";
}

void write_pair_report(const std::string& path, const ReducedSeries& reference,
                       const ReducedSeries& perturbed) {
    auto out = open_out(path);
    out << build_pair_report_json(reference, perturbed);
    if (!out) throw IoError("write failed: " + path);
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& subcommand,
                    double wall_time_s, const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config_hash"] = config_hash(cfg);
    j["config"] = serialize_config(cfg);
    j["wall_time_s"] = wall_time_s;
    j["outputs"] = outputs;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

SnapshotWriter::SnapshotWriter(const SpatialGrid& grid, const UnitSystem& units,
                               std::string directory, std::size_t stride)
    : grid_(grid), units_(units), directory_(std::move(directory)),
      stride_(stride == 0 ? 1 : stride) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) throw IoError("cannot create snapshot directory: " + directory_);
}

void SnapshotWriter::sample(std::size_t step, double t, const WaveState& state) {
    if (count_++ % stride_ != 0) return;
    char name[64];
    std::snprintf(name, sizeof(name), "snap_%08zu.csv", step);
    const std::string path = directory_ + "/" + name;
    auto out = open_out(path);
    out << "# " << kToolName << " " << kToolVersion << "\n";
    out << "# observable: wavefunction snapshot\n";
    out << "# columns: x_over_sigma1, re_psi, im_psi\n";
    out << "# t_over_t0: " << fmt(t / units_.t0) << "\n";
    for (std::size_t j = 0; j < grid_.n_points; ++j) {
        out << fmt(grid_.x(j) / units_.sigma1) << "," << fmt(state.amplitudes[j].real()) << ","
            << fmt(state.amplitudes[j].imag()) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
    files_.push_back(path);
}

} // namespace sar
