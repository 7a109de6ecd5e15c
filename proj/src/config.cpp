#include "sar/config.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "sar/errors.hpp"

namespace sar {

namespace {

const char* const kKnownKeys[] = {
    "units.mass", "units.sigma1", "units.sigma0", "units.p0",
    "grid.x_min", "grid.x_max", "grid.n_points",
    "packet.kind", "packet.x0", "packet.sigma0", "packet.p0", "packet.alpha",
    "schedule.kind", "schedule.v0", "schedule.left_edge", "schedule.width",
    "schedule.w_i", "schedule.w_f", "schedule.a", "schedule.b",
    "schedule.separation", "schedule.t_p", "schedule.epsilon",
    "propagator.dt", "propagator.t_end", "propagator.store_every",
    "analysis.x_d", "analysis.delta_dev", "analysis.trajectory_count",
    "analysis.trajectory_points", "analysis.sweep_axis", "analysis.sweep_values",
    "output.directory", "output.snapshots", "output.snapshot_stride",
};

bool known_key(const std::string& k) {
    for (const char* cand : kKnownKeys) {
        if (k == cand) return true;
    }
    return false;
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct KeyValues {
    std::map<std::string, std::pair<std::string, int>> entries; // key -> (value, line)

    bool has(const std::string& k) const { return entries.count(k) != 0; }
    const std::string& raw(const std::string& k) const { return entries.at(k).first; }
    int line(const std::string& k) const { return entries.at(k).second; }
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(const KeyValues& kv, const std::string& key) {
    const std::string& s = kv.raw(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') fail(kv.line(key), key + ": not a number: '" + s + "'");
    return v;
}

std::size_t parse_count(const KeyValues& kv, const std::string& key) {
    const std::string& s = kv.raw(key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || v < 0) {
        fail(kv.line(key), key + ": not a non-negative integer: '" + s + "'");
    }
    return static_cast<std::size_t>(v);
}

bool parse_bool(const KeyValues& kv, const std::string& key) {
    const std::string& s = kv.raw(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    fail(kv.line(key), key + ": expected true/false: '" + s + "'");
}

std::vector<double> parse_list(const KeyValues& kv, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(kv.raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0') {
            fail(kv.line(key), key + ": bad list entry '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

void set_entry(KeyValues& kv, const std::string& key, const std::string& value, int line) {
    if (!known_key(key)) fail(line, "unknown key '" + key + "'");
    if (kv.has(key)) fail(line, "duplicate key '" + key + "'");
    kv.entries[key] = {value, line};
}

KeyValues scan(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(ss, raw_line)) {
        ++line_no;
        const std::size_t hash = raw_line.find('#');
        std::string line = trim(hash == std::string::npos ? raw_line : raw_line.substr(0, hash));
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        set_entry(kv, key, value, line_no);
    }
    return kv;
}

BarrierSchedule::Kind parse_schedule_kind(const KeyValues& kv) {
    if (!kv.has("schedule.kind")) return BarrierSchedule::Kind::linear_width;
    const std::string& s = kv.raw("schedule.kind");
    if (s == "static_rect") return BarrierSchedule::Kind::static_rect;
    if (s == "linear_width") return BarrierSchedule::Kind::linear_width;
    if (s == "height_ramp") return BarrierSchedule::Kind::height_ramp;
    if (s == "double_height_ramp") return BarrierSchedule::Kind::double_height_ramp;
    fail(kv.line("schedule.kind"), "unknown schedule.kind '" + s + "'");
}

RunConfig resolve(const KeyValues& kv) {
    UnitOverrides uo;
    if (kv.has("units.mass")) uo.mass = parse_double(kv, "units.mass");
    if (kv.has("units.sigma1")) uo.sigma1 = parse_double(kv, "units.sigma1");
    if (kv.has("units.sigma0")) uo.sigma0 = parse_double(kv, "units.sigma0");
    if (kv.has("units.p0")) uo.p0 = parse_double(kv, "units.p0");

    RunConfig cfg;
    try {
        cfg = default_config(parse_schedule_kind(kv), uo);
    } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (kv.has("grid.x_min")) cfg.grid.x_min = parse_double(kv, "grid.x_min");
    if (kv.has("grid.x_max")) cfg.grid.x_max = parse_double(kv, "grid.x_max");
    if (kv.has("grid.n_points")) cfg.grid.n_points = parse_count(kv, "grid.n_points");

    if (kv.has("packet.kind")) {
        const std::string& s = kv.raw("packet.kind");
        if (s == "gaussian") {
            cfg.packet.kind = PacketSpec::Kind::gaussian;
        } else if (s == "non_gaussian") {
            cfg.packet.kind = PacketSpec::Kind::non_gaussian;
        } else {
            fail(kv.line("packet.kind"), "unknown packet.kind '" + s + "'");
        }
    }
    if (kv.has("packet.x0")) cfg.packet.x0 = parse_double(kv, "packet.x0");
    if (kv.has("packet.sigma0")) cfg.packet.sigma0 = parse_double(kv, "packet.sigma0");
    if (kv.has("packet.p0")) cfg.packet.p0 = parse_double(kv, "packet.p0");
    if (kv.has("packet.alpha")) cfg.packet.alpha = parse_double(kv, "packet.alpha");

    if (kv.has("schedule.v0")) cfg.schedule.v0 = parse_double(kv, "schedule.v0");
    if (kv.has("schedule.left_edge")) cfg.schedule.left_edge = parse_double(kv, "schedule.left_edge");
    if (kv.has("schedule.width")) cfg.schedule.width = parse_double(kv, "schedule.width");
    if (kv.has("schedule.w_i")) cfg.schedule.w_i = parse_double(kv, "schedule.w_i");
    if (kv.has("schedule.w_f")) cfg.schedule.w_f = parse_double(kv, "schedule.w_f");
    if (kv.has("schedule.a")) cfg.schedule.ramp_a = parse_double(kv, "schedule.a");
    if (kv.has("schedule.b")) cfg.schedule.ramp_b = parse_double(kv, "schedule.b");
    if (kv.has("schedule.separation")) cfg.schedule.separation = parse_double(kv, "schedule.separation");
    if (kv.has("schedule.t_p")) cfg.schedule.t_p = parse_double(kv, "schedule.t_p");
    if (kv.has("schedule.epsilon")) cfg.schedule.epsilon = parse_double(kv, "schedule.epsilon");

    if (kv.has("propagator.dt")) cfg.propagation.dt = parse_double(kv, "propagator.dt");
    if (kv.has("propagator.t_end")) cfg.propagation.t_end = parse_double(kv, "propagator.t_end");
    if (kv.has("propagator.store_every")) {
        cfg.propagation.store_every = parse_count(kv, "propagator.store_every");
    }

    if (kv.has("analysis.x_d")) cfg.analysis.x_d = parse_double(kv, "analysis.x_d");
    if (kv.has("analysis.delta_dev")) cfg.analysis.delta_dev = parse_double(kv, "analysis.delta_dev");
    if (kv.has("analysis.trajectory_count")) {
        cfg.analysis.trajectory_count = parse_count(kv, "analysis.trajectory_count");
    }
    if (kv.has("analysis.trajectory_points")) {
        cfg.analysis.trajectory_points = parse_list(kv, "analysis.trajectory_points");
    }
    if (kv.has("analysis.sweep_axis")) cfg.analysis.sweep_axis = kv.raw("analysis.sweep_axis");
    if (kv.has("analysis.sweep_values")) cfg.analysis.sweep_values = parse_list(kv, "analysis.sweep_values");

    if (kv.has("output.directory")) cfg.output.directory = kv.raw("output.directory");
    if (kv.has("output.snapshots")) cfg.output.snapshots = parse_bool(kv, "output.snapshots");
    if (kv.has("output.snapshot_stride")) {
        cfg.output.snapshot_stride = parse_count(kv, "output.snapshot_stride");
    }

    cfg.validate();
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(vs[i]);
    }
    return out;
}

const char* schedule_kind_name(BarrierSchedule::Kind k) {
    switch (k) {
    case BarrierSchedule::Kind::static_rect: return "static_rect";
    case BarrierSchedule::Kind::linear_width: return "linear_width";
    case BarrierSchedule::Kind::height_ramp: return "height_ramp";
    case BarrierSchedule::Kind::double_height_ramp: return "double_height_ramp";
    }
    return "?";
}

} // namespace

RunConfig parse_config(const std::string& text) { return resolve(scan(text)); }

RunConfig parse_config(const std::string& text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    KeyValues kv = scan(text);
    for (const auto& [key, value] : overrides) {
        if (!known_key(key)) throw ConfigError("override: unknown key '" + key + "'");
        kv.entries[key] = {value, 0}; // command line wins over the file
    }
    return resolve(kv);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    auto put = [&](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };
    put("units.mass", fmt(cfg.units.mass));
    put("units.sigma0", fmt(cfg.units.sigma0)); // canonical: sigma1 is derived
    put("units.p0", fmt(cfg.units.p0));
    put("grid.x_min", fmt(cfg.grid.x_min));
    put("grid.x_max", fmt(cfg.grid.x_max));
    put("grid.n_points", std::to_string(cfg.grid.n_points));
    put("packet.kind", cfg.packet.kind == PacketSpec::Kind::gaussian ? "gaussian" : "non_gaussian");
    put("packet.x0", fmt(cfg.packet.x0));
    put("packet.sigma0", fmt(cfg.packet.sigma0));
    put("packet.p0", fmt(cfg.packet.p0));
    put("packet.alpha", fmt(cfg.packet.alpha));
    put("schedule.kind", schedule_kind_name(cfg.schedule.kind));
    put("schedule.v0", fmt(cfg.schedule.v0));
    switch (cfg.schedule.kind) {
    case BarrierSchedule::Kind::static_rect:
        put("schedule.left_edge", fmt(cfg.schedule.left_edge));
        put("schedule.width", fmt(cfg.schedule.width));
        break;
    case BarrierSchedule::Kind::linear_width:
        put("schedule.w_i", fmt(cfg.schedule.w_i));
        put("schedule.w_f", fmt(cfg.schedule.w_f));
        put("schedule.t_p", fmt(cfg.schedule.t_p));
        put("schedule.epsilon", fmt(cfg.schedule.epsilon));
        break;
    case BarrierSchedule::Kind::double_height_ramp:
    case BarrierSchedule::Kind::height_ramp:
        put("schedule.width", fmt(cfg.schedule.width));
        if (cfg.schedule.kind == BarrierSchedule::Kind::double_height_ramp) {
            put("schedule.separation", fmt(cfg.schedule.separation));
        }
        put("schedule.a", fmt(cfg.schedule.ramp_a));
        put("schedule.b", fmt(cfg.schedule.ramp_b));
        put("schedule.t_p", fmt(cfg.schedule.t_p));
        put("schedule.epsilon", fmt(cfg.schedule.epsilon));
        break;
    }
    put("propagator.dt", fmt(cfg.propagation.dt));
    put("propagator.t_end", fmt(cfg.propagation.t_end));
    put("propagator.store_every", std::to_string(cfg.propagation.store_every));
    put("analysis.x_d", fmt(cfg.analysis.x_d));
    put("analysis.delta_dev", fmt(cfg.analysis.delta_dev));
    put("analysis.trajectory_count", std::to_string(cfg.analysis.trajectory_count));
    if (!cfg.analysis.trajectory_points.empty()) {
        put("analysis.trajectory_points", fmt_list(cfg.analysis.trajectory_points));
    }
    if (!cfg.analysis.sweep_axis.empty()) {
        put("analysis.sweep_axis", cfg.analysis.sweep_axis);
        put("analysis.sweep_values", fmt_list(cfg.analysis.sweep_values));
    }
    put("output.directory", cfg.output.directory);
    put("output.snapshots", cfg.output.snapshots ? "true" : "false");
    put("output.snapshot_stride", std::to_string(cfg.output.snapshot_stride));
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    // hash the computation, not the destination: output.* keys are excluded
    // so runs into different directories agree on provenance
    const std::string all = serialize_config(cfg);
    std::string s;
    std::stringstream ss(all);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("output.", 0) == 0) continue;
        s += line;
        s += '\n';
    }
    std::uint64_t h = 1469598103934665603ULL; // FNV offset basis
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL; // FNV prime
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

} // namespace sar
