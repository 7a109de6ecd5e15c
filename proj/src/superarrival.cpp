#include "sar/superarrival.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "sar/bohmian.hpp"
#include "sar/errors.hpp"

namespace sar {

namespace {

void require_shared_axis(const TransmissionSeries& a, const TransmissionSeries& b) {
    if (a.times.size() != b.times.size() || a.times != b.times) {
        throw InvalidParameterError("superarrival: series must share an identical time axis");
    }
    if (a.times.size() < 2) throw InvalidParameterError("superarrival: series too short");
}

double find_t_d(const std::vector<double>& t, const std::vector<double>& diff, double t_p,
                double delta_dev, bool& found) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_p && diff[i] > delta_dev) {
            found = true;
            return t[i];
        }
    }
    found = false;
    return 0.0;
}

/// Linear interpolation of a sampled series at time tq inside its axis.
double interp_series(const std::vector<double>& t, const std::vector<double>& y, double tq) {
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return y.front();
    if (it == t.end()) return y.back();
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double w = (tq - t[k - 1]) / (t[k] - t[k - 1]);
    return y[k - 1] + (y[k] - y[k - 1]) * w;
}

/// Trapezoid integral of a sampled series over [ta, tb] with linear
/// interpolation at both window ends.
double integrate_series(const std::vector<double>& t, const std::vector<double>& y, double ta,
                        double tb) {
    double sum = 0.0;
    double prev_t = ta;
    double prev_y = interp_series(t, y, ta);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= ta) continue;
        if (t[i] >= tb) break;
        sum += 0.5 * (prev_y + y[i]) * (t[i] - prev_t);
        prev_t = t[i];
        prev_y = y[i];
    }
    const double yb = interp_series(t, y, tb);
    sum += 0.5 * (prev_y + yb) * (tb - prev_t);
    return sum;
}

} // namespace

DetectionResult detect_window(const TransmissionSeries& reference,
                              const TransmissionSeries& perturbed, double t_p,
                              double delta_dev) {
    require_shared_axis(reference, perturbed);
    if (!(delta_dev > 0.0)) throw InvalidParameterError("detect_window: delta_dev must be positive");

    const auto& t = perturbed.times;
    std::vector<double> diff(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) diff[i] = perturbed.values[i] - reference.values[i];

    DetectionResult res;
    bool found = false;
    res.t_d = find_t_d(t, diff, t_p, delta_dev, found);
    if (!found) {
        res.status = DetectionResult::Status::no_deviation;
        return res;
    }
    bool f2 = false;
    res.t_d_half_delta = find_t_d(t, diff, t_p, 0.5 * delta_dev, f2);
    res.t_d_double_delta = find_t_d(t, diff, t_p, 2.0 * delta_dev, f2);

    // first sign change after t_d
    std::size_t i_d = 0;
    while (t[i_d] < res.t_d) ++i_d;
    for (std::size_t k = i_d + 1; k < t.size(); ++k) {
        if (diff[k] < 0.0) {
            const double d1 = diff[k - 1];
            const double d2 = diff[k];
            res.t_c = t[k - 1] + (t[k] - t[k - 1]) * d1 / (d1 - d2);
            res.status = DetectionResult::Status::window;
            return res;
        }
    }
    res.status = DetectionResult::Status::window_open;
    return res;
}

SuperarrivalReport superarrivality(const TransmissionSeries& reference,
                                   const TransmissionSeries& perturbed, double t_d, double t_c) {
    require_shared_axis(reference, perturbed);
    if (!(t_d < t_c)) throw InvalidParameterError("superarrivality: need t_d < t_c");
    if (t_d < perturbed.times.front() || t_c > perturbed.times.back()) {
        throw InvalidParameterError("superarrivality: window not covered by the series");
    }
    SuperarrivalReport rep;
    rep.t_d = t_d;
    rep.t_c = t_c;
    rep.delta_t = t_c - t_d;
    rep.I_p = integrate_series(perturbed.times, perturbed.values, t_d, t_c);
    rep.I_s = integrate_series(reference.times, reference.values, t_d, t_c);
    if (rep.I_s == 0.0) throw DomainError("superarrivality: degenerate reference area");
    rep.eta = (rep.I_p - rep.I_s) / rep.I_s;
    return rep;
}

RunConfig derive_reference(const RunConfig& perturbed) {
    RunConfig ref = perturbed;
    switch (perturbed.schedule.kind) {
    case BarrierSchedule::Kind::static_rect:
        break; // reference is the run itself
    case BarrierSchedule::Kind::linear_width:
        ref.schedule = BarrierSchedule::static_rect(perturbed.schedule.v0, 0.0,
                                                    perturbed.schedule.w_i);
        break;
    case BarrierSchedule::Kind::height_ramp:
    case BarrierSchedule::Kind::double_height_ramp:
        // the barrier grows from zero height: compare against free propagation
        ref.schedule = BarrierSchedule::free_space();
        break;
    }
    return ref;
}

namespace {

TransmissionSeries run_transmission(const RunConfig& cfg, const TimeGrid& tg,
                                    TransmissionSeries::Label label, double& final_norm_drift) {
    const SpatialGrid grid = cfg.grid.build();
    const WaveState psi0 = build_packet(cfg.packet, grid, cfg.units);
    TransmissionObserver obs(grid, cfg.analysis.x_d, label);
    Observer* obs_list[] = {&obs};
    const RunResult rr = propagate(psi0, cfg.schedule, grid, cfg.units, tg,
                                   cfg.propagation.store_every, obs_list);
    final_norm_drift = rr.max_norm_drift;
    return obs.take();
}

bool same_except_schedule(const RunConfig& a, const RunConfig& b) {
    return a.grid.x_min == b.grid.x_min && a.grid.x_max == b.grid.x_max &&
           a.grid.n_points == b.grid.n_points && a.packet.kind == b.packet.kind &&
           a.packet.x0 == b.packet.x0 && a.packet.sigma0 == b.packet.sigma0 &&
           a.packet.p0 == b.packet.p0 && a.packet.alpha == b.packet.alpha &&
           a.propagation.dt == b.propagation.dt && a.propagation.t_end == b.propagation.t_end &&
           a.propagation.store_every == b.propagation.store_every &&
           a.analysis.x_d == b.analysis.x_d && a.analysis.delta_dev == b.analysis.delta_dev;
}

} // namespace

PairOutcome run_pair(const RunConfig& reference_cfg, const RunConfig& perturbed_cfg,
                     unsigned threads) {
    reference_cfg.validate();
    perturbed_cfg.validate();
    if (!same_except_schedule(reference_cfg, perturbed_cfg)) {
        throw InvalidParameterError("run_pair: configs must be identical except the schedule");
    }

    // both runs share the time partition aligned to the perturbed ramp
    const TimeGrid tg = TimeGrid::aligned(perturbed_cfg.propagation.t_end,
                                          perturbed_cfg.propagation.dt,
                                          perturbed_cfg.schedule.ramp_interval());

    PairOutcome out;
    const bool analytic_reference =
        reference_cfg.schedule.kind == BarrierSchedule::Kind::static_rect &&
        reference_cfg.schedule.v0 == 0.0 &&
        perturbed_cfg.packet.kind == PacketSpec::Kind::gaussian;

    double drift_ref = 0.0;
    double drift_pert = 0.0;
    if (analytic_reference) {
        out.perturbed = run_transmission(perturbed_cfg, tg, TransmissionSeries::Label::perturbed,
                                         drift_pert);
        out.reference = free_transmission_series(out.perturbed.times, perturbed_cfg.packet.x0,
                                                 perturbed_cfg.packet.sigma0,
                                                 perturbed_cfg.packet.p0, perturbed_cfg.units,
                                                 perturbed_cfg.analysis.x_d);
    } else if (threads >= 2) {
        auto fut = std::async(std::launch::async, [&] {
            return run_transmission(reference_cfg, tg, TransmissionSeries::Label::static_ref,
                                    drift_ref);
        });
        out.perturbed = run_transmission(perturbed_cfg, tg, TransmissionSeries::Label::perturbed,
                                         drift_pert);
        out.reference = fut.get();
    } else {
        out.reference = run_transmission(reference_cfg, tg, TransmissionSeries::Label::static_ref,
                                         drift_ref);
        out.perturbed = run_transmission(perturbed_cfg, tg, TransmissionSeries::Label::perturbed,
                                         drift_pert);
    }
    out.max_norm_drift = std::max(drift_ref, drift_pert);
    out.reference_final = out.reference.values.back();
    out.perturbed_final = out.perturbed.values.back();

    const double t_p = perturbed_cfg.schedule.is_time_dependent() ? perturbed_cfg.schedule.t_p : 0.0;
    out.detection = detect_window(out.reference, out.perturbed, t_p,
                                  perturbed_cfg.analysis.delta_dev);
    if (out.detection.status == DetectionResult::Status::window) {
        out.report = superarrivality(out.reference, out.perturbed, out.detection.t_d,
                                     out.detection.t_c);
    }
    return out;
}

PairOutcome run_pair(const RunConfig& perturbed_cfg, unsigned threads) {
    return run_pair(derive_reference(perturbed_cfg), perturbed_cfg, threads);
}

const char* SweepAxis::label(Name n) {
    switch (n) {
    case Name::epsilon: return "epsilon";
    case Name::w_f: return "w_f";
    case Name::x_d: return "x_d";
    case Name::b: return "b";
    case Name::separation: return "separation";
    case Name::alpha: return "alpha";
    }
    return "?";
}

RunConfig apply_axis_value(const RunConfig& base, SweepAxis::Name axis, double value) {
    RunConfig cfg = base;
    switch (axis) {
    case SweepAxis::Name::epsilon:
        cfg.schedule.epsilon = value * cfg.units.t0;
        break;
    case SweepAxis::Name::w_f:
        if (cfg.schedule.kind != BarrierSchedule::Kind::linear_width) {
            throw InvalidParameterError("sweep: w_f axis needs a linear_width schedule");
        }
        cfg.schedule.w_f = value * cfg.units.sigma1;
        break;
    case SweepAxis::Name::x_d:
        cfg.analysis.x_d = value * cfg.units.sigma1;
        break;
    case SweepAxis::Name::b:
        if (cfg.schedule.kind != BarrierSchedule::Kind::height_ramp &&
            cfg.schedule.kind != BarrierSchedule::Kind::double_height_ramp) {
            throw InvalidParameterError("sweep: b axis needs a height-ramp schedule");
        }
        cfg.schedule.ramp_b = value;
        cfg.schedule.ramp_a = 1.0 - value;
        break;
    case SweepAxis::Name::separation:
        if (cfg.schedule.kind != BarrierSchedule::Kind::double_height_ramp) {
            throw InvalidParameterError("sweep: separation axis needs a double_height_ramp schedule");
        }
        cfg.schedule.separation = value * cfg.units.sigma1;
        break;
    case SweepAxis::Name::alpha:
        cfg.packet.kind = PacketSpec::Kind::non_gaussian;
        cfg.packet.alpha = value;
        break;
    }
    cfg.schedule.validate();
    return cfg;
}

SweepResult sweep(const RunConfig& base, const SweepAxis& axis, unsigned threads) {
    if (axis.values.size() < 2) throw InvalidParameterError("sweep: need at least 2 axis values");
    for (const double v : axis.values) {
        if (!std::isfinite(v)) throw InvalidParameterError("sweep: axis values must be finite");
    }

    std::vector<double> values = axis.values;
    std::sort(values.begin(), values.end());

    SweepResult result;
    result.axis = axis.name;
    result.points.resize(values.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            SweepPoint& pt = result.points[i];
            pt.parameter = values[i];
            try {
                const RunConfig cfg = apply_axis_value(base, axis.name, values[i]);
                const PairOutcome pair = run_pair(cfg, 1);
                pt.T_ref_final = pair.reference_final;
                pt.T_pert_final = pair.perturbed_final;
                pt.report = pair.report;
                switch (pair.detection.status) {
                case DetectionResult::Status::window: pt.status = "ok"; break;
                case DetectionResult::Status::no_deviation: pt.status = "no_deviation"; break;
                case DetectionResult::Status::window_open: pt.status = "window_open"; break;
                }
            } catch (const std::exception& e) {
                pt.status = std::string("error: ") + e.what();
            }
        }
    };

    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

} // namespace sar
