#include "sar/run_config.hpp"

#include <cmath>

#include "sar/errors.hpp"

namespace sar {

void RunConfig::validate() const {
    if (!(grid.x_min < grid.x_max) || grid.n_points < 3) {
        throw ConfigError("config: grid requires x_min < x_max and n_points >= 3");
    }
    if (!(packet.sigma0 > 0.0)) throw ConfigError("config: packet.sigma0 must be positive");
    if (!std::isfinite(packet.alpha)) throw ConfigError("config: packet.alpha must be finite");
    try {
        schedule.validate();
    } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        propagation.validate();
    } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (analysis.x_d < grid.x_min || analysis.x_d > grid.x_max) {
        throw ConfigError("config: analysis.x_d must lie inside the grid");
    }
    if (!(analysis.delta_dev > 0.0)) throw ConfigError("config: analysis.delta_dev must be positive");
    if (propagation.dt * std::abs(schedule.v0) / units.hbar >= 0.5) {
        throw ConfigError("config: dt*|v0|/hbar violates the 0.5 phase-per-step bound");
    }
    for (const double p : analysis.trajectory_points) {
        if (p < grid.x_min || p > grid.x_max) {
            throw ConfigError("config: analysis.trajectory_points must lie inside the grid");
        }
    }
}

RunConfig default_config(BarrierSchedule::Kind kind, const UnitOverrides& overrides) {
    RunConfig cfg;
    cfg.units = make_units(overrides);
    const UnitSystem& u = cfg.units;

    cfg.grid.x_min = -500.0 * u.sigma0;
    cfg.grid.x_max = 500.0 * u.sigma0;
    cfg.grid.n_points = 131072;

    cfg.packet.kind = PacketSpec::Kind::gaussian;
    cfg.packet.x0 = -6.0 * u.sigma1;
    cfg.packet.sigma0 = u.sigma0;
    cfg.packet.p0 = u.p0;
    cfg.packet.alpha = 0.0;

    const double t_p = 7.14 * u.t0;
    const double eps = 0.27 * u.t0;
    switch (kind) {
    case BarrierSchedule::Kind::static_rect:
        cfg.schedule = BarrierSchedule::static_rect(1.5 * u.E0, 0.0, 0.08 * u.sigma1);
        break;
    case BarrierSchedule::Kind::linear_width:
        cfg.schedule = BarrierSchedule::linear_width(1.5 * u.E0, 0.08 * u.sigma1,
                                                     0.48 * u.sigma1, t_p, eps);
        break;
    case BarrierSchedule::Kind::height_ramp:
        cfg.schedule = BarrierSchedule::height_ramp(2.0 * u.E0, 0.32 * u.sigma1,
                                                    0.1, 0.9, t_p, eps);
        break;
    case BarrierSchedule::Kind::double_height_ramp:
        cfg.schedule = BarrierSchedule::double_height_ramp(2.0 * u.E0, 0.32 * u.sigma1,
                                                           0.5 * u.sigma1, 0.1, 0.9, t_p, eps);
        break;
    }

    cfg.propagation.t_end = 40.0 * u.t0;
    cfg.propagation.dt = cfg.propagation.t_end / 8192.0;
    cfg.propagation.store_every = 8;

    cfg.analysis.x_d = 10.0 * u.sigma1;
    cfg.analysis.delta_dev = 1e-3;
    cfg.analysis.trajectory_count = 64;

    return cfg;
}

} // namespace sar
