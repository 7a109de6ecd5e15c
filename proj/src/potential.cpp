#include "sar/potential.hpp"

#include <algorithm>
#include <cmath>

#include "sar/errors.hpp"

namespace sar {

BarrierSchedule BarrierSchedule::free_space() {
    BarrierSchedule s;
    s.kind = Kind::static_rect;
    s.v0 = 0.0;
    s.left_edge = 0.0;
    s.width = 1.0;
    return s;
}

BarrierSchedule BarrierSchedule::static_rect(double v0, double left_edge, double width) {
    BarrierSchedule s;
    s.kind = Kind::static_rect;
    s.v0 = v0;
    s.left_edge = left_edge;
    s.width = width;
    s.validate();
    return s;
}

BarrierSchedule BarrierSchedule::linear_width(double v0, double w_i, double w_f,
                                              double t_p, double epsilon) {
    BarrierSchedule s;
    s.kind = Kind::linear_width;
    s.v0 = v0;
    s.w_i = w_i;
    s.w_f = w_f;
    s.t_p = t_p;
    s.epsilon = epsilon;
    s.validate();
    return s;
}

BarrierSchedule BarrierSchedule::height_ramp(double v0, double width, double a, double b,
                                             double t_p, double epsilon) {
    BarrierSchedule s;
    s.kind = Kind::height_ramp;
    s.v0 = v0;
    s.width = width;
    s.ramp_a = a;
    s.ramp_b = b;
    s.t_p = t_p;
    s.epsilon = epsilon;
    s.validate();
    return s;
}

BarrierSchedule BarrierSchedule::double_height_ramp(double v0, double width, double separation,
                                                    double a, double b,
                                                    double t_p, double epsilon) {
    BarrierSchedule s;
    s.kind = Kind::double_height_ramp;
    s.v0 = v0;
    s.width = width;
    s.separation = separation;
    s.ramp_a = a;
    s.ramp_b = b;
    s.t_p = t_p;
    s.epsilon = epsilon;
    s.validate();
    return s;
}

void BarrierSchedule::validate() const {
    if (!std::isfinite(v0)) throw InvalidParameterError("schedule: v0 must be finite");
    switch (kind) {
    case Kind::static_rect:
        if (!(width > 0.0)) throw InvalidParameterError("schedule: width must be positive");
        break;
    case Kind::linear_width:
        if (!(w_i > 0.0)) throw InvalidParameterError("schedule: w_i must be positive");
        if (!(w_f >= w_i)) throw InvalidParameterError("schedule: w_f must be >= w_i");
        break;
    case Kind::double_height_ramp:
        if (!(separation >= 0.0)) throw InvalidParameterError("schedule: separation must be >= 0");
        [[fallthrough]];
    case Kind::height_ramp:
        if (!(width > 0.0)) throw InvalidParameterError("schedule: width must be positive");
        if (ramp_a < 0.0 || ramp_a > 1.0 || ramp_b < 0.0 || ramp_b > 1.0) {
            throw InvalidParameterError("schedule: ramp coefficients must lie in [0, 1]");
        }
        if (std::abs(ramp_a + ramp_b - 1.0) > 1e-12) {
            throw InvalidParameterError("schedule: ramp coefficients must satisfy a + b = 1");
        }
        break;
    }
    if (is_time_dependent()) {
        if (!(epsilon > 0.0)) throw InvalidParameterError("schedule: epsilon must be positive");
        if (!(t_p >= 0.0)) throw InvalidParameterError("schedule: t_p must be >= 0");
    }
}

bool BarrierSchedule::is_time_dependent() const { return kind != Kind::static_rect; }

std::optional<std::pair<double, double>> BarrierSchedule::ramp_interval() const {
    if (!is_time_dependent()) return std::nullopt;
    return std::make_pair(t_p, t_p + epsilon);
}

double BarrierSchedule::width_at(double t) const {
    if (kind != Kind::linear_width) throw InvalidParameterError("width_at: not a linear_width schedule");
    if (t <= t_p) return w_i;
    if (t > t_p + epsilon) return w_f;
    return w_i + (w_f - w_i) * (t - t_p) / epsilon;
}

double BarrierSchedule::height_factor(double t) const {
    if (kind != Kind::height_ramp && kind != Kind::double_height_ramp) {
        throw InvalidParameterError("height_factor: not a height-ramp schedule");
    }
    if (t <= t_p) return 0.0;
    if (t > t_p + epsilon) return 1.0;
    const double s = (t - t_p) / epsilon;
    return ramp_a * s + ramp_b * s * s;
}

BarrierSchedule::Profile BarrierSchedule::profile(double t) const {
    Profile p;
    switch (kind) {
    case Kind::static_rect:
        p.intervals[0] = {left_edge, left_edge + width};
        p.count = 1;
        p.height = v0;
        break;
    case Kind::linear_width:
        p.intervals[0] = {0.0, width_at(t)};
        p.count = 1;
        p.height = v0;
        break;
    case Kind::height_ramp:
        p.intervals[0] = {-0.5 * width, 0.5 * width};
        p.count = 1;
        p.height = v0 * height_factor(t);
        break;
    case Kind::double_height_ramp:
        p.intervals[0] = {-0.5 * separation - width, -0.5 * separation};
        p.intervals[1] = {0.5 * separation, 0.5 * separation + width};
        p.count = 2;
        p.height = v0 * height_factor(t);
        break;
    }
    return p;
}

double potential_at(const BarrierSchedule& schedule, double x, double t) {
    const auto p = schedule.profile(t);
    for (std::size_t i = 0; i < p.count; ++i) {
        if (x >= p.intervals[i].first && x <= p.intervals[i].second) return p.height;
    }
    return 0.0;
}

namespace {

double cell_weight(const BarrierSchedule::Profile& p, double x_node, double dx) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.count; ++i) {
        const double lo = std::max(p.intervals[i].first, x_node - dx);
        const double hi = std::min(p.intervals[i].second, x_node + dx);
        if (hi <= lo) continue;
        v += p.height * std::min(1.0, (hi - lo) / dx);
    }
    // overlapping coverage of the two ramped barriers never exceeds v0*factor
    if (p.count == 2) {
        v = p.height > 0.0 ? std::min(v, p.height) : std::max(v, p.height);
    }
    return v;
}

} // namespace

double cell_weighted_potential(const BarrierSchedule& schedule, double x_node, double dx,
                               double t) {
    return cell_weight(schedule.profile(t), x_node, dx);
}

void sample_on_grid(const BarrierSchedule& schedule, const SpatialGrid& grid, double t,
                    std::span<double> out) {
    if (out.size() != grid.n_points) throw ShapeError("sample_on_grid: output length mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const auto p = schedule.profile(t);
    if (p.height == 0.0) return;
    const double dx = grid.dx();
    for (std::size_t i = 0; i < p.count; ++i) {
        const auto [L, R] = p.intervals[i];
        // only nodes with x_j in (L - dx, R + dx) can see the barrier
        const std::size_t j_lo = grid.index_at_or_below(std::max(L - dx, grid.x_min));
        const std::size_t j_hi = grid.index_at_or_below(std::min(R + dx, grid.x_max));
        for (std::size_t j = j_lo; j <= j_hi; ++j) out[j] = cell_weight(p, grid.x(j), dx);
    }
}

std::vector<double> sample_on_grid(const BarrierSchedule& schedule, const SpatialGrid& grid,
                                   double t) {
    std::vector<double> out(grid.n_points);
    sample_on_grid(schedule, grid, t, std::span<double>(out));
    return out;
}

double height_rate(const BarrierSchedule& schedule, double t) {
    if (schedule.kind != BarrierSchedule::Kind::height_ramp &&
        schedule.kind != BarrierSchedule::Kind::double_height_ramp) {
        throw InvalidParameterError("height_rate: defined for height-ramp schedules only");
    }
    if (t <= schedule.t_p || t > schedule.t_p + schedule.epsilon) return 0.0;
    const double eps = schedule.epsilon;
    const double a = schedule.ramp_a;
    return schedule.v0 * (a / eps + 2.0 * (1.0 - a) / (eps * eps) * (t - schedule.t_p));
}

} // namespace sar
