#include "sar/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sar/errors.hpp"
#include "sar/observables.hpp"
#include "sar/potential.hpp"

namespace sar {

double critical_initial_position(double T_infinity, double x0, double sigma0) {
    if (!(T_infinity > 0.0) || !(T_infinity < 1.0)) {
        throw DomainError("critical_initial_position: T_infinity must lie in (0, 1)");
    }
    const auto residual = [&](double xc) {
        return 0.5 * std::erfc((xc - x0) / (std::sqrt(2.0) * sigma0)) - T_infinity;
    };
    double lo = x0 - 40.0 * sigma0;
    double hi = x0 + 40.0 * sigma0;
    // residual is strictly decreasing in xc
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (std::abs(r) < 1e-12 || hi - lo < 1e-15 * sigma0) return mid;
        if (r > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

/// Velocity lookup over a SnapshotRecord window. Node velocities come from
/// psi-ratios; queries interpolate linearly between nodes and flag masked
/// (near-node) encounters.
class VelocityField {
public:
    explicit VelocityField(const SnapshotRecord& rec) : rec_(rec) {}

    /// v at (x, frame k); sets `masked` when an involved node is below the
    /// amplitude floor.
    double at(double x, std::size_t k, bool& masked) const {
        const std::size_t w = rec_.window_size();
        // nodes 1 .. w-2 have central differences; clamp the query inside
        double xq = std::clamp(x, rec_.x_of(1), rec_.x_of(w - 2));
        std::size_t j = static_cast<std::size_t>((xq - rec_.x_lo) / rec_.dx);
        j = std::clamp<std::size_t>(j, 1, w - 3);
        const double weight = std::clamp((xq - rec_.x_of(j)) / rec_.dx, 0.0, 1.0);
        const double va = node_velocity(k, j, masked);
        const double vb = node_velocity(k, j + 1, masked);
        return (1.0 - weight) * va + weight * vb;
    }

    double at(double x, std::size_t k, double theta, bool& masked) const {
        if (theta <= 0.0) return at(x, k, masked);
        if (theta >= 1.0) return at(x, k + 1, masked);
        return (1.0 - theta) * at(x, k, masked) + theta * at(x, k + 1, masked);
    }

private:
    double node_velocity(std::size_t k, std::size_t j, bool& masked) const {
        const auto psi = rec_.amp(k, j);
        if (std::abs(psi) < kAmplitudeFloor * rec_.frame_max_abs[k]) {
            masked = true;
            return 0.0;
        }
        const auto d1 = (rec_.amp(k, j + 1) - rec_.amp(k, j - 1)) / (2.0 * rec_.dx);
        return rec_.hbar / rec_.mass * (d1 / psi).imag();
    }

    const SnapshotRecord& rec_;
};

} // namespace

Trajectory integrate_trajectory(double start_position, const SnapshotRecord& snapshots,
                                const SpatialGrid& grid, const UnitSystem& units, double x_d) {
    if (snapshots.frame_count() < 2) {
        throw InvalidParameterError("integrate_trajectory: record needs at least two frames");
    }
    if (start_position < snapshots.x_lo || start_position > snapshots.x_hi) {
        throw DomainError("integrate_trajectory: start outside the stored window");
    }

    const VelocityField field(snapshots);
    const double clamp_lo = std::max(grid.x_min, snapshots.x_lo);
    const double clamp_hi = std::min(grid.x_max, snapshots.x_hi);

    Trajectory traj;
    traj.initial_position = start_position;
    traj.times.reserve(snapshots.frame_count());
    traj.positions.reserve(snapshots.frame_count());
    traj.times.push_back(snapshots.times.front());
    traj.positions.push_back(start_position);

    // One RK4 stage over [theta0, theta1] of the inter-frame interval.
    // The velocity field has poles at wavefunction nodes; a step whose
    // displacement would jump several cells is bisected (deterministically)
    // so trajectories brake at fringes instead of being flung across them.
    const double max_move = 4.0 * snapshots.dx;
    std::function<bool(double&, std::size_t, double, double, double, int)> advance =
        [&](double& x, std::size_t k, double th0, double th1, double h_full, int depth) {
            const double h = (th1 - th0) * h_full;
            bool masked = false;
            const double k1 = field.at(x, k, th0, masked);
            if (std::abs(k1) * h > max_move && depth < 12) {
                const double mid = 0.5 * (th0 + th1);
                return advance(x, k, th0, mid, h_full, depth + 1) &&
                       advance(x, k, mid, th1, h_full, depth + 1);
            }
            const double th_mid = 0.5 * (th0 + th1);
            const double k2 = field.at(x + 0.5 * h * k1, k, th_mid, masked);
            const double k3 = field.at(x + 0.5 * h * k2, k, th_mid, masked);
            const double k4 = field.at(x + h * k3, k, th1, masked);
            if (masked) return false;
            const double move = h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (std::abs(move) > max_move && depth < 12) {
                const double mid = 0.5 * (th0 + th1);
                return advance(x, k, th0, mid, h_full, depth + 1) &&
                       advance(x, k, mid, th1, h_full, depth + 1);
            }
            x += move;
            x = std::clamp(x, clamp_lo, clamp_hi);
            return true;
        };

    double x = start_position;
    for (std::size_t k = 0; k + 1 < snapshots.frame_count(); ++k) {
        const double h = snapshots.times[k + 1] - snapshots.times[k];
        if (!advance(x, k, 0.0, 1.0, h, 0)) {
            traj.degenerate = true;
            break;
        }
        traj.times.push_back(snapshots.times[k + 1]);
        traj.positions.push_back(x);
    }

    const double final_x = traj.positions.back();
    if (std::abs(final_x - x_d) <= units.sigma1 || traj.degenerate) {
        traj.classification = Trajectory::Classification::undecided;
    } else if (final_x > x_d) {
        traj.classification = Trajectory::Classification::transmitted;
    } else {
        traj.classification = Trajectory::Classification::reflected;
    }
    return traj;
}

std::vector<double> ensemble_positions(std::size_t n, const PacketSpec& packet,
                                       const SpatialGrid& grid, const UnitSystem& units) {
    if (n == 0) throw InvalidParameterError("ensemble_positions: n must be >= 1");
    const WaveState psi0 = build_packet(packet, grid, units);
    const std::size_t m = grid.n_points;
    const double dx = grid.dx();

    std::vector<double> density(m);
    for (std::size_t j = 0; j < m; ++j) density[j] = std::norm(psi0.amplitudes[j]);
    std::vector<double> cumulative(m, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        cumulative[j] = cumulative[j - 1] + 0.5 * (density[j - 1] + density[j]) * dx;
    }
    const double total = cumulative.back();

    // F(x): trapezoid cumulative with the linear-density fractional cell
    const auto cdf = [&](double x) {
        const std::size_t j = grid.index_at_or_below(x);
        double c = cumulative[j];
        const double xj = grid.x(j);
        if (x > xj && j + 1 < m) {
            const double w = (x - xj) / dx;
            const double f_at = density[j] + (density[j + 1] - density[j]) * w;
            c += 0.5 * (density[j] + f_at) * (x - xj);
        }
        return c / total;
    };

    std::vector<double> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double lo = grid.x_min;
        double hi = grid.x_max;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double r = cdf(mid) - q;
            if (std::abs(r) < 1e-12 || hi - lo < 1e-14 * (grid.x_max - grid.x_min)) break;
            if (r < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        points.push_back(0.5 * (lo + hi));
    }
    return points;
}

ForceResidualSeries quantum_force_residual(const Trajectory& trajectory,
                                           const SnapshotRecord& snapshots,
                                           const BarrierSchedule& schedule,
                                           const SpatialGrid& grid, const UnitSystem& units) {
    const std::size_t K = trajectory.positions.size();
    if (K < 3) throw InvalidParameterError("quantum_force_residual: trajectory too short");
    if (grid.dx() != snapshots.dx) {
        throw InvalidParameterError("quantum_force_residual: record was taken on a different grid");
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double dx = snapshots.dx;
    const std::size_t w = snapshots.window_size();
    const double qfac = -units.hbar * units.hbar / (2.0 * units.mass);

    // Q at (frame k, window node j); NaN when masked
    const auto q_node = [&](std::size_t k, std::size_t j) {
        const double r = std::abs(snapshots.amp(k, j));
        if (r < kAmplitudeFloor * snapshots.frame_max_abs[k]) return nan;
        const double d2r = (std::abs(snapshots.amp(k, j + 1)) - 2.0 * r +
                            std::abs(snapshots.amp(k, j - 1))) / (dx * dx);
        return qfac * d2r / r;
    };
    // d(V+Q)/dx at (x, frame k) by central differences + linear interpolation
    const auto grad_vq = [&](double x, std::size_t k) {
        double xq = std::clamp(x, snapshots.x_of(2), snapshots.x_of(w - 3));
        std::size_t j = static_cast<std::size_t>((xq - snapshots.x_lo) / dx);
        j = std::clamp<std::size_t>(j, 2, w - 4);
        const double t = snapshots.times[k];
        auto grad_at = [&](std::size_t jj) {
            const double qp = q_node(k, jj + 1);
            const double qm = q_node(k, jj - 1);
            const double vp = cell_weighted_potential(schedule, snapshots.x_of(jj + 1), dx, t);
            const double vm = cell_weighted_potential(schedule, snapshots.x_of(jj - 1), dx, t);
            return ((qp + vp) - (qm + vm)) / (2.0 * dx);
        };
        const double weight = std::clamp((xq - snapshots.x_of(j)) / dx, 0.0, 1.0);
        return (1.0 - weight) * grad_at(j) + weight * grad_at(j + 1);
    };

    // the residual walks the record frame-by-frame; the trajectory must
    // come from this same record
    for (std::size_t i = 0; i < K; ++i) {
        if (trajectory.times[i] != snapshots.times[i]) {
            throw InvalidParameterError("quantum_force_residual: trajectory/record time mismatch");
        }
    }

    ForceResidualSeries out;
    out.times.reserve(K - 2);
    out.values.reserve(K - 2);
    for (std::size_t i = 1; i + 1 < K; ++i) {
        const double h0 = trajectory.times[i] - trajectory.times[i - 1];
        const double h1 = trajectory.times[i + 1] - trajectory.times[i];
        const double acc = 2.0 * ((trajectory.positions[i + 1] - trajectory.positions[i]) / h1 -
                                  (trajectory.positions[i] - trajectory.positions[i - 1]) / h0) /
                           (h0 + h1);
        // locate the stored frame matching this trajectory time
        const double g = grad_vq(trajectory.positions[i], i);
        out.times.push_back(trajectory.times[i]);
        out.values.push_back(units.mass * acc + g);
    }
    return out;
}

} // namespace sar
