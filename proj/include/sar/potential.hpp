#ifndef SAR_POTENTIAL_HPP
#define SAR_POTENTIAL_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sar/grid.hpp"

namespace sar {

/// Time-dependent rectangular barrier description.
///
/// Kinds:
///   static_rect        fixed barrier [left_edge, left_edge + width]
///   linear_width       barrier [0, w(t)], width w_i -> w_f linearly over
///                      (t_p, t_p + epsilon]
///   height_ramp        barrier [-width/2, +width/2], height 0 -> v0 with
///                      factor a*s + b*s^2, s = (t - t_p)/epsilon, a + b = 1
///   double_height_ramp two such barriers of equal width separated by a gap
///                      `separation`, centered about the origin, ramped
///                      simultaneously with identical (a, b, t_p, epsilon)
struct BarrierSchedule {
    enum class Kind { static_rect, linear_width, height_ramp, double_height_ramp };

    Kind kind = Kind::static_rect;
    double v0 = 0.0;
    double left_edge = 0.0; // static_rect only
    double width = 0.0;     // static_rect and height ramps
    double w_i = 0.0;       // linear_width
    double w_f = 0.0;       // linear_width
    double ramp_a = 0.0;    // height ramps
    double ramp_b = 0.0;    // height ramps
    double separation = 0.0; // double_height_ramp gap
    double t_p = 0.0;
    double epsilon = 0.0;

    static BarrierSchedule free_space();
    static BarrierSchedule static_rect(double v0, double left_edge, double width);
    static BarrierSchedule linear_width(double v0, double w_i, double w_f,
                                        double t_p, double epsilon);
    static BarrierSchedule height_ramp(double v0, double width, double a, double b,
                                       double t_p, double epsilon);
    static BarrierSchedule double_height_ramp(double v0, double width, double separation,
                                              double a, double b, double t_p, double epsilon);

    /// Throws InvalidParameterError when a constraint is violated.
    void validate() const;

    bool is_time_dependent() const;
    /// Ramp interval (t_p, t_p + epsilon) for time-dependent kinds.
    std::optional<std::pair<double, double>> ramp_interval() const;

    /// Width of the linear_width barrier at time t.
    double width_at(double t) const;
    /// Height factor in [0, 1] of the ramp kinds at time t.
    double height_factor(double t) const;

    /// Occupied intervals [L, R] at time t (1 for single kinds, 2 for the
    /// double barrier), plus the common height prefactor v0 * factor(t).
    struct Profile {
        std::array<std::pair<double, double>, 2> intervals;
        std::size_t count = 0;
        double height = 0.0;
    };
    Profile profile(double t) const;
};

/// Pointwise V(x, t) with the step convention theta(0) = 1 (a barrier
/// includes both its edges).
double potential_at(const BarrierSchedule& schedule, double x, double t);

/// Per-node potential with fractional-cell weighting at edges that fall
/// between nodes: v_j = height * min(1, |[L,R] ∩ [x_j - dx, x_j + dx]| / dx).
/// Nodes at an exact edge coordinate get the full height (theta(0) = 1);
/// the outside neighbor of a straddled cell gets the covered fraction.
void sample_on_grid(const BarrierSchedule& schedule, const SpatialGrid& grid, double t,
                    std::span<double> out);
std::vector<double> sample_on_grid(const BarrierSchedule& schedule, const SpatialGrid& grid,
                                   double t);

/// Value sample_on_grid assigns to a node at x_node for cell size dx.
double cell_weighted_potential(const BarrierSchedule& schedule, double x_node, double dx,
                               double t);

/// Analytic dV/dt of the ramp kinds: v0 * (a/eps + 2(1-a)/eps^2 (t - t_p))
/// inside the ramp, zero outside. Diagnostic only.
double height_rate(const BarrierSchedule& schedule, double t);

} // namespace sar

#endif
