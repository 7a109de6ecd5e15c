#ifndef SAR_BOHMIAN_HPP
#define SAR_BOHMIAN_HPP

#include <cstddef>
#include <vector>

#include "sar/grid.hpp"
#include "sar/propagator.hpp"
#include "sar/units.hpp"
#include "sar/wavepacket.hpp"

namespace sar {

/// A particle path guided by dx/dt = grad S / m along a stored run.
struct Trajectory {
    enum class Classification { transmitted, reflected, undecided };

    double initial_position = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
    Classification classification = Classification::undecided;
    /// True when the path entered a masked (near-node) region and the
    /// integration stopped early; times/positions hold the partial path.
    bool degenerate = false;
};

/// Initial position of the path separating transmitted from reflected
/// trajectories, from T_infinity = (1/2) Erfc((x_c - x0)/(sqrt(2) sigma0));
/// inverted by bisection to |residual| < 1e-12.
double critical_initial_position(double T_infinity, double x0, double sigma0);

/// Integrate one trajectory by RK4 with a step equal to the snapshot
/// interval; the velocity field is linear in x on the window nodes and
/// linear in t between bracketing frames. Positions are clamped to the
/// record window. Classification at the final time compares against x_d
/// with an undecided band of +- one sigma1.
Trajectory integrate_trajectory(double start_position, const SnapshotRecord& snapshots,
                                const SpatialGrid& grid, const UnitSystem& units, double x_d);

/// Deterministic |psi0|^2 sampling: quantile points F^{-1}((i + 1/2)/n) of
/// the initial density, by bisection on the trapezoid cumulative.
std::vector<double> ensemble_positions(std::size_t n, const PacketSpec& packet,
                                       const SpatialGrid& grid, const UnitSystem& units);

/// m x'' + d/dx (V + Q) sampled along a trajectory at the interior snapshot
/// times; NaN where a masked region makes the fields unusable. A small
/// residual certifies consistency of the guidance law with the second-order
/// force law.
struct ForceResidualSeries {
    std::vector<double> times;
    std::vector<double> values;
};
ForceResidualSeries quantum_force_residual(const Trajectory& trajectory,
                                           const SnapshotRecord& snapshots,
                                           const BarrierSchedule& schedule,
                                           const SpatialGrid& grid, const UnitSystem& units);

} // namespace sar

#endif
