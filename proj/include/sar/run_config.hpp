#ifndef SAR_RUN_CONFIG_HPP
#define SAR_RUN_CONFIG_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "sar/grid.hpp"
#include "sar/potential.hpp"
#include "sar/propagator.hpp"
#include "sar/units.hpp"
#include "sar/wavepacket.hpp"

namespace sar {

struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_points = 0;

    SpatialGrid build() const { return SpatialGrid(x_min, x_max, n_points); }
};

struct AnalysisSpec {
    double x_d = 0.0;
    double delta_dev = 1e-3;
    std::size_t trajectory_count = 64;
    std::vector<double> trajectory_points; // extra start positions
    std::string sweep_axis;                // epsilon|w_f|x_d|b|separation|alpha
    std::vector<double> sweep_values;      // in the axis reporting unit
};

struct OutputSpec {
    std::string directory = "out";
    bool snapshots = false;
    std::size_t snapshot_stride = 64;
};

/// Fully resolved run description. All values are in natural units
/// (hbar = 1); defaults reproduce the linearly widening barrier scenario.
struct RunConfig {
    UnitSystem units;
    GridSpec grid;
    PacketSpec packet;
    BarrierSchedule schedule;
    PropagatorConfig propagation;
    AnalysisSpec analysis;
    OutputSpec output;

    /// Cross-field validation; throws ConfigError naming the violated
    /// constraint.
    void validate() const;
};

/// Standard-scenario defaults for the given schedule kind:
///   linear_width       V0 = 1.5 E0, w_i = 0.08 s1, w_f = 0.48 s1
///   height ramps       V0 = 2 E0, width = 0.32 s1, a = 0.1, b = 0.9
/// with x0 = -6 s1, p0 = 50 pi, x_d = 10 s1, perturbation in
/// [7.14 t0, 7.41 t0], box [-500 s0, 500 s0] and horizon 40 t0.
RunConfig default_config(BarrierSchedule::Kind kind = BarrierSchedule::Kind::linear_width,
                         const UnitOverrides& units = {});

} // namespace sar

#endif
