#ifndef SAR_PROPAGATOR_HPP
#define SAR_PROPAGATOR_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sar/grid.hpp"
#include "sar/potential.hpp"
#include "sar/units.hpp"

namespace sar {

/// Time stepping parameters. dt is nominal: the step sequence is locally
/// adjusted (by < 1%) so that a ramp's t_p and t_p + epsilon land exactly on
/// step boundaries.
struct PropagatorConfig {
    double dt = 0.0;
    double t_end = 0.0;
    std::size_t store_every = 8;

    void validate() const;
};

/// Step boundaries 0 = times[0] < ... < times[steps()] = t_end.
struct TimeGrid {
    std::vector<double> times;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }

    static TimeGrid uniform(double t_end, std::size_t n_steps);
    /// Piecewise-uniform grid whose segment boundaries coincide with the
    /// ramp interval; each segment keeps a step within 1% of dt_nominal.
    static TimeGrid aligned(double t_end, double dt_nominal,
                            std::optional<std::pair<double, double>> ramp);
};

/// Callback sampled at step 0, every store_every-th step, and the final step.
class Observer {
public:
    virtual ~Observer() = default;
    virtual void sample(std::size_t step, double t, const WaveState& state) = 0;
};

struct RunResult {
    WaveState final_state;
    std::size_t steps = 0;
    double max_norm_drift = 0.0; // max |norm - 1| over sampled steps
};

/// One Crank-Nicolson step of size dt starting at state.time:
///   (I + i dt/(2 hbar) H) psi_new = (I - i dt/(2 hbar) H) psi_old,
/// H = -hbar^2/(2m) D2 + V(., t + dt/2), Dirichlet endpoints. The
/// tridiagonal system is solved by forward elimination / back substitution.
WaveState step(const WaveState& state, const BarrierSchedule& schedule,
               const SpatialGrid& grid, const UnitSystem& units, double dt);

/// Iterate step over the given time grid, invoking every observer at the
/// sampled steps. Deterministic: identical inputs produce bit-identical
/// output. Throws DivergenceError if amplitudes become non-finite.
RunResult propagate(const WaveState& initial, const BarrierSchedule& schedule,
                    const SpatialGrid& grid, const UnitSystem& units,
                    const TimeGrid& time_grid, std::size_t store_every,
                    std::span<Observer* const> observers);

/// Convenience overload: builds the ramp-aligned TimeGrid from the config
/// and the schedule's own ramp interval.
RunResult propagate(const WaveState& initial, const BarrierSchedule& schedule,
                    const SpatialGrid& grid, const UnitSystem& units,
                    const PropagatorConfig& config,
                    std::span<Observer* const> observers);

/// Windowed wavefunction history of a run, stored every store_every steps;
/// the record a trajectory integrator works from.
struct SnapshotRecord {
    std::size_t j_lo = 0; // global node range [j_lo, j_hi], inclusive
    std::size_t j_hi = 0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double dx = 0.0;
    double hbar = 1.0;
    double mass = 1.0;
    std::vector<double> times;
    std::vector<std::vector<std::complex<double>>> frames;
    std::vector<double> frame_max_abs;

    std::size_t frame_count() const { return frames.size(); }
    std::size_t window_size() const { return j_hi - j_lo + 1; }
    /// Amplitude at frame k, local window index jw.
    std::complex<double> amp(std::size_t k, std::size_t jw) const { return frames[k][jw]; }
    double x_of(std::size_t jw) const { return x_lo + dx * static_cast<double>(jw); }
};

/// Observer that accumulates a SnapshotRecord over [window_lo, window_hi]
/// (clipped to the grid; pass the full grid range to keep everything).
class SnapshotObserver : public Observer {
public:
    SnapshotObserver(const SpatialGrid& grid, const UnitSystem& units,
                     double window_lo, double window_hi);
    void sample(std::size_t step, double t, const WaveState& state) override;
    SnapshotRecord take() { return std::move(record_); }
    const SnapshotRecord& record() const { return record_; }

private:
    SnapshotRecord record_;
};

} // namespace sar

#endif
