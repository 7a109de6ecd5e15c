#include "sar/propagator.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) || defined(__i386__)
#include <xmmintrin.h>
#endif

#include "sar/errors.hpp"

namespace sar {

void PropagatorConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidParameterError("propagator: dt must be positive");
    if (!(t_end > 0.0)) throw InvalidParameterError("propagator: t_end must be positive");
    if (store_every == 0) throw InvalidParameterError("propagator: store_every must be >= 1");
}

TimeGrid TimeGrid::uniform(double t_end, std::size_t n_steps) {
    if (!(t_end > 0.0) || n_steps == 0) throw InvalidParameterError("TimeGrid: bad parameters");
    TimeGrid tg;
    tg.times.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        tg.times[k] = t_end * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    return tg;
}

TimeGrid TimeGrid::aligned(double t_end, double dt_nominal,
                           std::optional<std::pair<double, double>> ramp) {
    if (!(t_end > 0.0) || !(dt_nominal > 0.0)) throw InvalidParameterError("TimeGrid: bad parameters");
    const auto n_nominal = static_cast<std::size_t>(std::llround(t_end / dt_nominal));
    if (!ramp || ramp->first >= t_end) {
        return uniform(t_end, std::max<std::size_t>(1, n_nominal));
    }
    const double a = std::max(0.0, ramp->first);
    const double b = std::min(ramp->second, t_end);
    TimeGrid tg;
    tg.times.push_back(0.0);
    const double bounds[3][2] = {{0.0, a}, {a, b}, {b, t_end}};
    for (const auto& seg : bounds) {
        const double lo = seg[0], hi = seg[1];
        if (hi <= lo) continue;
        const auto n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround((hi - lo) / dt_nominal)));
        for (std::size_t k = 1; k <= n; ++k) {
            tg.times.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
        }
    }
    return tg;
}

namespace {

/// Scoped flush-to-zero: the box is far wider than the packet, so most of
/// the grid carries subnormal amplitudes whose microcoded arithmetic slows
/// the sweeps by two orders of magnitude. Flushing them to zero is far
/// below every tolerance in use. Per-thread; restored on exit.
class DenormalGuard {
public:
#if defined(__x86_64__) || defined(__i386__)
    DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
    ~DenormalGuard() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#endif
};

/// Tridiagonal Crank-Nicolson engine over the interior nodes. The matrix
/// A = I + i mu H has constant off-diagonal `off` and diagonal rebuilt
/// whenever the potential profile or the step size changes; the forward
/// elimination factors are cached between rebuilds.
class CrankNicolson {
public:
    CrankNicolson(const BarrierSchedule& schedule, const SpatialGrid& grid,
                  const UnitSystem& units)
        : schedule_(schedule), grid_(grid), units_(units), m_(grid.n_points - 2),
          v_(grid.n_points), diag_(m_), cfac_(m_), inv_m_(m_), work_(m_) {}

    void advance(WaveState& state, double dt) {
        const double t_mid = state.time + 0.5 * dt;
        refresh(dt, t_mid);
        auto& psi = state.amplitudes;
        // rhs_i = (2I - A) psi fused with the forward elimination sweep
        work_[0] = ((2.0 - diag_[0]) * psi[1] - off_ * (psi[0] + psi[2])) * inv_m_[0];
        for (std::size_t i = 1; i < m_; ++i) {
            const std::complex<double> rhs =
                (2.0 - diag_[i]) * psi[i + 1] - off_ * (psi[i] + psi[i + 2]);
            work_[i] = (rhs - off_ * work_[i - 1]) * inv_m_[i];
        }
        // back substitution straight into the state
        psi[m_] = work_[m_ - 1];
        for (std::size_t i = m_ - 1; i-- > 0;) {
            psi[i + 1] = work_[i] - cfac_[i] * psi[i + 2];
        }
        psi.front() = 0.0;
        psi.back() = 0.0;
        state.time += dt;
    }

private:
    void refresh(double dt, double t_mid) {
        const auto profile = schedule_.profile(t_mid);
        if (have_factors_ && dt == dt_cached_ && same_profile(profile)) return;
        sample_on_grid(schedule_, grid_, t_mid, std::span<double>(v_));
        const double dx = grid_.dx();
        const double kinetic = units_.hbar * units_.hbar / (2.0 * units_.mass * dx * dx);
        const double mu = dt / (2.0 * units_.hbar);
        const std::complex<double> imu{0.0, mu};
        off_ = -imu * kinetic;
        for (std::size_t i = 0; i < m_; ++i) {
            diag_[i] = 1.0 + imu * (2.0 * kinetic + v_[i + 1]);
        }
        // Thomas factorization: m_0 = b_0, m_i = b_i - off * (off / m_{i-1})
        std::complex<double> mi = diag_[0];
        inv_m_[0] = 1.0 / mi;
        cfac_[0] = off_ * inv_m_[0];
        for (std::size_t i = 1; i < m_; ++i) {
            mi = diag_[i] - off_ * cfac_[i - 1];
            inv_m_[i] = 1.0 / mi;
            cfac_[i] = off_ * inv_m_[i];
        }
        dt_cached_ = dt;
        profile_cached_ = profile;
        have_factors_ = true;
    }

    bool same_profile(const BarrierSchedule::Profile& p) const {
        if (p.count != profile_cached_.count || p.height != profile_cached_.height) return false;
        for (std::size_t i = 0; i < p.count; ++i) {
            if (p.intervals[i] != profile_cached_.intervals[i]) return false;
        }
        return true;
    }

    const BarrierSchedule& schedule_;
    const SpatialGrid& grid_;
    const UnitSystem& units_;
    std::size_t m_;
    std::vector<double> v_;
    std::vector<std::complex<double>> diag_, cfac_, inv_m_, work_;
    std::complex<double> off_{0.0, 0.0};
    double dt_cached_ = -1.0;
    BarrierSchedule::Profile profile_cached_{};
    bool have_factors_ = false;
};

double max_height(const BarrierSchedule& schedule) { return std::abs(schedule.v0); }

} // namespace

WaveState step(const WaveState& state, const BarrierSchedule& schedule,
               const SpatialGrid& grid, const UnitSystem& units, double dt) {
    if (state.amplitudes.size() != grid.n_points) throw ShapeError("step: state/grid mismatch");
    if (!(dt > 0.0)) throw InvalidParameterError("step: dt must be positive");
    WaveState next = state;
    CrankNicolson engine(schedule, grid, units);
    engine.advance(next, dt);
    return next;
}

RunResult propagate(const WaveState& initial, const BarrierSchedule& schedule,
                    const SpatialGrid& grid, const UnitSystem& units,
                    const TimeGrid& time_grid, std::size_t store_every,
                    std::span<Observer* const> observers) {
    if (initial.amplitudes.size() != grid.n_points) {
        throw ShapeError("propagate: state/grid mismatch");
    }
    if (time_grid.steps() == 0) throw InvalidParameterError("propagate: empty time grid");
    if (store_every == 0) throw InvalidParameterError("propagate: store_every must be >= 1");
    schedule.validate();
    {
        // phase-per-step sanity bound dt*max|V|/hbar < 1/2
        double dt_max = 0.0;
        for (std::size_t k = 0; k < time_grid.steps(); ++k) {
            dt_max = std::max(dt_max, time_grid.times[k + 1] - time_grid.times[k]);
        }
        if (dt_max * max_height(schedule) / units.hbar >= 0.5) {
            throw InvalidParameterError("propagate: dt*max|V|/hbar exceeds the 0.5 phase bound");
        }
    }

    RunResult result;
    result.final_state = initial;
    result.final_state.time = time_grid.times.front();
    result.final_state.amplitudes.front() = 0.0;
    result.final_state.amplitudes.back() = 0.0;

    const DenormalGuard ftz;
    CrankNicolson engine(schedule, grid, units);
    const std::size_t n_steps = time_grid.steps();

    auto emit = [&](std::size_t s) {
        const double n = norm(result.final_state, grid);
        if (!std::isfinite(n)) throw DivergenceError("propagate: non-finite amplitudes");
        result.max_norm_drift = std::max(result.max_norm_drift, std::abs(n - 1.0));
        for (Observer* obs : observers) obs->sample(s, result.final_state.time, result.final_state);
    };

    emit(0);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double dt = time_grid.times[s + 1] - time_grid.times[s];
        engine.advance(result.final_state, dt);
        // keep the clock exact at step boundaries
        result.final_state.time = time_grid.times[s + 1];
        if ((s + 1) % store_every == 0 || s + 1 == n_steps) emit(s + 1);
    }
    result.steps = n_steps;
    return result;
}

RunResult propagate(const WaveState& initial, const BarrierSchedule& schedule,
                    const SpatialGrid& grid, const UnitSystem& units,
                    const PropagatorConfig& config,
                    std::span<Observer* const> observers) {
    config.validate();
    const auto tg = TimeGrid::aligned(config.t_end, config.dt, schedule.ramp_interval());
    return propagate(initial, schedule, grid, units, tg, config.store_every, observers);
}

SnapshotObserver::SnapshotObserver(const SpatialGrid& grid, const UnitSystem& units,
                                   double window_lo, double window_hi) {
    if (!(window_lo < window_hi)) throw InvalidParameterError("SnapshotObserver: empty window");
    record_.j_lo = grid.index_at_or_below(std::max(window_lo, grid.x_min));
    const double hi = std::min(window_hi, grid.x_max);
    std::size_t j_hi = grid.index_at_or_below(hi);
    if (j_hi + 1 < grid.n_points && grid.x(j_hi) < hi) ++j_hi; // cover the window end
    record_.j_hi = j_hi;
    if (record_.j_hi < record_.j_lo + 2) throw InvalidParameterError("SnapshotObserver: window too narrow");
    record_.x_lo = grid.x(record_.j_lo);
    record_.x_hi = grid.x(record_.j_hi);
    record_.dx = grid.dx();
    record_.hbar = units.hbar;
    record_.mass = units.mass;
}

void SnapshotObserver::sample(std::size_t /*step*/, double t, const WaveState& state) {
    record_.times.push_back(t);
    auto first = state.amplitudes.begin() + static_cast<std::ptrdiff_t>(record_.j_lo);
    auto last = state.amplitudes.begin() + static_cast<std::ptrdiff_t>(record_.j_hi) + 1;
    record_.frames.emplace_back(first, last);
    double mx = 0.0;
    for (auto it = first; it != last; ++it) mx = std::max(mx, std::abs(*it));
    record_.frame_max_abs.push_back(mx);
}

} // namespace sar
