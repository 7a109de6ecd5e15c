#include "sar/observables.hpp"

#include <cmath>
#include <complex>

#include "sar/errors.hpp"

namespace sar {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

double transmission(const WaveState& state, const SpatialGrid& grid, double x_d) {
    return partial_norm(state, grid, x_d);
}

TransmittedExpectations transmitted_expectations(const WaveState& state, const SpatialGrid& grid,
                                                 const UnitSystem& units,
                                                 const BarrierSchedule& schedule, double x_d) {
    const double T = transmission(state, grid, x_d);
    if (T <= kTransmissionFloor) {
        throw UndefinedSectorError("transmitted_expectations: T(t) below floor");
    }
    const std::size_t n = grid.n_points;
    const double dx = grid.dx();
    const auto& psi = state.amplitudes;
    const std::vector<double> v = sample_on_grid(schedule, grid, state.time);

    std::vector<double> fh(n, 0.0), fp(n, 0.0), fx(n, 0.0);
    std::vector<double> ih(n, 0.0), ip(n, 0.0);
    const double kin = -units.hbar * units.hbar / (2.0 * units.mass);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const std::complex<double> d1 = (psi[j + 1] - psi[j - 1]) / (2.0 * dx);
        const std::complex<double> d2 = (psi[j + 1] - 2.0 * psi[j] + psi[j - 1]) / (dx * dx);
        const std::complex<double> h_el = std::conj(psi[j]) * (kin * d2 + v[j] * psi[j]);
        const std::complex<double> p_el = std::conj(psi[j]) * (-I * units.hbar * d1);
        fh[j] = h_el.real();
        ih[j] = h_el.imag();
        fp[j] = p_el.real();
        ip[j] = p_el.imag();
        fx[j] = grid.x(j) * std::norm(psi[j]);
    }
    TransmittedExpectations out;
    out.energy = integral_from(fh, grid, x_d) / T;
    out.momentum = integral_from(fp, grid, x_d) / T;
    out.position = integral_from(fx, grid, x_d) / T;
    const double imag_h = std::abs(integral_from(ih, grid, x_d) / T);
    const double imag_p = std::abs(integral_from(ip, grid, x_d) / T);
    out.imag_residual = std::max(imag_h / std::max(std::abs(out.energy), 1e-300),
                                 imag_p / std::max(std::abs(out.momentum), 1e-300));
    return out;
}

PilotFields pilot_fields(const WaveState& state, const SpatialGrid& grid, const UnitSystem& units) {
    const std::size_t n = grid.n_points;
    if (state.amplitudes.size() != n) throw ShapeError("pilot_fields: state/grid mismatch");
    const double dx = grid.dx();
    const auto& psi = state.amplitudes;

    PilotFields f;
    f.amplitude.resize(n);
    f.phase_gradient.assign(n, 0.0);
    f.quantum_potential.assign(n, 0.0);
    f.mask.assign(n, false);

    double r_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        f.amplitude[j] = std::abs(psi[j]);
        r_max = std::max(r_max, f.amplitude[j]);
    }
    const double floor = kAmplitudeFloor * r_max;
    const double qfac = -units.hbar * units.hbar / (2.0 * units.mass);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        if (f.amplitude[j] < floor) continue;
        f.mask[j] = true;
        // velocity and Q from psi-ratios; no phase unwrapping
        const std::complex<double> ratio = (psi[j + 1] - psi[j - 1]) / (2.0 * dx) / psi[j];
        f.phase_gradient[j] = units.hbar * ratio.imag();
        const double d2r = (f.amplitude[j + 1] - 2.0 * f.amplitude[j] + f.amplitude[j - 1]) / (dx * dx);
        f.quantum_potential[j] = qfac * d2r / f.amplitude[j];
    }
    return f;
}

double probability_current(const WaveState& state, const SpatialGrid& grid,
                           const UnitSystem& units, double x) {
    if (x < grid.x_min || x > grid.x_max) throw DomainError("probability_current: x outside grid");
    const auto& psi = state.amplitudes;
    const double dx = grid.dx();
    auto current_at_node = [&](std::size_t j) {
        if (j == 0 || j + 1 >= grid.n_points) return 0.0;
        const std::complex<double> d1 = (psi[j + 1] - psi[j - 1]) / (2.0 * dx);
        return units.hbar / units.mass * (std::conj(psi[j]) * d1).imag();
    };
    const std::size_t j = grid.index_at_or_below(x);
    const double xj = grid.x(j);
    if (x == xj || j + 1 >= grid.n_points) return current_at_node(j);
    const double w = (x - xj) / dx;
    return (1.0 - w) * current_at_node(j) + w * current_at_node(j + 1);
}

double total_energy(const WaveState& state, const SpatialGrid& grid, const UnitSystem& units,
                    const BarrierSchedule& schedule) {
    const std::size_t n = grid.n_points;
    const double dx = grid.dx();
    const auto& psi = state.amplitudes;
    const std::vector<double> v = sample_on_grid(schedule, grid, state.time);
    const double kin = -units.hbar * units.hbar / (2.0 * units.mass);
    std::vector<double> fh(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const std::complex<double> d2 = (psi[j + 1] - 2.0 * psi[j] + psi[j - 1]) / (dx * dx);
        fh[j] = (std::conj(psi[j]) * (kin * d2 + v[j] * psi[j])).real();
    }
    return integral_from(fh, grid, grid.x_min);
}

TransmissionObserver::TransmissionObserver(const SpatialGrid& grid, double x_d,
                                           TransmissionSeries::Label label)
    : grid_(grid) {
    if (x_d < grid.x_min || x_d > grid.x_max) {
        throw DomainError("TransmissionObserver: x_d outside grid");
    }
    series_.label = label;
    series_.x_d = x_d;
}

void TransmissionObserver::sample(std::size_t /*step*/, double t, const WaveState& state) {
    series_.times.push_back(t);
    series_.values.push_back(transmission(state, grid_, series_.x_d));
}

ExpectationObserver::ExpectationObserver(const SpatialGrid& grid, const UnitSystem& units,
                                         const BarrierSchedule& schedule, double x_d)
    : grid_(grid), units_(units), schedule_(schedule) {
    series_.x_d = x_d;
}

void ExpectationObserver::sample(std::size_t /*step*/, double t, const WaveState& state) {
    series_.times.push_back(t);
    try {
        const auto e = transmitted_expectations(state, grid_, units_, schedule_, series_.x_d);
        series_.energy.push_back(e.energy);
        series_.momentum.push_back(e.momentum);
        series_.position.push_back(e.position);
        series_.imag_residual.push_back(e.imag_residual);
    } catch (const UndefinedSectorError&) {
        const double nan = std::nan("");
        series_.energy.push_back(nan);
        series_.momentum.push_back(nan);
        series_.position.push_back(nan);
        series_.imag_residual.push_back(nan);
    }
}

double free_transmission_analytic(double t, double x0, double sigma0, double p0,
                                  const UnitSystem& units, double x_d) {
    const double spread = units.hbar * t / (2.0 * units.mass * sigma0 * sigma0);
    const double sigma_t = sigma0 * std::sqrt(1.0 + spread * spread);
    const double arg = (p0 * t / units.mass + x0 - x_d) / (std::sqrt(2.0) * sigma_t);
    return 0.5 * (1.0 + std::erf(arg));
}

TransmissionSeries free_transmission_series(const std::vector<double>& times, double x0,
                                            double sigma0, double p0, const UnitSystem& units,
                                            double x_d) {
    TransmissionSeries s;
    s.label = TransmissionSeries::Label::free_analytic;
    s.x_d = x_d;
    s.times = times;
    s.values.reserve(times.size());
    for (const double t : times) {
        s.values.push_back(free_transmission_analytic(t, x0, sigma0, p0, units, x_d));
    }
    return s;
}

} // namespace sar
