#ifndef SAR_OBSERVABLES_HPP
#define SAR_OBSERVABLES_HPP

#include <string>
#include <vector>

#include "sar/grid.hpp"
#include "sar/potential.hpp"
#include "sar/propagator.hpp"
#include "sar/units.hpp"

namespace sar {

/// Floors below which sector quantities are reported absent.
inline constexpr double kTransmissionFloor = 1e-6;  // on T(t)
inline constexpr double kAmplitudeFloor = 1e-8;     // relative, on R

/// Sampled T(t) at a fixed detector plane.
struct TransmissionSeries {
    enum class Label { static_ref, perturbed, free_analytic };
    Label label = Label::perturbed;
    double x_d = 0.0;
    std::vector<double> times;
    std::vector<double> values;
};

/// Transmitted-sector expectation values; entries are NaN where T(t) is
/// below the floor.
struct ExpectationSeries {
    double x_d = 0.0;
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> momentum;
    std::vector<double> position;
    std::vector<double> imag_residual; // diagnostic: relative imaginary part
};

/// Amplitude, phase gradient and quantum potential fields of one state.
struct PilotFields {
    std::vector<double> amplitude;      // R = |psi|
    std::vector<double> phase_gradient; // grad S = hbar Im(psi'/psi)
    std::vector<double> quantum_potential; // Q = -hbar^2/(2m) R''/R
    std::vector<bool> mask;             // true where R >= floor * max(R)
};

/// T(t) = integral of |psi|^2 on [x_d, x_max] (fractional first cell).
double transmission(const WaveState& state, const SpatialGrid& grid, double x_d);

struct TransmittedExpectations {
    double energy = 0.0;
    double momentum = 0.0;
    double position = 0.0;
    double imag_residual = 0.0; // max |Im| / |Re| of the sector integrals
};

/// <A>_T = Re integral_{x_d}^{x_max} psi* A psi dx / T(t) with the momentum
/// by central differences and the kinetic term by the 3-point second
/// difference; V is sampled from the schedule at the state's own time.
/// Throws UndefinedSectorError when T(t) <= kTransmissionFloor.
TransmittedExpectations transmitted_expectations(const WaveState& state, const SpatialGrid& grid,
                                                 const UnitSystem& units,
                                                 const BarrierSchedule& schedule, double x_d);

/// Polar decomposition fields with near-node masking.
PilotFields pilot_fields(const WaveState& state, const SpatialGrid& grid, const UnitSystem& units);

/// Probability current j(x) = hbar/m Im(psi* psi') at the plane x
/// (psi' by central differences, linear interpolation between nodes).
double probability_current(const WaveState& state, const SpatialGrid& grid,
                           const UnitSystem& units, double x);

/// Full-grid <H> with the same finite-difference operators.
double total_energy(const WaveState& state, const SpatialGrid& grid, const UnitSystem& units,
                    const BarrierSchedule& schedule);

/// Observer recording T(t) at x_d.
class TransmissionObserver : public Observer {
public:
    TransmissionObserver(const SpatialGrid& grid, double x_d, TransmissionSeries::Label label);
    void sample(std::size_t step, double t, const WaveState& state) override;
    const TransmissionSeries& series() const { return series_; }
    TransmissionSeries take() { return std::move(series_); }

private:
    const SpatialGrid& grid_;
    TransmissionSeries series_;
};

/// Observer recording transmitted-sector expectations (absent -> NaN).
class ExpectationObserver : public Observer {
public:
    ExpectationObserver(const SpatialGrid& grid, const UnitSystem& units,
                        const BarrierSchedule& schedule, double x_d);
    void sample(std::size_t step, double t, const WaveState& state) override;
    const ExpectationSeries& series() const { return series_; }
    ExpectationSeries take() { return std::move(series_); }

private:
    const SpatialGrid& grid_;
    const UnitSystem& units_;
    const BarrierSchedule& schedule_;
    ExpectationSeries series_;
};

/// Analytic free-propagation transmission curve for a Gaussian packet,
///   T_f(t) = (1/2) [1 + Erf((p0 t/m + x0 - x_d)/(sqrt(2) sigma_t))],
/// with the dispersed width sigma_t = sigma0 sqrt(1 + (hbar t/(2 m sigma0^2))^2).
double free_transmission_analytic(double t, double x0, double sigma0, double p0,
                                  const UnitSystem& units, double x_d);

/// The same curve sampled on a time axis.
TransmissionSeries free_transmission_series(const std::vector<double>& times, double x0,
                                            double sigma0, double p0, const UnitSystem& units,
                                            double x_d);

} // namespace sar

#endif
