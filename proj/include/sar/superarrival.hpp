#ifndef SAR_SUPERARRIVAL_HPP
#define SAR_SUPERARRIVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "sar/observables.hpp"
#include "sar/run_config.hpp"

namespace sar {

/// Superarrival window and normalized excess area.
struct SuperarrivalReport {
    double t_d = 0.0;
    double t_c = 0.0;
    double delta_t = 0.0; // t_c - t_d
    double I_p = 0.0;     // area under the perturbed curve over the window
    double I_s = 0.0;     // area under the reference curve
    double eta = 0.0;     // (I_p - I_s)/I_s
};

/// Outcome of the window search. no_deviation is a result, not an error;
/// window_open reports t_d when the curves have not crossed by t_end.
struct DetectionResult {
    enum class Status { window, no_deviation, window_open };
    Status status = Status::no_deviation;
    double t_d = 0.0;
    double t_c = 0.0;
    // sensitivity of t_d to the deviation threshold (diagnostic)
    double t_d_half_delta = 0.0;
    double t_d_double_delta = 0.0;
};

/// Find t_d (earliest sample >= t_p where perturbed - reference > delta_dev)
/// and t_c (first sign change after t_d, located by linear interpolation).
/// Both series must share an identical time axis.
DetectionResult detect_window(const TransmissionSeries& reference,
                              const TransmissionSeries& perturbed, double t_p,
                              double delta_dev);

/// Trapezoid areas of both curves over [t_d, t_c] and eta = (I_p - I_s)/I_s.
SuperarrivalReport superarrivality(const TransmissionSeries& reference,
                                   const TransmissionSeries& perturbed, double t_d, double t_c);

struct PairOutcome {
    TransmissionSeries reference;
    TransmissionSeries perturbed;
    DetectionResult detection;
    std::optional<SuperarrivalReport> report; // present when a window closed
    double reference_final = 0.0;
    double perturbed_final = 0.0;
    double max_norm_drift = 0.0;
};

/// Derive the reference configuration for a perturbed one: the static
/// barrier of initial width for linear_width, free propagation for the
/// height ramps (analytic for Gaussian packets, a numeric zero-potential
/// run otherwise), the schedule itself when it is already static.
RunConfig derive_reference(const RunConfig& perturbed);

/// Propagate reference and perturbed runs on a shared ramp-aligned time
/// grid, sample T(t) at x_d, detect the window and compute eta.
/// `threads` = 2 runs the two propagations concurrently.
PairOutcome run_pair(const RunConfig& reference_cfg, const RunConfig& perturbed_cfg,
                     unsigned threads = 1);
PairOutcome run_pair(const RunConfig& perturbed_cfg, unsigned threads = 1);

/// Parameter sweep axes; values are given in the reporting unit of the
/// axis (t0 for epsilon, sigma1 for lengths, plain numbers for b/alpha).
struct SweepAxis {
    enum class Name { epsilon, w_f, x_d, b, separation, alpha };
    Name name = Name::epsilon;
    std::vector<double> values;

    static const char* label(Name n);
};

struct SweepPoint {
    double parameter = 0.0; // axis units
    std::string status;     // "ok", "no_deviation", "window_open" or "error: ..."
    std::optional<SuperarrivalReport> report;
    double T_ref_final = 0.0;
    double T_pert_final = 0.0;
};

struct SweepResult {
    SweepAxis::Name axis = SweepAxis::Name::epsilon;
    std::vector<SweepPoint> points; // sorted by parameter
};

/// Run one pair per axis value; points run concurrently on up to `threads`
/// workers and are aggregated in axis order. Per-point failures are
/// recorded inline and do not abort the sweep.
SweepResult sweep(const RunConfig& base, const SweepAxis& axis, unsigned threads = 1);

/// Apply one axis value (in axis units) to a copy of the base config.
RunConfig apply_axis_value(const RunConfig& base, SweepAxis::Name axis, double value);

} // namespace sar

#endif
