#ifndef SAR_UNITS_HPP
#define SAR_UNITS_HPP

#include <optional>

namespace sar {

/// Natural-unit system shared by every run: hbar = 1, m = 1/2 by default.
///
/// sigma1 is the reporting length scale; sigma0 = sigma1/sqrt(2) is the
/// rms width of the initial density. Derived scales:
///   t0 = m*sigma0/p0          (reporting time unit)
///   E0 = p0^2/(2m) + hbar^2/(8 m sigma0^2)   (initial packet energy)
struct UnitSystem {
    double hbar = 1.0;
    double mass = 0.5;
    double sigma1 = 0.05;
    double sigma0 = 0.0; // derived: sigma1/sqrt(2)
    double p0 = 0.0;     // default 50*pi
    double t0 = 0.0;     // derived: mass*sigma0/p0
    double E0 = 0.0;     // derived, see above
};

struct UnitOverrides {
    std::optional<double> mass;
    std::optional<double> sigma1;
    std::optional<double> sigma0; // mutually exclusive with sigma1
    std::optional<double> p0;
};

/// Build the unit system. Overrides are applied before deriving t0 and E0.
/// Throws InvalidParameterError for non-positive mass/sigma/p0 or if both
/// sigma1 and sigma0 are overridden inconsistently.
UnitSystem make_units(const UnitOverrides& overrides = {});

} // namespace sar

#endif
