#include "sar/units.hpp"

#include <cmath>

#include "sar/errors.hpp"

namespace sar {

UnitSystem make_units(const UnitOverrides& o) {
    UnitSystem u;
    if (o.sigma1 && o.sigma0) {
        throw InvalidParameterError("make_units: override either sigma1 or sigma0, not both");
    }
    if (o.mass) u.mass = *o.mass;
    if (o.sigma1) u.sigma1 = *o.sigma1;
    u.p0 = o.p0 ? *o.p0 : 50.0 * M_PI;
    if (o.sigma0) {
        u.sigma0 = *o.sigma0;
        u.sigma1 = u.sigma0 * std::sqrt(2.0);
    } else {
        u.sigma0 = u.sigma1 / std::sqrt(2.0);
    }
    if (!(u.mass > 0.0)) throw InvalidParameterError("make_units: mass must be positive");
    if (!(u.sigma0 > 0.0)) throw InvalidParameterError("make_units: sigma0 must be positive");
    if (!(u.p0 > 0.0)) throw InvalidParameterError("make_units: p0 must be positive");
    u.t0 = u.mass * u.sigma0 / u.p0;
    u.E0 = u.p0 * u.p0 / (2.0 * u.mass)
         + u.hbar * u.hbar / (8.0 * u.mass * u.sigma0 * u.sigma0);
    return u;
}

} // namespace sar
