#include "sar/wavepacket.hpp"

#include <cmath>
#include <complex>

#include "sar/errors.hpp"

namespace sar {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

WaveState build_packet(const PacketSpec& spec, const SpatialGrid& grid, const UnitSystem& units) {
    if (!(spec.sigma0 > 0.0)) throw InvalidParameterError("build_packet: sigma0 must be positive");
    if (!std::isfinite(spec.alpha)) throw InvalidParameterError("build_packet: alpha must be finite");

    const double s0 = spec.sigma0;
    const double gauss_norm = std::pow(2.0 * M_PI * s0 * s0, -0.25);
    // closed-form normalization of the sine-modulated packet
    const double q = M_PI * M_PI / 16.0;
    const double mod_norm = std::sqrt(std::sqrt(2.0 * M_PI * s0 * s0)
                                      * (1.0 + spec.alpha * spec.alpha * std::exp(-q) * std::sinh(q)));

    WaveState state;
    state.time = 0.0;
    state.amplitudes.resize(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double u = grid.x(j) - spec.x0;
        const std::complex<double> envelope =
            std::exp(-u * u / (4.0 * s0 * s0) + I * spec.p0 * u / units.hbar);
        if (spec.kind == PacketSpec::Kind::gaussian) {
            state.amplitudes[j] = gauss_norm * envelope;
        } else {
            const double mod = 1.0 + spec.alpha * std::sin(M_PI * u / (4.0 * s0));
            state.amplitudes[j] = mod / mod_norm * envelope;
        }
    }

    const double wall = std::max(std::abs(state.amplitudes.front()),
                                 std::abs(state.amplitudes.back()));
    if (wall >= 1e-12) {
        throw ConfigError("build_packet: packet tail is not negligible at the box walls");
    }
    normalize(state, grid); // removes the O(dx^2) sampling bias
    return state;
}

double initial_energy(const PacketSpec& spec, const UnitSystem& units) {
    if (spec.kind != PacketSpec::Kind::gaussian) {
        throw InvalidParameterError("initial_energy: closed form available for Gaussian packets only");
    }
    const double h = units.hbar;
    return spec.p0 * spec.p0 / (2.0 * units.mass)
         + h * h / (8.0 * units.mass * spec.sigma0 * spec.sigma0);
}

} // namespace sar
