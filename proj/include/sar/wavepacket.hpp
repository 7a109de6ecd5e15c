#ifndef SAR_WAVEPACKET_HPP
#define SAR_WAVEPACKET_HPP

#include "sar/grid.hpp"
#include "sar/units.hpp"

namespace sar {

/// Initial-state family: a Gaussian packet or the sine-modulated
/// non-Gaussian variant with coefficient alpha (alpha = 0 reduces to the
/// Gaussian).
struct PacketSpec {
    enum class Kind { gaussian, non_gaussian };
    Kind kind = Kind::gaussian;
    double x0 = 0.0;     // centroid
    double sigma0 = 0.0; // rms width of |psi|^2
    double p0 = 0.0;     // drift momentum
    double alpha = 0.0;  // non-Gaussian coefficient
};

/// Sample the packet on the grid at t = 0 and normalize numerically.
/// Throws ConfigError if the packet tail is not negligible (< 1e-12 in
/// amplitude) at the box walls.
WaveState build_packet(const PacketSpec& spec, const SpatialGrid& grid, const UnitSystem& units);

/// Closed-form initial energy <H> = p0^2/(2m) + hbar^2/(8 m sigma0^2) of the
/// Gaussian packet. Non-Gaussian packets are not supported here; compute
/// numerically from the sampled state instead.
double initial_energy(const PacketSpec& spec, const UnitSystem& units);

} // namespace sar

#endif
