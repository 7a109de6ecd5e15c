#ifndef SAR_GRID_HPP
#define SAR_GRID_HPP

#include <complex>
#include <vector>

namespace sar {

/// Uniform spatial grid on [x_min, x_max] with hard-wall endpoints.
struct SpatialGrid {
    double x_min;
    double x_max;
    std::size_t n_points;

    SpatialGrid(double x_min_, double x_max_, std::size_t n_points_);

    double dx() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
    double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }

    /// Largest j with x(j) <= xq (clamped to [0, n_points-1]).
    std::size_t index_at_or_below(double xq) const;
};

/// Complex amplitudes on a SpatialGrid at one time instant.
/// Endpoint amplitudes are pinned to zero (hard-wall box).
struct WaveState {
    std::vector<std::complex<double>> amplitudes;
    double time = 0.0;
};

/// Trapezoid-rule integral of |psi|^2 over the full grid.
double norm(const WaveState& state, const SpatialGrid& grid);

/// Trapezoid-rule integral of |psi|^2 on [from_x, x_max]. When from_x falls
/// between nodes the straddled cell contributes the trapezoid of the linear
/// density interpolant on [from_x, next node].
double partial_norm(const WaveState& state, const SpatialGrid& grid, double from_x);

/// Same fractional-cell quadrature applied to an arbitrary real field.
double integral_from(const std::vector<double>& field, const SpatialGrid& grid, double from_x);

/// Divide amplitudes by sqrt(norm); pins endpoints to zero first.
void normalize(WaveState& state, const SpatialGrid& grid);

} // namespace sar

#endif
