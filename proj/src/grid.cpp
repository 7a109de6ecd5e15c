#include "sar/grid.hpp"

#include <cmath>

#include "sar/errors.hpp"

namespace sar {

SpatialGrid::SpatialGrid(double x_min_, double x_max_, std::size_t n_points_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_) {
    if (!(x_min < x_max)) throw InvalidParameterError("SpatialGrid: x_min must be < x_max");
    if (n_points < 3) throw InvalidParameterError("SpatialGrid: need at least 3 points");
}

std::size_t SpatialGrid::index_at_or_below(double xq) const {
    if (xq <= x_min) return 0;
    if (xq >= x_max) return n_points - 1;
    auto j = static_cast<std::size_t>((xq - x_min) / dx());
    // guard against round-off on the division
    while (j + 1 < n_points && x(j + 1) <= xq) ++j;
    while (j > 0 && x(j) > xq) --j;
    return j;
}

namespace {

double check_and_integrate(const std::vector<double>& density, const SpatialGrid& grid,
                           double from_x) {
    if (density.size() != grid.n_points) {
        throw ShapeError("integral: field length does not match grid");
    }
    if (from_x < grid.x_min || from_x > grid.x_max) {
        throw DomainError("integral: from_x outside the grid");
    }
    const double dx = grid.dx();
    const std::size_t j = grid.index_at_or_below(from_x);
    double sum = 0.0;
    for (std::size_t k = j + 1; k + 1 < grid.n_points; ++k) {
        sum += 0.5 * (density[k] + density[k + 1]) * dx;
    }
    const double xj = grid.x(j);
    if (from_x == xj) {
        if (j + 1 < grid.n_points) sum += 0.5 * (density[j] + density[j + 1]) * dx;
        return sum;
    }
    // fractional first cell [from_x, x_{j+1}], linear density interpolant
    const double frac = (from_x - xj) / dx;
    const double f_at = density[j] + (density[j + 1] - density[j]) * frac;
    sum += 0.5 * (f_at + density[j + 1]) * (grid.x(j + 1) - from_x);
    return sum;
}

std::vector<double> density_of(const WaveState& state) {
    std::vector<double> d(state.amplitudes.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(state.amplitudes[i]);
    return d;
}

} // namespace

double norm(const WaveState& state, const SpatialGrid& grid) {
    if (state.amplitudes.size() != grid.n_points) {
        throw ShapeError("norm: state length does not match grid");
    }
    const double dx = grid.dx();
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < grid.n_points; ++k) {
        sum += 0.5 * (std::norm(state.amplitudes[k]) + std::norm(state.amplitudes[k + 1])) * dx;
    }
    return sum;
}

double partial_norm(const WaveState& state, const SpatialGrid& grid, double from_x) {
    if (state.amplitudes.size() != grid.n_points) {
        throw ShapeError("partial_norm: state length does not match grid");
    }
    return check_and_integrate(density_of(state), grid, from_x);
}

double integral_from(const std::vector<double>& field, const SpatialGrid& grid, double from_x) {
    return check_and_integrate(field, grid, from_x);
}

void normalize(WaveState& state, const SpatialGrid& grid) {
    state.amplitudes.front() = 0.0;
    state.amplitudes.back() = 0.0;
    const double n = norm(state, grid);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DomainError("normalize: state has zero or non-finite norm");
    }
    const double inv = 1.0 / std::sqrt(n);
    for (auto& a : state.amplitudes) a *= inv;
}

} // namespace sar
