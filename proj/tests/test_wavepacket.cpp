#include <doctest.h>

#include <cmath>
#include <complex>

#include "sar/errors.hpp"
#include "sar/observables.hpp"
#include "sar/potential.hpp"
#include "sar/propagator.hpp"
#include "sar/units.hpp"
#include "sar/wavepacket.hpp"

using namespace sar;

namespace {

PacketSpec standard_packet(const UnitSystem& u) {
    PacketSpec p;
    p.x0 = -6.0 * u.sigma1;
    p.sigma0 = u.sigma0;
    p.p0 = u.p0;
    return p;
}

} // namespace

TEST_CASE("build_packet: Gaussian defaults, norm and peak density") {
    const UnitSystem u = make_units();
    // chosen so that x0 = -0.3 is exactly a node
    const SpatialGrid g(-2.0, 2.0, 4001);
    const PacketSpec spec = standard_packet(u);
    const WaveState s = build_packet(spec, g, u);
    CHECK(norm(s, g) == doctest::Approx(1.0).epsilon(1e-9));
    const std::size_t j0 = g.index_at_or_below(spec.x0);
    CHECK(g.x(j0) == doctest::Approx(spec.x0).epsilon(1e-12));
    const double peak = std::norm(s.amplitudes[j0]);
    CHECK(peak == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * spec.sigma0 * spec.sigma0))
                      .epsilon(1e-6));
    CHECK(s.time == 0.0);
    // negligible overlap with the barrier region x >= 0
    CHECK(partial_norm(s, g, 0.0) < 1e-6);
}

TEST_CASE("build_packet: non-Gaussian reduces to Gaussian at alpha = 0") {
    const UnitSystem u = make_units();
    const SpatialGrid g(-2.0, 2.0, 4001);
    PacketSpec spec = standard_packet(u);
    const WaveState gauss = build_packet(spec, g, u);
    spec.kind = PacketSpec::Kind::non_gaussian;
    spec.alpha = 0.0;
    const WaveState mod = build_packet(spec, g, u);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < g.n_points; ++j) {
        max_diff = std::max(max_diff, std::abs(gauss.amplitudes[j] - mod.amplitudes[j]));
    }
    CHECK(max_diff < 1e-12);
}

TEST_CASE("build_packet: closed-form normalization of the alpha = 0.5 packet") {
    const UnitSystem u = make_units();
    const SpatialGrid g(-2.0, 2.0, 32001);
    PacketSpec spec = standard_packet(u);
    spec.kind = PacketSpec::Kind::non_gaussian;
    spec.alpha = 0.5;

    // quadrature of the closed form without renormalization
    WaveState raw;
    raw.amplitudes.resize(g.n_points);
    const double q = M_PI * M_PI / 16.0;
    const double denom = std::sqrt(std::sqrt(2.0 * M_PI * spec.sigma0 * spec.sigma0) *
                                   (1.0 + 0.25 * std::exp(-q) * std::sinh(q)));
    for (std::size_t j = 0; j < g.n_points; ++j) {
        const double xx = g.x(j) - spec.x0;
        const double mod = 1.0 + 0.5 * std::sin(M_PI * xx / (4.0 * spec.sigma0));
        raw.amplitudes[j] = mod / denom * std::exp(-xx * xx / (4.0 * spec.sigma0 * spec.sigma0));
    }
    CHECK(norm(raw, g) == doctest::Approx(1.0).epsilon(1e-8));

    const WaveState s = build_packet(spec, g, u);
    CHECK(norm(s, g) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("build_packet: errors") {
    const UnitSystem u = make_units();
    const SpatialGrid g(-2.0, 2.0, 2001);
    PacketSpec spec = standard_packet(u);
    spec.sigma0 = 0.0;
    CHECK_THROWS_AS(build_packet(spec, g, u), InvalidParameterError);
    spec = standard_packet(u);
    spec.x0 = g.x_min + spec.sigma0; // tail touches the wall
    CHECK_THROWS_AS(build_packet(spec, g, u), ConfigError);
}

TEST_CASE("initial_energy: closed form and limits") {
    const UnitSystem u = make_units();
    PacketSpec spec = standard_packet(u);
    CHECK(initial_energy(spec, u) == doctest::Approx(24874.011002723397).epsilon(1e-12));
    spec.p0 = 0.0;
    CHECK(initial_energy(spec, u) ==
          doctest::Approx(u.hbar * u.hbar / (8.0 * u.mass * spec.sigma0 * spec.sigma0))
              .epsilon(1e-14));
    spec = standard_packet(u);
    spec.sigma0 = 1e9; // plane-wave limit
    CHECK(initial_energy(spec, u) ==
          doctest::Approx(spec.p0 * spec.p0 / (2.0 * u.mass)).epsilon(1e-12));
    spec.kind = PacketSpec::Kind::non_gaussian;
    CHECK_THROWS_AS(initial_energy(spec, u), InvalidParameterError);
}

TEST_CASE("built Gaussian: centroid and mean momentum match the spec") {
    // gentle momentum so central differences sit well under the tolerance
    UnitOverrides o;
    o.mass = 1.0;
    o.sigma0 = 1.0;
    o.p0 = 2.0;
    const UnitSystem u = make_units(o);
    const SpatialGrid g(-30.0, 30.0, 65537);
    PacketSpec spec;
    spec.x0 = -3.0;
    spec.sigma0 = u.sigma0;
    spec.p0 = u.p0;
    const WaveState s = build_packet(spec, g, u);

    // <x>
    std::vector<double> fx(g.n_points);
    for (std::size_t j = 0; j < g.n_points; ++j) fx[j] = g.x(j) * std::norm(s.amplitudes[j]);
    const double mean_x = integral_from(fx, g, g.x_min);
    CHECK(mean_x == doctest::Approx(spec.x0).epsilon(1e-8));

    // <p> via the transmitted-sector expectation over the whole grid
    const auto e = transmitted_expectations(s, g, u, BarrierSchedule::free_space(), g.x_min);
    CHECK(std::abs(e.momentum - spec.p0) < 1e-6 * spec.p0);
}

TEST_CASE("free evolution reproduces the dispersed rms width") {
    UnitOverrides o;
    o.mass = 1.0;
    o.sigma0 = 1.0;
    o.p0 = 2.0;
    const UnitSystem u = make_units(o);
    const SpatialGrid g(-40.0, 60.0, 16384);
    PacketSpec spec;
    spec.x0 = -5.0;
    spec.sigma0 = 1.0;
    spec.p0 = u.p0;
    const WaveState s0 = build_packet(spec, g, u);

    const double t_end = 4.0; // hbar t / (2 m sigma0^2) = 2
    const TimeGrid tg = TimeGrid::uniform(t_end, 2048);
    const RunResult rr =
        propagate(s0, BarrierSchedule::free_space(), g, u, tg, 2048, {});

    std::vector<double> fx(g.n_points), fxx(g.n_points);
    for (std::size_t j = 0; j < g.n_points; ++j) {
        const double d = std::norm(rr.final_state.amplitudes[j]);
        fx[j] = g.x(j) * d;
        fxx[j] = g.x(j) * g.x(j) * d;
    }
    const double mean = integral_from(fx, g, g.x_min);
    const double var = integral_from(fxx, g, g.x_min) - mean * mean;
    const double spread = u.hbar * t_end / (2.0 * u.mass * spec.sigma0 * spec.sigma0);
    const double sigma_t = spec.sigma0 * std::sqrt(1.0 + spread * spread);
    CHECK(std::sqrt(var) == doctest::Approx(sigma_t).epsilon(1e-3));
}
