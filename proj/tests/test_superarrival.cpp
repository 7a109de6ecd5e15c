#include <doctest.h>

#include <cmath>
#include <vector>

#include "sar/errors.hpp"
#include "sar/superarrival.hpp"

using namespace sar;

namespace {

TransmissionSeries make_series(const std::vector<double>& t, const std::vector<double>& v,
                               TransmissionSeries::Label label) {
    TransmissionSeries s;
    s.label = label;
    s.x_d = 0.5;
    s.times = t;
    s.values = v;
    return s;
}

/// Reduced-size config for fast plumbing runs (physics values untuned).
RunConfig small_config(BarrierSchedule::Kind kind = BarrierSchedule::Kind::linear_width) {
    RunConfig cfg = default_config(kind);
    cfg.grid.x_min = -2.0;
    cfg.grid.x_max = 2.0;
    cfg.grid.n_points = 2048;
    cfg.propagation.dt = cfg.propagation.t_end / 1024.0;
    return cfg;
}

} // namespace

TEST_CASE("detect_window: synthetic sine bump with a known crossing") {
    // difference rises as sin(pi (t - 1)/2) on [1, 3]: positive on (1, 3),
    // negative afterwards; zero crossing exactly at t* = 3
    std::vector<double> t, ref, pert;
    const double dt = 0.01;
    for (double x = 0.0; x <= 5.0 + 1e-12; x += dt) {
        t.push_back(x);
        ref.push_back(0.2);
        const double d = x < 1.0 ? 0.0 : 0.05 * std::sin(M_PI * (x - 1.0) / 2.0);
        pert.push_back(0.2 + d);
    }
    const auto r = make_series(t, ref, TransmissionSeries::Label::static_ref);
    const auto p = make_series(t, pert, TransmissionSeries::Label::perturbed);

    const DetectionResult det = detect_window(r, p, 0.5, 1e-3);
    REQUIRE(det.status == DetectionResult::Status::window);
    // threshold crossing of the sine: t_d = 1 + (2/pi) asin(0.02)
    const double td_expected = 1.0 + 2.0 / M_PI * std::asin(1e-3 / 0.05);
    CHECK(det.t_d >= td_expected);
    CHECK(det.t_d <= td_expected + dt + 1e-12);
    // interpolated crossing lands within a sample of t* = 3
    CHECK(std::abs(det.t_c - 3.0) < dt);

    // sensitivity diagnostics are ordered
    CHECK(det.t_d_half_delta <= det.t_d);
    CHECK(det.t_d <= det.t_d_double_delta);
}

TEST_CASE("detect_window: identical series never yield a spurious window") {
    std::vector<double> t, v;
    for (double x = 0.0; x <= 4.0; x += 0.05) {
        t.push_back(x);
        v.push_back(0.5 * (1.0 + std::tanh(x - 2.0)));
    }
    const auto r = make_series(t, v, TransmissionSeries::Label::static_ref);
    const auto p = make_series(t, v, TransmissionSeries::Label::perturbed);
    for (const double delta : {1e-12, 1e-6, 1e-3, 0.1}) {
        CHECK(detect_window(r, p, 0.0, delta).status == DetectionResult::Status::no_deviation);
    }
}

TEST_CASE("detect_window: positive deviation without a crossing stays open") {
    std::vector<double> t, ref, pert;
    for (int i = 0; i <= 40; ++i) {
        t.push_back(0.05 * i);
        ref.push_back(0.1);
        pert.push_back(i > 20 ? 0.2 : 0.1); // first deviating sample at t = 1.05
    }
    const auto det = detect_window(make_series(t, ref, TransmissionSeries::Label::static_ref),
                                   make_series(t, pert, TransmissionSeries::Label::perturbed),
                                   0.0, 1e-3);
    CHECK(det.status == DetectionResult::Status::window_open);
    CHECK(std::abs(det.t_d - 1.05) < 1e-9);

    // mismatched axes are rejected
    auto shifted = make_series(t, pert, TransmissionSeries::Label::perturbed);
    shifted.times[3] += 1e-6;
    CHECK_THROWS_AS(detect_window(make_series(t, ref, TransmissionSeries::Label::static_ref),
                                  shifted, 0.0, 1e-3),
                    InvalidParameterError);
}

TEST_CASE("superarrivality: eta arithmetic on constant windows") {
    std::vector<double> t, ref, pert;
    for (double x = 0.0; x <= 10.0 + 1e-12; x += 0.1) {
        t.push_back(x);
        ref.push_back(0.2);
        pert.push_back(0.3); // I_p = 1.5 I_s over any window
    }
    const auto r = make_series(t, ref, TransmissionSeries::Label::static_ref);
    const auto p = make_series(t, pert, TransmissionSeries::Label::perturbed);
    const SuperarrivalReport rep = superarrivality(r, p, 2.0, 6.0);
    CHECK(rep.eta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.I_s == doctest::Approx(0.2 * 4.0).epsilon(1e-12));
    CHECK(rep.delta_t == doctest::Approx(4.0).epsilon(1e-14));
    // report reconstruction identity
    CHECK(rep.eta == (rep.I_p - rep.I_s) / rep.I_s);

    // constant difference c: eta = c delta_t / I_s
    const SuperarrivalReport rep2 = superarrivality(r, p, 1.0, 9.5);
    CHECK(rep2.eta == doctest::Approx(0.1 * rep2.delta_t / rep2.I_s).epsilon(1e-12));

    // identical curves: eta = 0
    const SuperarrivalReport rep3 = superarrivality(r, r, 2.0, 6.0);
    CHECK(rep3.eta == 0.0);

    // degenerate reference: zero area
    std::vector<double> zeros(t.size(), 0.0);
    const auto z = make_series(t, zeros, TransmissionSeries::Label::static_ref);
    CHECK_THROWS_AS(superarrivality(z, p, 2.0, 6.0), DomainError);
    // window outside the series
    CHECK_THROWS_AS(superarrivality(r, p, -1.0, 6.0), InvalidParameterError);
    CHECK_THROWS_AS(superarrivality(r, p, 6.0, 2.0), InvalidParameterError);
}

TEST_CASE("derive_reference: family rules") {
    const RunConfig lw = small_config(BarrierSchedule::Kind::linear_width);
    const RunConfig ref = derive_reference(lw);
    CHECK(ref.schedule.kind == BarrierSchedule::Kind::static_rect);
    CHECK(ref.schedule.width == lw.schedule.w_i);
    CHECK(ref.schedule.v0 == lw.schedule.v0);

    const RunConfig hr = small_config(BarrierSchedule::Kind::height_ramp);
    const RunConfig fref = derive_reference(hr);
    CHECK(fref.schedule.v0 == 0.0);

    const RunConfig st = small_config(BarrierSchedule::Kind::static_rect);
    CHECK(derive_reference(st).schedule.kind == BarrierSchedule::Kind::static_rect);
    CHECK(derive_reference(st).schedule.v0 == st.schedule.v0);
}

TEST_CASE("run_pair: perturbation past t_end is a no-superarrival result") {
    RunConfig cfg = small_config();
    cfg.schedule.t_p = 2.0 * cfg.propagation.t_end;
    const PairOutcome out = run_pair(cfg);
    CHECK(out.detection.status == DetectionResult::Status::no_deviation);
    CHECK(!out.report.has_value());
    // the two runs are the same barrier throughout
    for (std::size_t i = 0; i < out.reference.values.size(); ++i) {
        CHECK(out.reference.values[i] == out.perturbed.values[i]);
    }
}

TEST_CASE("run_pair: rejects configs that differ beyond the schedule") {
    const RunConfig a = small_config();
    RunConfig b = a;
    b.analysis.x_d *= 1.5;
    CHECK_THROWS_AS(run_pair(a, b, 1), InvalidParameterError);
}

TEST_CASE("run_pair: height ramp compares against the analytic free curve") {
    RunConfig cfg = small_config(BarrierSchedule::Kind::height_ramp);
    const PairOutcome out = run_pair(cfg);
    CHECK(out.reference.label == TransmissionSeries::Label::free_analytic);
    CHECK(out.reference.times == out.perturbed.times);
    // analytic curve saturates to 1
    CHECK(out.reference_final == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("apply_axis_value: axis units and constraints") {
    const RunConfig base = small_config();
    const RunConfig ce = apply_axis_value(base, SweepAxis::Name::epsilon, 0.4);
    CHECK(ce.schedule.epsilon == doctest::Approx(0.4 * base.units.t0).epsilon(1e-14));
    const RunConfig cw = apply_axis_value(base, SweepAxis::Name::w_f, 0.16);
    CHECK(cw.schedule.w_f == doctest::Approx(0.16 * base.units.sigma1).epsilon(1e-14));
    const RunConfig cx = apply_axis_value(base, SweepAxis::Name::x_d, 15.0);
    CHECK(cx.analysis.x_d == doctest::Approx(15.0 * base.units.sigma1).epsilon(1e-14));
    const RunConfig ca = apply_axis_value(base, SweepAxis::Name::alpha, 0.5);
    CHECK(ca.packet.kind == PacketSpec::Kind::non_gaussian);
    CHECK(ca.packet.alpha == 0.5);
    CHECK_THROWS_AS(apply_axis_value(base, SweepAxis::Name::b, 0.5), InvalidParameterError);

    const RunConfig hr = small_config(BarrierSchedule::Kind::height_ramp);
    const RunConfig cb = apply_axis_value(hr, SweepAxis::Name::b, 0.6);
    CHECK(cb.schedule.ramp_b == 0.6);
    CHECK(cb.schedule.ramp_a == doctest::Approx(0.4).epsilon(1e-14));
    CHECK_THROWS_AS(apply_axis_value(hr, SweepAxis::Name::w_f, 0.3), InvalidParameterError);
    CHECK_THROWS_AS(apply_axis_value(hr, SweepAxis::Name::separation, 0.5),
                    InvalidParameterError);
}

TEST_CASE("sweep: points come back sorted with inline statuses") {
    RunConfig cfg = small_config();
    // keep it cheap: short horizon, coarse series
    SweepAxis axis;
    axis.name = SweepAxis::Name::epsilon;
    axis.values = {0.8, 0.27}; // deliberately unsorted
    const SweepResult res = sweep(cfg, axis, 2);
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[0].parameter == 0.27);
    CHECK(res.points[1].parameter == 0.8);
    for (const auto& p : res.points) {
        CHECK(!p.status.empty());
        CHECK(p.T_ref_final >= 0.0);
    }
    CHECK_THROWS_AS(sweep(cfg, SweepAxis{SweepAxis::Name::epsilon, {0.27}}, 1),
                    InvalidParameterError);
}

TEST_CASE("double-barrier trends at reduced resolution") {
    // coarse but consistent discretization; orderings are the physics here
    auto base = small_config(BarrierSchedule::Kind::double_height_ramp);
    base.grid.n_points = 8192;
    base.propagation.dt = base.propagation.t_end / 4096.0;

    const auto eta_of = [](const RunConfig& cfg) {
        const PairOutcome out = run_pair(cfg, 2);
        REQUIRE(out.report.has_value());
        return out.report->eta;
    };

    // eta decreases with the barrier separation (the coarse trend carries
    // Fabry-Perot wiggles, so the points are spaced well apart)
    const double eta_d1 = eta_of(apply_axis_value(base, SweepAxis::Name::separation, 0.4));
    const double eta_d2 = eta_of(apply_axis_value(base, SweepAxis::Name::separation, 1.6));
    const double eta_d3 = eta_of(apply_axis_value(base, SweepAxis::Name::separation, 3.2));
    CHECK(eta_d1 > eta_d2);
    CHECK(eta_d2 > eta_d3);

    // eta decreases with the perturbation duration
    const double eta_e1 = eta_of(apply_axis_value(base, SweepAxis::Name::epsilon, 0.27));
    const double eta_e2 = eta_of(apply_axis_value(base, SweepAxis::Name::epsilon, 0.8));
    CHECK(eta_e1 > eta_e2);

    // eta increases with the final height
    RunConfig low = base;
    low.schedule.v0 = 1.5 * base.units.E0;
    RunConfig high = base;
    high.schedule.v0 = 2.5 * base.units.E0;
    CHECK(eta_of(high) > eta_of(low));
}
