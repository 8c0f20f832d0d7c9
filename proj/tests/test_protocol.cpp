#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wmtrack/errors.hpp"
#include "wmtrack/protocol.hpp"

using namespace wmtrack;
using doctest::Approx;

namespace {
double raw_w(double f, const FilterSpec& s) {
    double x = pi * f * s.t_beta;
    return std::sin(x) / x * (1.0 - 1.0 / std::cos(2.0 * pi * f * s.tau));
}
}  // namespace

TEST_CASE("resonance delay") {
    double b0 = 2.1549e6 / 10.7084e6;
    double tau = resonance_delay(gamma_c13, b0, 0.0);
    CHECK(tau == Approx(1.0 / (4.0 * 2.1549e6)).epsilon(1e-12));
    CHECK(tau == Approx(116.0e-9).epsilon(1e-3));
    CHECK(resonance_delay(gamma_c13, 2.0 * b0, 0.0) == Approx(0.5 * tau).epsilon(1e-14));
    double shifted = resonance_delay(gamma_c13, b0, hz_to_rad(200e3));
    CHECK(shifted / tau == Approx(2.1549e6 / (2.1549e6 + 100e3)).epsilon(1e-12));
    CHECK_THROWS_AS(resonance_delay(gamma_c13, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(resonance_delay(gamma_c13, b0, -hz_to_rad(5e6)), DomainError);
}

TEST_CASE("filter function basics") {
    FilterSpec s{1.856e-6, 116e-9, 5.68e-6};
    CHECK(filter_function(0.0, s) == 0.0);
    for (double f : {1e5, 7.7e5, 2.0e6, 3.3e6})
        CHECK(filter_function(-f, s) == filter_function(f, s));
    CHECK(s.f_c() == Approx(1.0 / (4.0 * 116e-9)));
    CHECK(s.nyquist() == Approx(0.5 / 5.68e-6));
    // away from the poles the closed form is used verbatim
    for (double f : {3e5, 1.1e6, 1.9e6, 2.5e6}) CHECK(filter_function(f, s) == Approx(raw_w(f, s)).epsilon(1e-12));
}

TEST_CASE("filter function removable singularity") {
    for (int n : {4, 8, 16}) {
        double tau = 116e-9;
        FilterSpec s{4.0 * n * tau, tau, 10e-6};
        for (int k : {0, 1, 2}) {
            double fp = (2 * k + 1) * s.f_c();
            double at = filter_function(fp, s);
            CHECK(std::isfinite(at));
            for (double h : {1e-7, 1e-9})
                CHECK(filter_function(fp * (1.0 + h), s) == Approx(filter_function(fp * (1.0 - h), s)).epsilon(1e-6));
            // the series branch joins the direct formula at the switch-over
            double du = 1.2e-4 / (2.0 * pi * tau);
            CHECK(filter_function(fp + du, s) == Approx(raw_w(fp + du, s)).epsilon(1e-9));
            double inner = filter_function(fp + 0.9e-4 / (2.0 * pi * tau), s);
            CHECK(inner == Approx(raw_w(fp + 0.9e-4 / (2.0 * pi * tau), s)).epsilon(1e-6));
            CHECK(at == Approx(raw_w(fp * (1.0 + 1e-6), s)).epsilon(1e-4));
        }
    }
}

TEST_CASE("filter bandwidth scales as the inverse interaction time") {
    double tau = 116e-9;
    for (double tb_us : {1.0, 1.856, 5.0, 20.0, 100.0, 250.0}) {
        int n = 2 * static_cast<int>(std::lround(tb_us * 1e-6 / (4.0 * tau)));
        FilterSpec s{2.0 * tau * n, tau, 10e-6};
        double ratio = filter_bandwidth(s) * s.t_beta;
        CHECK(ratio >= 0.8);
        CHECK(ratio <= 1.2);
        CHECK(filter_bandwidth_amplitude(s) > filter_bandwidth(s));
    }
    FilterSpec s{8 * 232e-9, 116e-9, 1.9685e-6};
    CHECK(s.f_c() == Approx(2.155e6).epsilon(1e-3));
    FilterSpec s2{8 * 464e-9, 232e-9, 1.9685e-6};
    CHECK(s2.f_c() == Approx(0.5 * s.f_c()));
}

TEST_CASE("optimal interaction time") {
    double g = optimal_coupling(100.0, 5.68e-6, 1.86e-6);
    CHECK(rad_to_hz(g) == Approx(4.1e3).epsilon(0.01));
    CHECK(optimal_interaction_time(100.0, 5.68e-6, g) == Approx(1.86e-6).epsilon(1e-12));
    double t1 = optimal_interaction_time(50.0, 4e-6, hz_to_rad(3e3));
    CHECK(optimal_interaction_time(200.0, 4e-6, hz_to_rad(3e3)) == Approx(2.0 * t1).epsilon(1e-14));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double gn = std::pow(10.0, 4.0 * u(rng)), ts = 1e-6 * (1.0 + 10.0 * u(rng)), gg = 1e3 * (1.0 + 1e3 * u(rng));
        double tb = optimal_interaction_time(gn, ts, gg);
        CHECK(optimal_coupling(gn, ts, tb) == Approx(gg).epsilon(1e-12));
    }
    CHECK_THROWS_AS(optimal_interaction_time(0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("build protocol presets") {
    ProtocolConfig c;
    c.preset = "bath-spectrum";
    c.tau = 116e-9;
    Protocol p = build_protocol(c);
    CHECK(p.t_s == Approx(5.68e-6));
    CHECK(p.weak_meas.n_pulses == 8);
    CHECK(p.weak_meas.t_beta == Approx(1.86e-6).epsilon(0.005));
    CHECK(p.n_samples == 1520);
    CHECK(p.t_d == Approx(p.t_s - p.weak_meas.t_beta - p.readout_overhead).epsilon(1e-12));

    ProtocolConfig a;
    a.preset = "alpha-sweep";
    a.tau = 1.0 / (4.0 * 2.0e6);
    a.n_pulses = 2;
    a.readout_overhead = 2.8e-6;
    auto sweep = build_alpha_sweep(a);
    REQUIRE(sweep.size() == 50);
    CHECK(sweep.front().t_s == Approx(3.56e-6));
    CHECK(sweep.back().t_s == Approx(4.05e-6));
    CHECK(sweep[1].t_s - sweep[0].t_s == Approx(10e-9));

    ProtocolConfig dd;
    dd.preset = "dd-sweep";
    dd.tau = 116e-9;
    Protocol q = build_protocol(dd);
    CHECK(q.weak_meas.first == q.weak_meas.last);

    ProtocolConfig t;
    t.t_beta = 1e-6;
    t.n_pulses = 4;
    Protocol e = build_protocol(t);
    CHECK(e.weak_meas.tau == Approx(1e-6 / 8.0));
    CHECK(e.t_s == Approx(1e-6 + 2.8e-6));
}

TEST_CASE("build protocol rejects inconsistent timing") {
    ProtocolConfig c;
    c.tau = 116e-9;
    c.n_pulses = 8;
    c.t_s = 1e-6;
    CHECK_THROWS_AS(build_protocol(c), ConfigError);
    c.n_pulses = 7;
    c.n_samples = 0;
    try {
        build_protocol(c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations.size() >= 3);
    }
    ProtocolConfig bad;
    bad.preset = "nonsense";
    CHECK_THROWS_AS(build_protocol(bad), ConfigError);
}

TEST_CASE("build protocol fuzz never emits an invalid protocol") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const char* presets[] = {"weak-trace", "alpha-sweep", "bath-spectrum", "ramsey", "dd-sweep"};
    int built = 0;
    for (int i = 0; i < 100000; ++i) {
        ProtocolConfig c;
        c.preset = presets[i % 5];
        if (u(rng) < 0.8) c.tau = 1e-9 * (u(rng) * 400.0 - 20.0);
        if (u(rng) < 0.6) c.n_pulses = static_cast<int>(u(rng) * 40.0) - 4;
        if (u(rng) < 0.5) c.t_beta = 1e-6 * (u(rng) * 8.0 - 0.5);
        if (u(rng) < 0.7) c.t_s = 1e-6 * (u(rng) * 12.0 - 1.0);
        if (u(rng) < 0.5) c.n_samples = static_cast<int>(u(rng) * 3000.0) - 100;
        c.readout_overhead = 1e-6 * (u(rng) * 4.0 - 0.5);
        c.b0 = u(rng) * 0.4 - 0.05;
        c.polarization.kind = static_cast<PolarizationKind>(i % 3);
        c.polarization.p = u(rng) * 1.4 - 0.2;
        c.polarization.reps = static_cast<int>(u(rng) * 10.0) - 2;
        c.polarization.partial_angle = u(rng) * 2.0 - 0.2;
        try {
            Protocol p = build_protocol(c);
            ++built;
            CHECK(p.violations().empty());
            CHECK(p.weak_meas.n_pulses % 2 == 0);
            CHECK(p.t_s >= p.weak_meas.t_beta + p.readout_overhead - 1e-12 * p.t_s);
        } catch (const ConfigError& e) {
            CHECK_FALSE(e.violations.empty());
        }
    }
    CHECK(built > 1000);
}

TEST_CASE("fold and unfold") {
    FilterSpec low{1e-6, 1.0 / (4.0 * 100e3), 2e-6};  // f_c = 100 kHz below Nyquist 250 kHz
    CHECK(unfold_alias(low.f_c(), low) == Approx(low.f_c()));

    FilterSpec s{1.856e-6, 116e-9, 1.9685e-6};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Band band = admissible_band(s);
    CHECK(band.lo <= s.f_c());
    CHECK(band.hi >= s.f_c());
    for (int i = 0; i < 10000; ++i) {
        double fp = u(rng) * s.nyquist();
        CHECK(fold(unfold_alias(fp, s), s.f_s()) == Approx(fp).epsilon(1e-9).scale(s.f_s()));
        double f = band.lo + u(rng) * (band.hi - band.lo);
        CHECK(unfold_alias(fold(f, s.f_s()), s) == Approx(f).epsilon(1e-12));
    }
    CHECK(fold(3.0 * s.f_s() + 1234.0, s.f_s()) == Approx(1234.0));
    CHECK(fold(3.0 * s.f_s() - 1234.0, s.f_s()) == Approx(1234.0));
}
