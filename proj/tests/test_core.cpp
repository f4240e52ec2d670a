#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chipgate/constants.hpp"
#include "chipgate/grid.hpp"
#include "chipgate/waveform.hpp"

using namespace chipgate;

TEST_CASE("physical constants satisfy the qubit-pair symmetry") {
    const auto pc = PhysicalConstants::rb87();
    CHECK_NOTHROW(pc.validate());
    CHECK(pc.g_F1 == -pc.g_F2);
    // equal static Zeeman shift of |1,-1> and |2,+1>
    CHECK(pc.g_F2 * (+1.0) == pc.g_F1 * (-1.0));
    CHECK(pc.omega_hfs / (2.0 * pi) == doctest::Approx(6.834682610904e9));
}

TEST_CASE("constants validation rejects broken tables") {
    auto pc = PhysicalConstants::rb87();
    pc.g_F1 = -0.4;
    CHECK_THROWS(pc.validate());
    pc = PhysicalConstants::rb87();
    pc.m_atom = -1.0;
    CHECK_THROWS(pc.validate());
}

TEST_CASE("make_grid spacing and rejection rules") {
    const auto g = make_grid(-2e-6, 2e-6, 256);
    CHECK(g.spacing() == doctest::Approx(4e-6 / 255.0));  // ~15.7 nm
    CHECK(g.spacing() == doctest::Approx(15.7e-9).epsilon(0.01));

    const auto g2 = make_grid(-4e-6, 4e-6, 512);
    CHECK(g2.spacing() == doctest::Approx(8e-6 / 511.0));
    CHECK(g2.spacing() == doctest::Approx(15.7e-9).epsilon(0.01));

    CHECK_THROWS(make_grid(0.0, 1e-6, 7));       // not a power of two
    CHECK_THROWS(make_grid(1e-6, 0.0, 256));     // non-monotone bounds
    CHECK_THROWS(make_grid(0.0, 1e-6, 4));       // too few points
}

TEST_CASE("grid wavenumbers follow FFT ordering") {
    const auto g = make_grid(0.0, 1e-6, 8);
    const auto ks = g.wavenumbers();
    const double dk = 2.0 * pi / (8.0 * g.spacing());
    CHECK(ks[0] == 0.0);
    CHECK(ks[1] == doctest::Approx(dk));
    CHECK(ks[4] == doctest::Approx(-4.0 * dk));
    CHECK(ks[7] == doctest::Approx(-dk));
}

TEST_CASE("triangular trial ramp endpoints and apex") {
    // N=1: zero at both ends
    CHECK(triangular_ramp_value(0.0, 1.0) == 0.0);
    CHECK(triangular_ramp_value(1.0, 1.0) == doctest::Approx(0.0));
    // N=2 at tau_g/4 = middle of the first oscillation -> apex
    const TimeGrid tg = make_time_grid(0.0, 1e-3, 1000);
    const auto wf = linear_ramp_trial(0.5e-3, 2, tg);
    CHECK(wf.at(0.25e-3) == doctest::Approx(1.0));
    CHECK(wf.values.front() == 0.0);
    CHECK(wf.values.back() == 0.0);
}

TEST_CASE("trial ramp for N=3 peaks at the half-oscillation points") {
    const double tau_g = 1.110e-3;
    const TimeGrid tg = make_time_grid(0.0, tau_g, 22200);
    const auto wf = linear_ramp_trial(tau_g / 3.0, 3, tg);
    for (int k = 0; k < 3; ++k) {
        const double t_peak = (k + 0.5) * tau_g / 3.0;
        CHECK(wf.at(t_peak) == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (double v : wf.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("trial ramps integrate to half the gate time") {
    const double tau_g = 0.696e-3;
    const TimeGrid tg = make_time_grid(0.0, tau_g, 13920);
    const auto wf = linear_ramp_trial(tau_g / 2.0, 2, tg);
    CHECK(wf.integral() == doctest::Approx(0.5 * tau_g).epsilon(1e-9));
}

TEST_CASE("waveform arithmetic preserves the grid") {
    const TimeGrid tg = make_time_grid(0.0, 1.0, 100);
    Waveform a(tg, 0.25);
    Waveform b(tg, 0.5);
    a += b;
    CHECK(a.size() == tg.n_samples());
    CHECK(a[3] == doctest::Approx(0.75));
    a *= 2.0;
    CHECK(a[10] == doctest::Approx(1.5));
    const auto c = a.clamped(0.0, 1.0);
    CHECK(c[10] == doctest::Approx(1.0));
    const TimeGrid other = make_time_grid(0.0, 2.0, 100);
    Waveform d(other, 1.0);
    CHECK_THROWS(a += d);
}

TEST_CASE("waveform midpoint sampling") {
    const TimeGrid tg = make_time_grid(0.0, 1.0, 4);
    Waveform w(tg, std::vector<double>{0.0, 1.0, 2.0, 3.0, 4.0});
    CHECK(w.midpoint(0) == doctest::Approx(0.5));
    CHECK(w.midpoint(3) == doctest::Approx(3.5));
    CHECK(w.at(0.125) == doctest::Approx(0.5));
}
