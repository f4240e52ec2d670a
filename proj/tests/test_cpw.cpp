#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chipgate/cpw.hpp"

using namespace chipgate;

namespace {
SolverWindow coarse_window() {
    SolverWindow win;
    win.margin = 6e-6;
    win.cell = 30e-9;
    win.tolerance = 1e-8;
    return win;
}
}  // namespace

TEST_CASE("skin depth") {
    // paper's gold value at 6.8 GHz
    CHECK(skin_depth(2.0 * pi * 6.8e9, 4.5e7) == doctest::Approx(0.91e-6).epsilon(0.01));
    // quadrupling sigma halves the depth
    const double d1 = skin_depth(2.0 * pi * 6.8e9, 4.5e7);
    const double d4 = skin_depth(2.0 * pi * 6.8e9, 4.0 * 4.5e7);
    CHECK(d4 == doctest::Approx(0.5 * d1));
    // perfect-conductor limit
    CHECK(skin_depth(2.0 * pi * 6.8e9, 1e20) < 1e-12);
    CHECK_THROWS(skin_depth(0.0, 4.5e7));
}

TEST_CASE("lossless line gives a real impedance") {
    std::complex<double> zc;
    double beta = 0, alpha = 0;
    cpw_impedance(0.0, 3.5e-7, 2.9e-10, 2.0 * pi * 6.8e9, zc, beta, alpha);
    CHECK(zc.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zc.real() == doctest::Approx(std::sqrt(3.5e-7 / 2.9e-10)));
    CHECK(alpha == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(beta == doctest::Approx(2.0 * pi * 6.8e9 * std::sqrt(3.5e-7 * 2.9e-10)));
}

TEST_CASE("paper cross-section impedance and propagation constants") {
    const CPWSpec spec;  // defaults are the published geometry
    const CPWResult r = analyze_cpw(spec, coarse_window());
    CHECK(std::abs(r.Zc) > 104.0);
    CHECK(std::abs(r.Zc) < 156.0);
    CHECK(std::arg(r.Zc) / pi > -0.29);
    CHECK(std::arg(r.Zc) / pi < -0.19);
    CHECK(r.beta_mw > 3e2);
    CHECK(r.beta_mw < 3e3);
    CHECK(r.alpha_mw > 3e2);
    CHECK(r.alpha_mw < 3e3);
    // R per unit length of the return circuit: center + grounds in parallel
    const double r_center = 1.0 / (spec.sigma * spec.center_width * spec.thickness);
    CHECK(r.R == doctest::Approx(r_center + 0.5 * r_center));
}

TEST_CASE("electrostatic map symmetry and linearity") {
    CPWSpec spec;
    spec.eps_r = 1.0;  // vacuum everywhere, fully symmetric problem
    SolverWindow win = coarse_window();
    win.cell = 40e-9;
    FieldMap2D maps;
    const double C = cpw_electrostatics(spec, win, maps);
    CHECK(C > 0.0);
    // Ez even and Ex odd under x -> -x
    const std::size_t jmid = maps.nz / 2 + 8;
    for (std::size_t i = 1; i + 1 < maps.nx / 2; i += 7) {
        const std::size_t k = maps.idx(i, jmid);
        const std::size_t km = maps.idx(maps.nx - 1 - i, jmid);
        CHECK(maps.Ez[k] == doctest::Approx(maps.Ez[km]).epsilon(1e-9));
        CHECK(maps.Ex[k] == doctest::Approx(-maps.Ex[km]).epsilon(1e-9));
    }
    // doubling the drive doubles E everywhere (maps are per unit drive)
    CPWResult res;
    res.maps = maps;
    const auto s1 = mw_field_at(res, 1.0, 0.0, 0.3e-6, 1.5e-6);
    const auto s2 = mw_field_at(res, 2.0, 0.0, 0.3e-6, 1.5e-6);
    CHECK(s2.Ex == doctest::Approx(2.0 * s1.Ex));
    CHECK(s2.Ez == doctest::Approx(2.0 * s1.Ez));
}

TEST_CASE("two far conductors approach the parallel-cylinder capacitance") {
    SolverWindow win;
    win.margin = 10e-6;
    win.cell = 40e-9;
    win.tolerance = 1e-9;
    const double side = 0.4e-6;
    const double d = 2.0e-6;
    const double c = two_wire_capacitance(side, side, d, win);
    // conformal (logarithmic-capacity) radius of a square of side s: 0.59017 s
    const double a_eff = 0.59017 * side;
    const double eps0 = 8.8541878128e-12;
    const double c_pair = pi * eps0 / std::acosh(d / (2.0 * a_eff));
    CHECK(std::fabs(c / c_pair - 1.0) < 0.05);
}

TEST_CASE("magnetoquasistatics: zero net enclosed current and axis symmetry") {
    const CPWSpec spec;
    SolverWindow win = coarse_window();
    FieldMap2D maps;
    double L = 0, R = 0;
    cpw_magnetoquasistatics(spec, win, maps, L, R);
    CHECK(L > 0.0);

    // Ampere loop well outside the conductors: net current ~ 0
    const std::size_t b = 6;  // cells inside the window edge
    double circ = 0.0;
    const double h = maps.cell;
    for (std::size_t i = b; i + b < maps.nx; ++i) {
        circ += maps.Bx[maps.idx(i, b)] * h;           // bottom, +x direction
        circ -= maps.Bx[maps.idx(i, maps.nz - 1 - b)] * h;  // top, -x direction
    }
    for (std::size_t j = b; j + b < maps.nz; ++j) {
        circ += maps.Bz[maps.idx(maps.nx - 1 - b, j)] * h;  // right, +z
        circ -= maps.Bz[maps.idx(b, j)] * h;                // left, -z
    }
    const double mu0 = 1.25663706212e-6;
    CHECK(std::fabs(circ / mu0) < 0.02);  // amps; drive is 1 A total forward

    // Bz vanishes on the symmetry axis
    const std::size_t imid = (maps.nx - 1) / 2;
    for (std::size_t j = 4; j + 4 < maps.nz; j += 13)
        CHECK(std::fabs(maps.Bz[maps.idx(imid, j)]) <
              1e-6 + 1e-9 * std::fabs(maps.Bx[maps.idx(imid, j)]));
}

TEST_CASE("mw_field_at scales with the drive amplitudes") {
    const CPWSpec spec;
    const CPWResult r = analyze_cpw(spec, coarse_window());
    const auto zero = mw_field_at(r, 0.0, 0.0, 0.2e-6, 1.9e-6);
    CHECK(zero.Bx == 0.0);
    CHECK(zero.Ez == 0.0);
    // sqrt(lambda) scaling of the drive: lambda = 0.25 halves the amplitudes
    const double V1 = 1.9895, I1 = 15.343e-3;
    const auto full = mw_field_at(r, V1, I1, 0.2e-6, 1.9e-6);
    const auto quarter = mw_field_at(r, std::sqrt(0.25) * V1, std::sqrt(0.25) * I1, 0.2e-6, 1.9e-6);
    CHECK(quarter.Bx == doctest::Approx(0.5 * full.Bx));
    CHECK(quarter.Ez == doctest::Approx(0.5 * full.Ez));
    CHECK_THROWS(mw_field_at(r, 1.0, 1.0, 1.0, 1.0));  // outside the window
}

TEST_CASE("uniform-current assumption is guarded by the skin depth") {
    CPWSpec spec;
    spec.thickness = 2e-6;  // thicker than the 0.91 um skin depth
    CHECK_THROWS(spec.validate());
}
