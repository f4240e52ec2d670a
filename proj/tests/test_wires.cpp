#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chipgate/wires.hpp"

using namespace chipgate;

namespace {
const PhysicalConstants pc = PhysicalConstants::rb87();

WireSegment long_wire_x(double I, double w = 0.8e-6, double t = 0.2e-6) {
    WireSegment seg;
    seg.start = Vec3(-5e-3, 0, 0);
    seg.end = Vec3(5e-3, 0, 0);
    seg.width = w;
    seg.thickness = t;
    seg.current = I;
    return seg;
}
}  // namespace

TEST_CASE("far field approaches the thin-wire law") {
    const auto seg = long_wire_x(0.1);
    for (double r : {20e-6, 50e-6, 100e-6}) {
        const Vec3 B = field_of_rectangular_wire(seg, Vec3(0, 0, r), nullptr, pc);
        const double expect = pc.mu_0 * seg.current / (2.0 * pi * r);
        CHECK(std::fabs(B.norm() - expect) / expect < 0.01);
        // wire along +x, point above: field along -y
        CHECK(B.y() < 0.0);
        CHECK(std::fabs(B.x()) < 1e-6 * B.norm());
    }
}

TEST_CASE("thin-wire convergence at 30x the conductor size") {
    const auto seg = long_wire_x(0.05);
    const double r = 30.0 * seg.width;
    const Vec3 p(0, r / std::sqrt(2.0), r / std::sqrt(2.0));
    const Vec3 B = field_of_rectangular_wire(seg, p, nullptr, pc);
    const Vec3 Bthin = filament_field(seg.start, seg.end, seg.current, p, pc);
    CHECK((B - Bthin).norm() / Bthin.norm() < 1e-3);
}

TEST_CASE("field vanishes on the symmetry component") {
    // wire along y: B has no y component anywhere off the conductor
    WireSegment seg;
    seg.start = Vec3(0, -5e-3, 0);
    seg.end = Vec3(0, 5e-3, 0);
    seg.width = 1e-6;
    seg.thickness = 0.5e-6;
    seg.current = 0.01;
    const Vec3 B = field_of_rectangular_wire(seg, Vec3(0.3e-6, 0, 2e-6), nullptr, pc);
    CHECK(std::fabs(B.y()) < 1e-9 * B.norm());
}

TEST_CASE("two opposite parallel wires superpose like thin wires at the midpoint") {
    const double d = 60e-6;
    WireSegment a = long_wire_x(0.02);
    a.start.z() = a.end.z() = +d / 2;
    WireSegment b = long_wire_x(-0.02);
    b.start.z() = b.end.z() = -d / 2;
    const Vec3 B = total_static_field({a, b}, BiasField{}, Vec3(0, 0, 0), pc);
    const Vec3 Bthin = filament_field(a.start, a.end, a.current, Vec3(0, 0, 0), pc) +
                       filament_field(b.start, b.end, b.current, Vec3(0, 0, 0), pc);
    CHECK((B - Bthin).norm() / Bthin.norm() < 0.01);
}

TEST_CASE("bias only returns the bias vector") {
    const BiasField bias{-4.464e-4, 103.717e-4, 0.0};
    const Vec3 B = total_static_field({}, bias, Vec3(1e-6, 2e-6, 3e-6), pc);
    CHECK(B.x() == doctest::Approx(-4.464e-4));
    CHECK(B.y() == doctest::Approx(103.717e-4));
    CHECK(B.z() == 0.0);
}

TEST_CASE("side-guide cancellation height") {
    // wire along x with perpendicular bias: wire field magnitude equals the
    // bias at z = mu0 I / (2 pi B)
    const double I = 0.348440;
    const double By = 103.717e-4;
    const auto seg = long_wire_x(I, 1.5e-6, 1.0e-6);
    const double z0 = pc.mu_0 * I / (2.0 * pi * By);
    const Vec3 Bwire = field_of_rectangular_wire(seg, Vec3(0, 0, z0), nullptr, pc);
    CHECK(std::fabs(Bwire.y()) == doctest::Approx(By).epsilon(5e-3));
    CHECK(std::fabs(Bwire.z()) < 1e-6 * std::fabs(Bwire.y()));
}

TEST_CASE("divergence-free on a sampled map") {
    const auto seg = long_wire_x(0.1);
    const double h = 50e-9;
    const Vec3 p0(0.4e-6, 0.2e-6, 2.1e-6);
    auto Bat = [&](const Vec3& p) { return field_of_rectangular_wire(seg, p, nullptr, pc); };
    double div = 0.0, grad_scale = 0.0;
    for (int d = 0; d < 3; ++d) {
        Vec3 e = Vec3::Zero();
        e[d] = h;
        const Vec3 plus = Bat(p0 + e), minus = Bat(p0 - e);
        div += (plus[d] - minus[d]) / (2.0 * h);
        grad_scale += (plus - minus).norm() / (2.0 * h);
    }
    CHECK(std::fabs(div) < 1e-3 * grad_scale);
}

TEST_CASE("inside flag and symmetric limit") {
    const auto seg = long_wire_x(0.1);
    bool inside = false;
    const Vec3 Bin = field_of_rectangular_wire(seg, Vec3(0, 0, 0), &inside, pc);
    CHECK(inside);
    // center of a symmetric conductor: contributions cancel
    CHECK(Bin.norm() < 1e-3 * pc.mu_0 * seg.current / (2.0 * pi * seg.width));
    field_of_rectangular_wire(seg, Vec3(0, 0, 10e-6), &inside, pc);
    CHECK_FALSE(inside);
}

TEST_CASE("linearity in the current") {
    const auto seg1 = long_wire_x(0.01);
    auto seg2 = seg1;
    seg2.current = 0.03;
    const Vec3 p(0.2e-6, 0.5e-6, 3e-6);
    const Vec3 B1 = field_of_rectangular_wire(seg1, p, nullptr, pc);
    const Vec3 B2 = field_of_rectangular_wire(seg2, p, nullptr, pc);
    CHECK((B2 - 3.0 * B1).norm() < 1e-12 * B1.norm());
}

TEST_CASE("invalid wires are rejected") {
    WireSegment seg = long_wire_x(0.1);
    seg.width = 0.0;
    CHECK_THROWS(field_of_rectangular_wire(seg, Vec3(0, 0, 1e-6), nullptr, pc));
    seg = long_wire_x(0.1);
    seg.end = seg.start;
    CHECK_THROWS(field_of_rectangular_wire(seg, Vec3(0, 0, 1e-6), nullptr, pc));
}
