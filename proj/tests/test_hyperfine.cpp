#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chipgate/hyperfine.hpp"

using namespace chipgate;

namespace {
const PhysicalConstants pc = PhysicalConstants::rb87();

// Clebsch-Gordan oracle for I=3/2, J=1/2: expand |F,m> over |m_I, m_J> and
// apply the spin-1/2 operators directly.
double cg_up(int F, int m) {
    return F == 2 ? std::sqrt((2.0 + m) / 4.0) : -std::sqrt((2.0 - m) / 4.0);
}
double cg_dn(int F, int m) {
    return F == 2 ? std::sqrt((2.0 - m) / 4.0) : std::sqrt((2.0 + m) / 4.0);
}

double oracle_Jq(int m1, int m2) {
    const int q = m2 - m1;
    // amplitudes on |m_I = m - 1/2, up> and |m_I = m + 1/2, dn>
    if (q == 0) return 0.5 * cg_up(2, m2) * cg_up(1, m1) - 0.5 * cg_dn(2, m2) * cg_dn(1, m1);
    if (q == 1) return -(1.0 / std::sqrt(2.0)) * cg_up(2, m2) * cg_dn(1, m1);
    if (q == -1) return (1.0 / std::sqrt(2.0)) * cg_dn(2, m2) * cg_up(1, m1);
    return 0.0;
}
}  // namespace

TEST_CASE("zeeman potential of the qubit pair") {
    // 0.6998 MHz/G per unit g_F m_F; both qubit states shift by mu_B B / 2
    const double B = 3.230e-4;
    const double v1 = zeeman_potential(B, HyperfineLevel::qubit1(), pc);
    const double v0 = zeeman_potential(B, HyperfineLevel::qubit0(), pc);
    CHECK(v1 == doctest::Approx(v0));
    CHECK(v1 / pc.h == doctest::Approx(2.260e6).epsilon(2e-4));
    CHECK(zeeman_potential(0.0, HyperfineLevel::qubit1(), pc) == 0.0);
    CHECK_THROWS(zeeman_potential(1e-4, HyperfineLevel{1, 2}, pc));
}

TEST_CASE("polarization decomposition limits") {
    const Eigen::Vector3d axis(1, 0, 0);
    // parallel field -> pure pi
    const auto par = local_polarization_decompose(CVec3(1e-4, 0, 0), axis);
    CHECK(std::abs(par.pi_comp) == doctest::Approx(1e-4));
    CHECK(std::abs(par.sigma_plus) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(par.sigma_minus) == doctest::Approx(0.0).epsilon(1e-15));
    // transverse linear -> equal circular split
    const auto perp = local_polarization_decompose(CVec3(0, 0, 1e-4), axis);
    CHECK(std::abs(perp.sigma_plus) == doctest::Approx(std::abs(perp.sigma_minus)));
    CHECK(std::abs(perp.pi_comp) == doctest::Approx(0.0).epsilon(1e-15));
    // magnitude is preserved: |pi|^2 + |s+|^2 + |s-|^2 = |B|^2
    const auto mix = local_polarization_decompose(CVec3(3e-5, 4e-5, 5e-5), Eigen::Vector3d(0, 1, 1));
    const double total = std::norm(mix.pi_comp) + std::norm(mix.sigma_plus) + std::norm(mix.sigma_minus);
    CHECK(total == doctest::Approx(9e-10 + 16e-10 + 25e-10));
    CHECK_THROWS(local_polarization_decompose(CVec3(1e-4, 0, 0), Eigen::Vector3d(0, 0, 0)));
}

TEST_CASE("frame invariance of the polarization magnitudes") {
    const CVec3 B(2e-5, cxd(0, 1e-5), 4e-5);
    const Eigen::Vector3d axis = Eigen::Vector3d(1, 2, -1).normalized();
    const auto a = local_polarization_decompose(B, axis);
    // rotate both by 40 degrees about z
    Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const auto b = local_polarization_decompose(R.cast<cxd>() * B, R * axis);
    CHECK(std::abs(a.pi_comp) == doctest::Approx(std::abs(b.pi_comp)));
    CHECK(std::abs(a.sigma_plus) == doctest::Approx(std::abs(b.sigma_plus)));
    CHECK(std::abs(a.sigma_minus) == doctest::Approx(std::abs(b.sigma_minus)));
}

TEST_CASE("hyperfine matrix elements against the Clebsch-Gordan oracle") {
    for (int m1 = -1; m1 <= 1; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2)
            CHECK(hyperfine_J_matrix_element(m1, m2) == doctest::Approx(oracle_Jq(m1, m2)));
    // |<2,0|Jz|1,0>| = 1/2 and the Delta m = 0 selection on stretched states
    CHECK(std::fabs(hyperfine_J_matrix_element(0, 0)) == doctest::Approx(0.5));
    CHECK(hyperfine_J_matrix_element(1, 2) != 0.0);   // sigma+ allowed
    CHECK(hyperfine_J_matrix_element(-1, 1) == 0.0);  // |Delta m| = 2 forbidden
}

TEST_CASE("rabi frequency selection rules and linearity") {
    PolarizationComponents pol;
    pol.pi_comp = 1e-4;
    pol.sigma_plus = 0.5e-4;
    pol.sigma_minus = 0.25e-4;
    CHECK(std::abs(rabi_frequency(-1, 1, pol, pc)) == 0.0);  // Delta m = 2
    const cxd r1 = rabi_frequency(0, 0, pol, pc);
    PolarizationComponents pol2 = pol;
    pol2.pi_comp *= 2.0;
    CHECK(std::abs(rabi_frequency(0, 0, pol2, pc)) == doctest::Approx(2.0 * std::abs(r1)));
    // pi matrix element magnitude: mu_B g_J |<2,0|Jz|1,0>| B / hbar
    CHECK(std::abs(r1) == doctest::Approx(pc.mu_B * pc.g_J * 0.5 * 1e-4 / pc.hbar));
}

TEST_CASE("transition detunings") {
    const double d0 = 2.0 * pi * 29.4e6;
    CHECK(transition_detuning(0, 0, d0, 1e-4, pc) == d0);  // clock transition
    const double B = 3.23e-4;
    const double shift = pc.mu_B * B / (2.0 * pc.hbar);
    CHECK(transition_detuning(0, 1, d0, B, pc) == doctest::Approx(d0 - shift));
    CHECK(shift / (2.0 * pi) == doctest::Approx(2.260e6).epsilon(2e-3));
    // odd symmetry under m1 + m2 sign flip
    const double up = transition_detuning(1, 1, d0, B, pc) - d0;
    const double dn = transition_detuning(-1, -1, d0, B, pc) - d0;
    CHECK(up == doctest::Approx(-dn));
}

TEST_CASE("single pi transition potential magnitude") {
    // Omega = 2 pi 1 MHz on |1,0> -> |2,0| with Delta = 2 pi 25 MHz gives
    // hbar Omega^2 / 4 Delta = h x 10 kHz
    const double omega_target = 2.0 * pi * 1e6;
    const double B_pi = omega_target * pc.hbar / (pc.mu_B * pc.g_J * 0.5);
    PolarizationComponents pol;
    pol.pi_comp = B_pi;
    const double B0 = 0.0;  // pi transition at m1 + m2 = 0: no Zeeman shift of the detuning
    const double delta0 = 2.0 * pi * 25e6;
    const double v = mw_potential_F1(0, pol, delta0, B0, nullptr, pc);
    CHECK(v == doctest::Approx(pc.h * 10e3).epsilon(1e-9));
}

TEST_CASE("microwave potentials: sign structure and state selectivity") {
    PolarizationComponents pol;
    pol.pi_comp = 1.5e-4;
    pol.sigma_plus = 1.0e-4;
    pol.sigma_minus = 0.8e-4;
    const double B0 = 3.23e-4;
    const double d0 = 2.0 * pi * 29.4e6;  // blue detuned on all transitions
    RegimeMonitor mon;
    const double v_f1 = mw_potential_F1(-1, pol, d0, B0, &mon, pc);
    const double v_f2 = mw_potential_F2(+1, pol, d0, B0, &mon, pc);
    CHECK(v_f1 >= 0.0);
    CHECK(v_f2 <= 0.0);
    CHECK(mon.max_ratio_sq > 0.0);
    CHECK(mon.max_ratio_sq < 1e-2);
    // zero field -> zero potential
    PolarizationComponents zero;
    CHECK(mw_potential_F1(-1, zero, d0, B0, nullptr, pc) == 0.0);
    CHECK(mw_potential_F2(+1, zero, d0, B0, nullptr, pc) == 0.0);
}

TEST_CASE("perturbative-regime hard guard") {
    PolarizationComponents pol;
    pol.pi_comp = 0.5e-2;  // enormous drive
    CHECK_THROWS(mw_potential_F1(-1, pol, 2.0 * pi * 29.4e6, 3.23e-4, nullptr, pc));
}

TEST_CASE("electric microwave potential") {
    CHECK(electric_mw_potential(0.0, pc) == 0.0);
    const double v1 = electric_mw_potential(1e5, pc);
    const double v2 = electric_mw_potential(2e5, pc);
    CHECK(v1 < 0.0);
    CHECK(v2 == doctest::Approx(4.0 * v1));
    CHECK(v1 == doctest::Approx(-0.25 * pc.alpha_dc * 1e10));
}
