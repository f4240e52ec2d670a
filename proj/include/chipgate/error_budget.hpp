#ifndef CHIPGATE_ERROR_BUDGET_HPP
#define CHIPGATE_ERROR_BUDGET_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "chipgate/constants.hpp"

namespace chipgate {

/// Breit-Rabi level energy of |F, m> at static field B (J). Exact ground-state
/// spectrum for I = 3/2, J = 1/2 including the nuclear moment.
double breit_rabi_energy(int F, int m, double B, const PhysicalConstants& pc = PhysicalConstants::rb87());

struct BreitRabiLevels {
    // order: (1,-1), (1,0), (1,+1), (2,-2), (2,-1), (2,0), (2,+1), (2,+2)
    std::array<double, 8> energy;  // J
    static constexpr std::array<std::pair<int, int>, 8> labels = {
        {{1, -1}, {1, 0}, {1, 1}, {2, -2}, {2, -1}, {2, 0}, {2, 1}, {2, 2}}};
};
BreitRabiLevels breit_rabi_energies(double B, const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Differential magnetic moment d(E_1 - E_0)/dB of the qubit pair (J/T).
double differential_moment(double B, const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Field where the differential moment vanishes (the magic field), found
/// between lo and hi by bisection.
double magic_field(double lo = 0.5e-4, double hi = 6e-4,
                   const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Microwave-induced shift of the differential moment (J/T).
double mw_moment_shift(double omega_rabi, double delta,
                       const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Dephasing time hbar / (dmu * dB); infinite when either input vanishes.
double dephasing_time(double dmu, double dB, const PhysicalConstants& pc = PhysicalConstants::rb87());

struct SurfaceLoss {
    double error = 0.0;          // 1 - exp(-Gamma_s tau_g)
    double trap_lifetime = 0.0;  // 1/Gamma_s
};
SurfaceLoss surface_loss_error(double gamma_s, double tau_g);

/// Two-photon suppression ratio (Omega_2ph / Delta_2ph)^2.
double two_photon_suppression(double omega_r1, double omega_r2, double delta, double B0,
                              const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Microwave admixture shift of the scattering length (m).
double scattering_length_shift(double omega_r, double delta, double a_s_11, double a_s_01);

struct Quasi1DCheck {
    double ratio = 0.0;  // 2 E_kin / (hbar omega_perp)
    bool pass = false;
    bool headroom = false;  // ratio <= 0.7
};
Quasi1DCheck quasi1d_check(double e_kin, double omega_perp,
                           const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Largest |Omega/Delta|^2 over the sampled maps.
double large_detuning_check(std::span<const double> ratio_sq_samples);

struct ErrorBudgetEntry {
    std::string name;
    double value = 0.0;
    std::string formula;
    std::string inputs;
};

struct ErrorBudget {
    std::vector<ErrorBudgetEntry> entries;
    void add(std::string name, double value, std::string formula, std::string inputs);
    /// 1 - prod(1 - e_k) over independent entries.
    double aggregate() const;
};

}  // namespace chipgate

#endif
