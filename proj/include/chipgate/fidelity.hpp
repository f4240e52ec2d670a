#ifndef CHIPGATE_FIDELITY_HPP
#define CHIPGATE_FIDELITY_HPP

#include <array>
#include <span>
#include <vector>

#include "chipgate/states.hpp"

namespace chipgate {

/// Internal two-qubit amplitude over |00>, |01>, |10>, |11>.
struct InternalState {
    std::array<cplx, 4> amp{};
    double norm_sq() const;
    void normalize();
};

/// Bosonic symmetrizer S = (1 + P12)/2 acting on the composite
/// internal x motional state written as four motional fields.
std::array<TwoParticleState, 4> symmetrize_composite(const std::array<TwoParticleState, 4>& psi);

/// Endpoints of the four basis-state propagations for one initial motional
/// configuration. psi0 is the labeled product state (atom 1 left, atom 2
/// right); sectors 01 and 10 evolve it directly, while 00 and 11 evolve its
/// normalized exchange-symmetric combination (identical internal states).
struct SectorEndpoints {
    std::array<TwoParticleState, 4> psi;  // endpoints, order 00,01,10,11
    TwoParticleState psi0;                // labeled initial state
    double weight = 1.0;                  // P_{n1,n2}
};

enum class PhaseConvention {
    local_z_absorbed,  // ideal truth-table target with phi_g = pi, single-qubit
                       // Z rotations absorbed (measures the entangling error)
    strict_actual      // target carries the actual per-sector phases
};

struct ProcessFidelityOptions {
    PhaseConvention convention = PhaseConvention::local_z_absorbed;
    double target_phase = pi;
    int grid_points_per_angle = 5;
    int refine_iterations = 600;
    int random_restarts = 2;
};

struct ProcessFidelityResult {
    double fidelity = 1.0;
    InternalState minimizer;
};

/// Min-over-chi process fidelity with bosonic symmetrization and the motional
/// trace, over all normalized internal states (entangled included).
ProcessFidelityResult process_fidelity(std::span<const SectorEndpoints> configs,
                                       const ProcessFidelityOptions& opts = {});

/// Fidelity of one specific internal input (no minimization).
double state_fidelity(std::span<const SectorEndpoints> configs, const InternalState& chi,
                      const ProcessFidelityOptions& opts = {});

// ---------------------------------------------------------------------------
// Thermal ensemble
// ---------------------------------------------------------------------------

struct ThermalEnsemble {
    double temperature = 0.0;  // K
    double omega_x = 0.0;      // rad/s
    int n_max = 0;
    std::vector<double> p_single;   // renormalized within-well occupations
    double truncated_weight = 0.0;  // probability dropped by the cutoff
    bool truncation_warning = false;

    double occupation(int n1, int n2) const { return p_single.at(std::size_t(n1)) * p_single.at(std::size_t(n2)); }
};

ThermalEnsemble thermal_occupations(double T, double omega_x, int n_max,
                                    const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif
