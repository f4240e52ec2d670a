#ifndef CHIPGATE_EIGENSTATES_HPP
#define CHIPGATE_EIGENSTATES_HPP

#include <vector>

#include "chipgate/states.hpp"

namespace chipgate {

enum class Well { left, right };

struct EigensolveOptions {
    int max_iters = 60000;
    double energy_tol = 1e-13;          // relative, per refinement stage
    double relax_time_periods = 0.08;   // post-mask relaxation, units of 2pi/omega_est
    double max_splitting_rate = 2500.0; // rad/s; localized pair must rotate slower
    bool check_splitting = true;
};

/// Lowest localized state of the requested well: imaginary-time propagation
/// under a half-domain wall, then relaxed on the true potential. For a
/// single-well potential the mask is skipped.
Wavefunction1D ground_state_in_well(const std::vector<double>& V, const SpatialGrid1D& grid,
                                    Well which, const EigensolveOptions& opts = {},
                                    const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Localized well states up to n_max (inclusive), orthonormal, energies set.
/// Requesting states above the barrier top is an error.
std::vector<Wavefunction1D> well_eigenstates(const std::vector<double>& V,
                                             const SpatialGrid1D& grid, Well which, int n_max,
                                             const EigensolveOptions& opts = {},
                                             const PhysicalConstants& pc = PhysicalConstants::rb87());

/// H psi for the 1D grid Hamiltonian (spectral kinetic term).
std::vector<cplx> apply_hamiltonian(const std::vector<cplx>& psi, const std::vector<double>& V,
                                    const SpatialGrid1D& grid,
                                    const PhysicalConstants& pc = PhysicalConstants::rb87());

double energy_expectation(const Wavefunction1D& psi, const std::vector<double>& V,
                          const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif
