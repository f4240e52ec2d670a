#ifndef CHIPGATE_PROPAGATOR_HPP
#define CHIPGATE_PROPAGATOR_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "chipgate/potentials.hpp"
#include "chipgate/states.hpp"
#include "chipgate/waveform.hpp"

namespace chipgate {

/// In-place complex FFTs on the grid; plans are shared per size and
/// thread-safe to execute.
class FourierWorkspace {
  public:
    explicit FourierWorkspace(std::size_t n);
    ~FourierWorkspace();
    FourierWorkspace(const FourierWorkspace&) = delete;
    FourierWorkspace& operator=(const FourierWorkspace&) = delete;

    void forward_1d(cplx* data) const;
    void inverse_1d(cplx* data) const;  // unscaled
    void forward_2d(cplx* data) const;
    void inverse_2d(cplx* data) const;  // unscaled

    std::size_t size() const { return n_; }

  private:
    std::size_t n_;
    void* plan_f1_;
    void* plan_b1_;
    void* plan_f2_;
    void* plan_b2_;
};

/// Symmetric split-operator step for one particle; time_phase is dt for real
/// time and -i*dtau for imaginary time.
class SplitOperator1D {
  public:
    SplitOperator1D(const SpatialGrid1D& grid, double mass, cplx time_step,
                    const PhysicalConstants& pc = PhysicalConstants::rb87());

    void step(std::vector<cplx>& psi, const std::vector<double>& V);
    double kinetic_energy(const std::vector<cplx>& psi) const;
    double max_phase_per_step(double vmax) const;

  private:
    SpatialGrid1D grid_;
    double hbar_;
    cplx time_step_;
    std::shared_ptr<FourierWorkspace> fft_;
    std::vector<cplx> kin_phase_;     // includes the inverse-FFT 1/n
    std::vector<double> ksq_;         // (hbar k)^2 / 2m
    std::vector<cplx> half_buf_;
};

/// Symmetric split-operator step for the two-particle amplitude. The
/// potential enters as row + column arrays plus the contact-interaction
/// diagonal.
class SplitOperator2D {
  public:
    SplitOperator2D(const SpatialGrid1D& grid, double mass, cplx time_step,
                    const PhysicalConstants& pc = PhysicalConstants::rb87());

    /// V1 acts on x1 (rows), V2 on x2 (columns); gdiag (J, may be null) is
    /// the on-site interaction energy g1d(x)/dx along x1 = x2.
    void step(std::vector<cplx>& psi, const std::vector<double>& V1,
              const std::vector<double>& V2, const std::vector<double>* gdiag);

    double kinetic_energy(const std::vector<cplx>& psi) const;        // <T1 + T2>
    double kinetic_energy_one(const std::vector<cplx>& psi) const;    // <T1>
    const SpatialGrid1D& grid() const { return grid_; }

  private:
    void apply_half_potential(std::vector<cplx>& psi, const std::vector<double>& V1,
                              const std::vector<double>& V2, const std::vector<double>* gdiag);

    SpatialGrid1D grid_;
    double hbar_;
    cplx time_step_;
    std::shared_ptr<FourierWorkspace> fft_;
    std::vector<cplx> kin_phase_;  // n*n, includes the inverse-FFT 1/n^2
    std::vector<double> ksq_;      // (hbar k)^2 / 2m per axis index
    std::vector<cplx> row_phase_, col_phase_, diag_phase_;
    mutable std::vector<cplx> scratch_;
};

// ---------------------------------------------------------------------------
// Contact interaction
// ---------------------------------------------------------------------------

/// Olshanii effective 1D coupling (J m) with the confinement correction.
double g1d_strength(double a_s, double omega_perp,
                    const PhysicalConstants& pc = PhysicalConstants::rb87());
double transverse_length(double omega_perp, const PhysicalConstants& pc = PhysicalConstants::rb87());

struct InteractionSpec {
    double a_s_00 = 5.4e-9;
    double a_s_01 = 5.4e-9;
    double a_s_11 = 5.4e-9;
    bool enabled = true;
    bool symmetrized_coordinate = false;  // omega_perp at (x1+x2)/2 instead of x1

    double a_s(int i, int j) const { return i + j == 0 ? a_s_00 : (i + j == 1 ? a_s_01 : a_s_11); }
};

// ---------------------------------------------------------------------------
// Gate dynamics
// ---------------------------------------------------------------------------

struct SectorRunOptions {
    std::size_t sample_every = 50;
    bool record_kinetic = false;
    double norm_tolerance = 1e-6;
    double phase_floor = 1e-6;  // |<psi|psi0>| below which the phase is unreliable
};

/// Time series of one basis-state branch propagated together with its
/// collision-free reference.
struct SectorTrajectory {
    std::vector<double> times;
    std::vector<cplx> overlap;         // O_ij(t) = <psi(t)|psi(0)>
    std::vector<double> fidelity;      // |O|^2
    std::vector<double> phase;         // unwrapped arg<psi|psi_ref>
    std::vector<uint8_t> phase_ok;     // cross overlap above the floor
    std::vector<double> norm;
    std::vector<double> kinetic_one;   // <T1>, when recorded
    std::vector<double> separation;    // <|x1 - x2|>, when recorded
    TwoParticleState final_state;
    TwoParticleState final_reference;
};

struct GateControls {
    Waveform lambda;                       // microwave modulation, in [0,1]
    std::optional<Waveform> lambda0;       // compensation modulation; defaults to lambda
    std::optional<Waveform> omega_scale;   // omega_perp(t)/omega_perp(0); defaults to 1
};

class GatePropagator {
  public:
    GatePropagator(const PotentialSet& pots, TimeGrid tgrid,
                   const PhysicalConstants& pc = PhysicalConstants::rb87());

    /// Propagates sector (i,j) and its a_s = 0 reference in lockstep.
    SectorTrajectory run_sector(int i, int j, const TwoParticleState& psi0,
                                const GateControls& controls, const InteractionSpec& interaction,
                                const SectorRunOptions& opts = {}) const;

    const PotentialSet& potentials() const { return *pots_; }
    TimeGrid time_grid() const { return tgrid_; }

  private:
    const PotentialSet* pots_;
    TimeGrid tgrid_;
    PhysicalConstants pc_;
};

struct GateTrajectory {
    TimeGrid tgrid;
    std::vector<double> times;
    // sector order 00, 01, 10, 11
    std::array<SectorTrajectory, 4> sectors;
    std::vector<double> phi_g;
    std::array<cplx, 4> O_end{};
    std::array<double, 4> F_end{};
    std::array<double, 4> phi_end{};
    double phi_g_end = 0.0;

    static constexpr std::array<std::pair<int, int>, 4> sector_labels = {
        {{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
};

struct GateSimOptions {
    SectorRunOptions sector;
    unsigned jobs = 2;
};

/// Normalized (1 + P12) symmetrization of a labeled pair state.
TwoParticleState symmetrized_pair(const TwoParticleState& labeled);

/// All four basis-state branches plus references. psi0 is the labeled state
/// (atom 1 left, atom 2 right); the 00 and 11 branches propagate its
/// exchange-symmetric combination, since their atoms share an internal state.
GateTrajectory simulate_gate(const PotentialSet& pots, const TimeGrid& tgrid,
                             const GateControls& controls, const InteractionSpec& interaction,
                             const TwoParticleState& psi0, const GateSimOptions& opts = {},
                             const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Largest single-atom kinetic energy at the detected collisions (separation
/// minima) of the 11 branch within [t_lo, t_hi].
double kinetic_energy_estimate(const SectorTrajectory& traj11, double t_lo, double t_hi);

/// Interacting two-particle ground state by imaginary-time propagation.
struct GroundState2D {
    TwoParticleState state;
    double energy = 0.0;  // J
};
GroundState2D two_particle_ground_state(const std::vector<double>& V, const SpatialGrid1D& grid,
                                        double g1d, int max_iters = 40000,
                                        double tol = 1e-14,
                                        const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif
