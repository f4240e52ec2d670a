#ifndef CHIPGATE_CONTROL_HPP
#define CHIPGATE_CONTROL_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "chipgate/potentials.hpp"
#include "chipgate/propagator.hpp"
#include "chipgate/states.hpp"
#include "chipgate/waveform.hpp"

namespace chipgate {

// ---------------------------------------------------------------------------
// Stage 1: lambda(t) on the interaction-free single-particle problem
// ---------------------------------------------------------------------------

struct Stage1Options {
    int max_iterations = 50;
    double convergence_tol = 1e-8;   // objective gain per iteration
    double first_update_max = 0.05;  // auto-scales the penalty weight
    double monotonic_tol = 1e-12;
    int max_retries = 12;
    double edge_fraction = 0.02;     // update shape ramps to zero at the ends
    double min_initial_objective = 0.5;
};

struct Stage1Result {
    Waveform lambda;
    std::vector<double> objective_history;  // J after each accepted iteration
    std::array<double, 2> overlaps{};       // |O_0|, |O_1| at tau_g
    double penalty = 0.0;
    bool hit_iteration_limit = false;
};

/// Krotov optimization of the revival overlaps of both single-particle
/// branches, interactions off. The trial must already lie in a working basin.
Stage1Result stage1_optimize(const PotentialSet& pots, const TimeGrid& tgrid,
                             const Waveform& lambda_trial, const Stage1Options& opts = {},
                             const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Combined single-particle revival objective of a control without any
/// optimization (used to place the trial ramp period).
double stage1_objective(const PotentialSet& pots, const TimeGrid& tgrid, const Waveform& lambda,
                        const PhysicalConstants& pc = PhysicalConstants::rb87());

// ---------------------------------------------------------------------------
// Transverse-frequency tuning and stage 2
// ---------------------------------------------------------------------------

struct TuneOptions {
    double target_phase = pi;  // phi_11 at tau_g
    double tolerance = 2e-3;   // rad
    int max_evaluations = 24;
    double scale_min = 0.3, scale_max = 3.5;
};

struct TuneResult {
    double omega_factor = 1.0;  // multiplies the omega_perp profile
    double phi11 = 0.0;
    int evaluations = 0;
};

/// Scales omega_perp(0) until the collisional phase of the 11 branch meets
/// the target, with lambda fixed.
TuneResult tune_omega_perp(const PotentialSet& pots, const TimeGrid& tgrid,
                           const Waveform& lambda, const InteractionSpec& interaction,
                           const TwoParticleState& psi0, const TuneOptions& opts = {},
                           const PhysicalConstants& pc = PhysicalConstants::rb87());

struct Stage2Options {
    double amplitude_bound = 0.2;   // A in omega(t) = omega0 [A tanh(alpha) + 1]
    double cutoff_factor = 0.8;     // omega_c / omega_perp(0)
    int max_iterations = 25;
    double convergence_tol = 1e-7;
    double first_update_max = 0.05;
    double monotonic_tol = 1e-12;
    int max_retries = 10;
    double edge_fraction = 0.02;
    double filter_degradation_warn = 0.01;
};

struct Stage2Result {
    Waveform omega_scale;   // filtered omega(t)/omega_perp(0), within 1 +- A
    Waveform alpha;         // raw dimensionless control
    std::vector<double> objective_history;
    double F11 = 0.0;             // after filtering, re-simulated
    double phi11 = 0.0;           // after filtering, re-simulated
    double F11_unfiltered = 0.0;
    double phi11_target = 0.0;
    bool filter_warning = false;
};

/// Krotov optimization of F_11 and phi_11 through the bounded tanh
/// parameterization of omega_perp(t), followed by spectral filtering and a
/// re-simulation with the filtered control.
Stage2Result stage2_optimize(const PotentialSet& pots, const TimeGrid& tgrid,
                             const Waveform& lambda, double omega_factor,
                             const InteractionSpec& interaction, const TwoParticleState& psi0,
                             double phi11_target, const Stage2Options& opts = {},
                             const PhysicalConstants& pc = PhysicalConstants::rb87());

// ---------------------------------------------------------------------------
// Waveform conditioning
// ---------------------------------------------------------------------------

/// Removes Fourier components above omega_c; endpoints re-pinned by linear
/// detrend/retrend, DC preserved up to the endpoint correction.
Waveform spectral_filter(const Waveform& wf, double omega_c);

/// Transverse excitation probability under the modulated harmonic
/// confinement, from the exact Gaussian (Ermakov) evolution. The waveform
/// carries omega_perp(t)/omega_perp(0); the result is p(t).
Waveform parametric_excitation_probability(const Waveform& omega_scale, double omega_perp0);

/// Per-sample multiplicative Gaussian noise of relative rms n_a.
Waveform inject_control_noise(const Waveform& wf, double n_a, std::uint64_t seed,
                              bool clamp_unit_interval = false);

}  // namespace chipgate

#endif
