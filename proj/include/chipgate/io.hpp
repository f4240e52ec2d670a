#ifndef CHIPGATE_IO_HPP
#define CHIPGATE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "chipgate/cpw.hpp"
#include "chipgate/potentials.hpp"
#include "chipgate/propagator.hpp"
#include "chipgate/waveform.hpp"

namespace chipgate::io {

namespace fs = std::filesystem;

// CSV artifacts ---------------------------------------------------------------

void write_potential_csv(const fs::path& path, const PotentialSet& pot);
void write_potential_meta(const fs::path& path, const PotentialSet& pot);
PotentialSet load_potential(const fs::path& csv, const fs::path& meta);

/// Columns t, lambda0, lambda, delta_lambda, omega_perp_scale.
void write_waveforms_csv(const fs::path& path, const Waveform& lambda0, const Waveform& lambda,
                         const Waveform& omega_scale);
struct LoadedWaveforms {
    Waveform lambda0, lambda, omega_scale;
};
LoadedWaveforms load_waveforms_csv(const fs::path& path);

/// Columns t, F_00, F_01, F_10, F_11, phi_g, norm_00..norm_11.
void write_trajectory_csv(const fs::path& path, const GateTrajectory& traj);

/// Columns T, kT_over_hbar_omega, one_minus_F.
void write_ft_csv(const fs::path& path, const std::vector<std::array<double, 3>>& rows);

/// Columns x, z, Bx, By, Bz, Ex, Ez (per unit drive).
void write_fieldmap_csv(const fs::path& path, const FieldMap2D& maps, std::size_t stride = 4);

// binary snapshots -------------------------------------------------------------
// layout: magic "CGW2" u32, n u64, x_min f64, x_max f64, t f64, then n*n
// complex amplitudes as row-major (re, im) f64 pairs.

void write_state_snapshot(const fs::path& path, const TwoParticleState& state, double t);
TwoParticleState read_state_snapshot(const fs::path& path, double* t_out = nullptr);

// geometry --------------------------------------------------------------------

ChipConfig load_geometry(const fs::path& path);
void write_geometry(const fs::path& path, const ChipConfig& chip);

// misc ------------------------------------------------------------------------

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace chipgate::io

#endif
