#ifndef CHIPGATE_POTENTIALS_HPP
#define CHIPGATE_POTENTIALS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chipgate/cpw.hpp"
#include "chipgate/grid.hpp"
#include "chipgate/waveform.hpp"
#include "chipgate/wires.hpp"

namespace chipgate {

/// State-dependent potentials sampled along the double-well axis.
/// U_i(x,t) = u_c(x) + lambda(t) u_i(x) + lambda0(t) u_comp(x); u_comp is the
/// state-independent trap adjustment carried by the compensation ramps (zero
/// for the analytic model).
struct PotentialSet {
    SpatialGrid1D grid;
    std::vector<double> u_c;         // J
    std::vector<double> u_0;         // J
    std::vector<double> u_1;         // J
    std::vector<double> u_comp;      // J
    std::vector<double> omega_perp;  // rad/s
    double well_separation = 0.0;    // d_x of u_c minima, m
    double omega_x = 0.0;            // rad/s
    double omega_state0 = 0.0;       // rad/s, wells of u_c + u_0 (+ u_comp), lambda = 1
    double omega_state1 = 0.0;       // rad/s, single well of u_c + u_1 (+ u_comp), lambda = 1
    double barrier_height = 0.0;     // J above the well minima
    double tilt_angle = 0.0;         // axis tilt against x, chip runs
    double max_mw_ratio_sq = 0.0;    // worst |Omega/Delta|^2 sampled
    std::string provenance;          // "chip" | "model"

    std::vector<double> omega_perp_profile_scaled(double scale) const;
    /// Type invariants: symmetric double well in u_c, one minimum for state 1,
    /// farther-apart minima for state 0 (checked at lambda = 1).
    void validate(double depth_tolerance = 1e-3) const;
};

/// Interior local minima of a sampled curve (indices). Minima separated by a
/// barrier smaller than min_barrier are merged (keeps the lower); this ignores
/// sub-resolution kinks of interpolated field maps.
std::vector<std::size_t> local_minima(const std::vector<double>& values,
                                      double min_barrier = 0.0);

/// Minima with the barrier threshold taken as a fraction of the value range.
std::vector<std::size_t> distinct_wells(const std::vector<double>& values,
                                        double barrier_fraction = 1e-3);

struct QuadraticFit {
    double x_min = 0.0;       // vertex position
    double curvature = 0.0;   // d2u/dx2 at the vertex, J/m^2
    double value = 0.0;       // u at the vertex
    double frequency = 0.0;   // sqrt(curvature/m), rad/s
};
/// Least-squares parabola over +-window points around index i0.
QuadraticFit fit_well(const std::vector<double>& u, const SpatialGrid1D& grid, std::size_t i0,
                      int window, double mass);

// ---------------------------------------------------------------------------
// Analytic model potential (chip-free runs)
// ---------------------------------------------------------------------------

struct ModelPotentialParams {
    double omega_x = 2.0 * pi * 4.432e3;       // rad/s
    double d_x = 1.32e-6;                      // m
    double omega_state1 = 2.0 * pi * 5.448e3;  // rad/s
    double omega_state0 = 2.0 * pi * 4.775e3;  // rad/s
    double omega_perp0 = 2.0 * pi * 77.46e3;   // rad/s
    double sigma1_factor = 1.0;                // u_1 width / (d_x/2)
    double sigma0_factor = 1.0;                // u_0 width / (d_x/2)
    double potential_cap = 3.3e-28;            // J, tames the quartic tails
    double calibration_tolerance = 1e-3;
    int fit_window = 5;
    SpatialGrid1D grid = SpatialGrid1D{-2e-6, 2e-6, 256};
};

/// Quartic double well with Gaussian state-dependent terms calibrated to the
/// requested well frequencies.
PotentialSet model_potential_set(const ModelPotentialParams& params,
                                 const PhysicalConstants& pc = PhysicalConstants::rb87());

// ---------------------------------------------------------------------------
// Chip-derived potentials
// ---------------------------------------------------------------------------

/// B_x(t) and I_C(t) adjustments, exactly linear in lambda_0.
struct CompensationRamps {
    double Bx_base = -4.464e-4;   // T
    double Bx_slope = 0.036e-4;   // T per unit lambda_0
    double Ic_base = -0.813e-3;   // A
    double Ic_slope = -0.039e-3;  // A per unit lambda_0

    std::pair<double, double> eval(double lambda0) const {
        return {Bx_base + lambda0 * Bx_slope, Ic_base + lambda0 * Ic_slope};
    }
};

/// Ramp waveforms (B_x(t), I_C(t)) for a given modulation lambda_0(t).
std::pair<Waveform, Waveform> compensation_ramps(const Waveform& lambda0,
                                                 const CompensationRamps& ramps = {});

struct ChipConfig {
    std::vector<WireSegment> wires;
    BiasField bias;
    CPWSpec cpw;
    int center_wire = -1;  // wire index whose DC current follows the ramp
    CompensationRamps ramps;
    bool apply_compensation = true;
    double delta0 = 2.0 * pi * 29.4e6;  // rad/s
    double V0_full = 1.9895;            // V on the CPW at lambda = 1
    double I0_full = 15.343e-3;         // A at lambda = 1
    Vec3 cpw_origin = Vec3(0, 0, 0);    // global position of the map origin
    Vec3 search_start = Vec3(0, 0, 1.9e-6);

    bool drive_is_same(const ChipConfig& o) const {
        return V0_full == o.V0_full && I0_full == o.I0_full && delta0 == o.delta0;
    }

    /// Static field including the compensation state at modulation lambda_0.
    Vec3 static_field(const Vec3& point, double lambda0,
                      const PhysicalConstants& pc = PhysicalConstants::rb87()) const;
};

struct AssembleOptions {
    SpatialGrid1D grid = SpatialGrid1D{-2e-6, 2e-6, 256};
    int fit_window = 5;
    double hessian_step = 10e-9;  // m
    double depth_tolerance = 5e-2;
};

/// Samples u_c along the softest axis of the static trap, evaluates the
/// dressed-state and Stark terms from the CPW maps at full drive, and reports
/// the trap characterization (d_x, frequencies, tilt).
PotentialSet assemble_potential_set(const ChipConfig& chip, const CPWResult& cpw_result,
                                    const AssembleOptions& opts = {},
                                    const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif
