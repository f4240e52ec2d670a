#ifndef CHIPGATE_CPW_HPP
#define CHIPGATE_CPW_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "chipgate/constants.hpp"

namespace chipgate {

/// Coplanar waveguide cross section: center conductor flanked by two ground
/// conductors in one metallization plane on a dielectric half-space.
struct CPWSpec {
    double center_width = 0.8e-6;   // m
    double gap = 0.1e-6;            // m
    double thickness = 0.2e-6;      // m
    double ground_width = 0.8e-6;   // m
    double sigma = 4.5e7;           // S/m
    double eps_r = 11.9;            // substrate below the conductor plane
    double omega = 2.0 * pi * 6.8e9;  // rad/s

    void validate() const;
};

/// Regular 2D mesh over the transverse (x,z) cross section with per-node
/// field samples. Conductor mid-plane sits at z in [0, thickness].
struct FieldMap2D {
    double x0 = 0, z0 = 0;
    double cell = 0;
    std::size_t nx = 0, nz = 0;
    // per unit drive: E per 1 V on the center conductor, B per 1 A total
    std::vector<double> Ex, Ez;  // V/m per V
    std::vector<double> Bx, Bz;  // T per A

    std::size_t idx(std::size_t i, std::size_t j) const { return j * nx + i; }
    double x(std::size_t i) const { return x0 + double(i) * cell; }
    double z(std::size_t j) const { return z0 + double(j) * cell; }
    bool contains(double x, double z) const;
    /// Bilinear interpolation; components absent from the map are zero.
    void sample(double x, double z, double& ex, double& ez, double& bx, double& bz) const;
};

struct CPWResult {
    std::complex<double> Zc;   // Ohm
    double R = 0;              // Ohm/m
    double L = 0;              // H/m
    double C = 0;              // F/m
    double beta_mw = 0;        // 1/m
    double alpha_mw = 0;       // 1/m
    FieldMap2D maps;
};

struct SolverWindow {
    double margin = 10e-6;  // beyond the outermost conductor edge, each side
    double cell = 20e-9;    // mesh spacing
    double tolerance = 1e-7;
    std::size_t max_sweeps = 200000;
};

double skin_depth(double omega, double sigma);

/// Electrostatic Laplace solve (V = 1 on center, 0 on grounds and window
/// boundary, dielectric half-space below the conductors). Returns C per unit
/// length and fills the E maps. C_mutual, when requested, is the
/// center-to-one-ground mutual capacitance (-Q_ground / V0).
double cpw_electrostatics(const CPWSpec& spec, const SolverWindow& window, FieldMap2D& maps,
                          double* C_mutual = nullptr);

/// Magneto-quasistatic solve with uniform current density (+1 A in the
/// center, -1/2 A in each ground; valid for thickness < skin depth).
/// Returns L per unit length and R per unit length, fills the B maps.
void cpw_magnetoquasistatics(const CPWSpec& spec, const SolverWindow& window, FieldMap2D& maps,
                             double& L, double& R);

/// Differential capacitance of an isolated rectangular-conductor pair in
/// vacuum (drive +-1/2 V), on the same mesh/relaxation kernel. Validation
/// anchor against the analytic parallel-cylinder capacitance.
double two_wire_capacitance(double width, double thickness, double separation,
                            const SolverWindow& window);

/// Z_c = sqrt((R + i w L)/(i w C)); gamma = sqrt((R + i w L)(i w C)).
void cpw_impedance(double R, double L, double C, double omega, std::complex<double>& Zc,
                   double& beta_mw, double& alpha_mw);

/// Full quasi-static characterization of the cross section.
CPWResult analyze_cpw(const CPWSpec& spec, const SolverWindow& window = SolverWindow{});

/// Microwave field amplitudes at a point of the cross section for drive
/// amplitudes |V0|, |I0|. Longitudinal components are neglected.
struct MwFieldSample {
    double Ex = 0, Ez = 0;  // V/m
    double Bx = 0, Bz = 0;  // T
};
MwFieldSample mw_field_at(const CPWResult& result, double V0, double I0, double x, double z);

}  // namespace chipgate

#endif
