#ifndef CHIPGATE_HYPERFINE_HPP
#define CHIPGATE_HYPERFINE_HPP

#include <Eigen/Dense>
#include <complex>

#include "chipgate/constants.hpp"

namespace chipgate {

using cxd = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

/// Ground-state hyperfine level of 87Rb (I = 3/2, J = 1/2).
struct HyperfineLevel {
    int F = 1;
    int mF = 0;

    void validate() const;
    static HyperfineLevel qubit0() { return {1, -1}; }
    static HyperfineLevel qubit1() { return {2, +1}; }
};

/// Linear Zeeman shift V_Z = mu_B g_F m_F |B|; both qubit states map to
/// +mu_B |B| / 2.
double zeeman_potential(double B_magnitude, const HyperfineLevel& level,
                        const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Microwave magnetic amplitude resolved along the local quantization axis:
/// pi along B0, sigma+/- the two circular components transverse to it.
struct PolarizationComponents {
    cxd pi_comp{};          // T
    cxd sigma_plus{};       // T
    cxd sigma_minus{};      // T
};
PolarizationComponents local_polarization_decompose(const CVec3& B_mw, const Eigen::Vector3d& B0_dir);

/// <2,m2| J_q |1,m1> in the coupled basis (Condon-Shortley), q = m2 - m1.
double hyperfine_J_matrix_element(int m1, int m2);

/// Rabi frequency of |1,m1> -> |2,m2> for the given polarization content.
/// Zero when |m2 - m1| > 1 (selection rule).
cxd rabi_frequency(int m1, int m2, const PolarizationComponents& pol,
                   const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Detuning from the |1,m1> -> |2,m2> resonance at static field |B0|.
double transition_detuning(int m1, int m2, double delta0, double B0_magnitude,
                           const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Tracks the worst |Omega/Delta|^2 seen while assembling potentials; the
/// perturbative treatment is invalid above ratio 0.3 (hard error).
struct RegimeMonitor {
    double max_ratio_sq = 0.0;
    void record(double ratio_sq);
    bool warned() const { return max_ratio_sq > 1e-2; }
};

/// Magnetic microwave potential of |1,m1>: (hbar/4) sum_m2 |Omega|^2 / Delta.
double mw_potential_F1(int m1, const PolarizationComponents& pol, double delta0,
                       double B0_magnitude, RegimeMonitor* monitor = nullptr,
                       const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Magnetic microwave potential of |2,m2>: -(hbar/4) sum_m1 |Omega|^2 / Delta.
double mw_potential_F2(int m2, const PolarizationComponents& pol, double delta0,
                       double B0_magnitude, RegimeMonitor* monitor = nullptr,
                       const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Time-averaged quadratic Stark shift -(alpha/4)|E|^2, level independent.
double electric_mw_potential(double E_amplitude,
                             const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif
