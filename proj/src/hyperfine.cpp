#include "chipgate/hyperfine.hpp"

#include <cmath>
#include <stdexcept>

namespace chipgate {

void HyperfineLevel::validate() const {
    if (F != 1 && F != 2) throw std::invalid_argument("hyperfine: F must be 1 or 2");
    if (std::abs(mF) > F) throw std::invalid_argument("hyperfine: |mF| must not exceed F");
}

double zeeman_potential(double B_magnitude, const HyperfineLevel& level,
                        const PhysicalConstants& pc) {
    level.validate();
    const double gF = (level.F == 2) ? pc.g_F2 : pc.g_F1;
    return pc.mu_B * gF * double(level.mF) * B_magnitude;
}

PolarizationComponents local_polarization_decompose(const CVec3& B_mw,
                                                    const Eigen::Vector3d& B0_dir) {
    const double n = B0_dir.norm();
    if (!(n > 0.0))
        throw std::invalid_argument("polarization: quantization axis undefined for |B0| = 0");
    const Eigen::Vector3d e3 = B0_dir / n;
    // any orthonormal transverse pair; the circular magnitudes are frame independent
    Eigen::Vector3d seed = std::fabs(e3.z()) < 0.9 ? Eigen::Vector3d(0, 0, 1)
                                                   : Eigen::Vector3d(1, 0, 0);
    const Eigen::Vector3d e1 = (seed - seed.dot(e3) * e3).normalized();
    const Eigen::Vector3d e2 = e3.cross(e1);

    const cxd b1 = B_mw.dot(e1.cast<cxd>());
    const cxd b2 = B_mw.dot(e2.cast<cxd>());
    const cxd b3 = B_mw.dot(e3.cast<cxd>());

    PolarizationComponents out;
    out.pi_comp = b3;
    const cxd i_unit(0.0, 1.0);
    // spherical components: B_{+-1} = -/+ (b1 +- i b2)/sqrt(2); sigma+ transitions
    // (Delta m = +1) couple through B_{-1} and sigma- through B_{+1}
    out.sigma_plus = (b1 - i_unit * b2) / std::sqrt(2.0);
    out.sigma_minus = -(b1 + i_unit * b2) / std::sqrt(2.0);
    return out;
}

double hyperfine_J_matrix_element(int m1, int m2) {
    if (std::abs(m1) > 1 || std::abs(m2) > 2) return 0.0;
    const int q = m2 - m1;
    if (std::abs(q) > 1) return 0.0;
    // |2,m> =  sqrt((2+m)/4)|m-1/2,up> + sqrt((2-m)/4)|m+1/2,dn>
    // |1,m> = -sqrt((2-m)/4)|m-1/2,up> + sqrt((2+m)/4)|m+1/2,dn>
    const auto cu2 = [](int m) { return std::sqrt((2.0 + m) / 4.0); };
    const auto cd2 = [](int m) { return std::sqrt((2.0 - m) / 4.0); };
    const auto cu1 = [](int m) { return -std::sqrt((2.0 - m) / 4.0); };
    const auto cd1 = [](int m) { return std::sqrt((2.0 + m) / 4.0); };
    if (q == 0) {
        // J_0 = J_z: diagonal in m_J, eigenvalues +-1/2
        return 0.5 * cu2(m2) * cu1(m1) - 0.5 * cd2(m2) * cd1(m1);
    }
    if (q == 1) {
        // J_{+1} = -(J_x + i J_y)/sqrt(2); <up|J_+|dn> = 1, m_I = m1 + 1/2 both
        return -(1.0 / std::sqrt(2.0)) * cu2(m2) * cd1(m1);
    }
    // J_{-1} = +(J_x - i J_y)/sqrt(2); <dn|J_-|up> = 1, m_I = m1 - 1/2 both
    return (1.0 / std::sqrt(2.0)) * cd2(m2) * cu1(m1);
}

cxd rabi_frequency(int m1, int m2, const PolarizationComponents& pol,
                   const PhysicalConstants& pc) {
    const int q = m2 - m1;
    if (std::abs(q) > 1) return 0.0;
    // mu.B = mu_B g_J sum_q (-1)^q J_q B_{-q}; the J_q term drives Delta m = q
    cxd field;
    double sign = 1.0;
    if (q == 0) {
        field = pol.pi_comp;
    } else if (q == 1) {
        field = pol.sigma_plus;  // B_{-1} component
        sign = -1.0;
    } else {
        field = pol.sigma_minus;  // B_{+1} component
        sign = -1.0;
    }
    return sign * pc.mu_B * pc.g_J * hyperfine_J_matrix_element(m1, m2) * field / pc.hbar;
}

double transition_detuning(int m1, int m2, double delta0, double B0_magnitude,
                           const PhysicalConstants& pc) {
    return delta0 - (pc.mu_B / (2.0 * pc.hbar)) * double(m2 + m1) * B0_magnitude;
}

void RegimeMonitor::record(double ratio_sq) {
    if (ratio_sq > max_ratio_sq) max_ratio_sq = ratio_sq;
}

namespace {

double mw_sum(int m_fixed, bool fixed_is_F1, const PolarizationComponents& pol, double delta0,
              double B0, RegimeMonitor* monitor, const PhysicalConstants& pc) {
    double sum = 0.0;
    for (int dm = -1; dm <= 1; ++dm) {
        const int m1 = fixed_is_F1 ? m_fixed : m_fixed + dm;
        const int m2 = fixed_is_F1 ? m_fixed + dm : m_fixed;
        if (std::abs(m1) > 1 || std::abs(m2) > 2) continue;
        const cxd omega = rabi_frequency(m1, m2, pol, pc);
        const double o2 = std::norm(omega);
        if (o2 == 0.0) continue;
        const double delta = transition_detuning(m1, m2, delta0, B0, pc);
        const double ratio_sq = o2 / (delta * delta);
        if (monitor) monitor->record(ratio_sq);
        if (ratio_sq >= 0.09)
            throw std::domain_error("mw_potential: |Omega/Delta| >= 0.3, perturbation theory invalid");
        sum += o2 / delta;
    }
    return sum;
}

}  // namespace

double mw_potential_F1(int m1, const PolarizationComponents& pol, double delta0,
                       double B0_magnitude, RegimeMonitor* monitor, const PhysicalConstants& pc) {
    return +0.25 * pc.hbar * mw_sum(m1, true, pol, delta0, B0_magnitude, monitor, pc);
}

double mw_potential_F2(int m2, const PolarizationComponents& pol, double delta0,
                       double B0_magnitude, RegimeMonitor* monitor, const PhysicalConstants& pc) {
    return -0.25 * pc.hbar * mw_sum(m2, false, pol, delta0, B0_magnitude, monitor, pc);
}

double electric_mw_potential(double E_amplitude, const PhysicalConstants& pc) {
    return -0.25 * pc.alpha_dc * E_amplitude * E_amplitude;
}

}  // namespace chipgate
