#include "chipgate/error_budget.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chipgate {

namespace {

double field_parameter(double B, const PhysicalConstants& pc) {
    return (pc.g_J - pc.g_I) * pc.mu_B * B / (pc.hbar * pc.omega_hfs);
}

}  // namespace

double breit_rabi_energy(int F, int m, double B, const PhysicalConstants& pc) {
    if (F != 1 && F != 2) throw std::invalid_argument("breit_rabi: F must be 1 or 2");
    if (std::abs(m) > F) throw std::invalid_argument("breit_rabi: |m| must not exceed F");
    if (!(B >= 0.0 && B < 100e-4)) throw std::invalid_argument("breit_rabi: B out of range [0, 100 G)");
    const double dE = pc.hbar * pc.omega_hfs;
    const double x = field_parameter(B, pc);
    const double root = std::sqrt(1.0 + double(m) * x + x * x);
    const double common = -dE / 8.0 + pc.g_I * pc.mu_B * double(m) * B;
    return common + (F == 2 ? +0.5 : -0.5) * dE * root;
}

BreitRabiLevels breit_rabi_energies(double B, const PhysicalConstants& pc) {
    BreitRabiLevels out;
    for (std::size_t i = 0; i < out.labels.size(); ++i)
        out.energy[i] = breit_rabi_energy(out.labels[i].first, out.labels[i].second, B, pc);
    return out;
}

double differential_moment(double B, const PhysicalConstants& pc) {
    const double dE = pc.hbar * pc.omega_hfs;
    const double x = field_parameter(B, pc);
    const double dxdB = (pc.g_J - pc.g_I) * pc.mu_B / dE;
    const double rp = std::sqrt(1.0 + x + x * x);
    const double rm = std::sqrt(1.0 - x + x * x);
    // d/dB [E(2,+1) - E(1,-1)]
    return 2.0 * pc.g_I * pc.mu_B +
           0.5 * dE * dxdB * ((1.0 + 2.0 * x) / (2.0 * rp) + (2.0 * x - 1.0) / (2.0 * rm));
}

double magic_field(double lo, double hi, const PhysicalConstants& pc) {
    double flo = differential_moment(lo, pc);
    double fhi = differential_moment(hi, pc);
    if (flo * fhi > 0.0) throw std::runtime_error("magic_field: no sign change in bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = differential_moment(mid, pc);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

double mw_moment_shift(double omega_rabi, double delta, const PhysicalConstants& pc) {
    if (delta == 0.0) throw std::invalid_argument("mw_moment_shift: zero detuning");
    const double ratio_sq = (omega_rabi * omega_rabi) / (delta * delta);
    if (ratio_sq >= 0.3)
        throw std::domain_error("mw_moment_shift: Omega^2/Delta^2 >= 0.3, out of regime");
    return 0.25 * ratio_sq * pc.mu_B;
}

double dephasing_time(double dmu, double dB, const PhysicalConstants& pc) {
    if (dmu < 0.0 || dB < 0.0) throw std::invalid_argument("dephasing_time: negative input");
    if (dmu == 0.0 || dB == 0.0) return std::numeric_limits<double>::infinity();
    return pc.hbar / (dmu * dB);
}

SurfaceLoss surface_loss_error(double gamma_s, double tau_g) {
    if (gamma_s < 0.0) throw std::invalid_argument("surface_loss: negative rate");
    SurfaceLoss out;
    out.error = -std::expm1(-gamma_s * tau_g);
    out.trap_lifetime =
        gamma_s > 0.0 ? 1.0 / gamma_s : std::numeric_limits<double>::infinity();
    return out;
}

double two_photon_suppression(double omega_r1, double omega_r2, double delta, double B0,
                              const PhysicalConstants& pc) {
    if (B0 == 0.0) throw std::invalid_argument("two_photon: B0 = 0 leaves the detuning undefined");
    const double omega_2ph = omega_r1 * omega_r2 / (2.0 * delta);
    const double delta_2ph = pc.mu_B * B0 / (2.0 * pc.hbar);
    const double r = omega_2ph / delta_2ph;
    return r * r;
}

double scattering_length_shift(double omega_r, double delta, double a_s_11, double a_s_01) {
    const double ratio_sq = (omega_r * omega_r) / (delta * delta);
    return 0.5 * ratio_sq * (a_s_11 - a_s_01);
}

Quasi1DCheck quasi1d_check(double e_kin, double omega_perp, const PhysicalConstants& pc) {
    Quasi1DCheck out;
    out.ratio = 2.0 * e_kin / (pc.hbar * omega_perp);
    out.pass = out.ratio < 1.0;
    out.headroom = out.ratio <= 0.7;
    return out;
}

double large_detuning_check(std::span<const double> ratio_sq_samples) {
    double m = 0.0;
    for (double r : ratio_sq_samples) m = std::max(m, r);
    return m;
}

void ErrorBudget::add(std::string name, double value, std::string formula, std::string inputs) {
    entries.push_back({std::move(name), value, std::move(formula), std::move(inputs)});
}

double ErrorBudget::aggregate() const {
    double keep = 1.0;
    for (const auto& e : entries) keep *= (1.0 - e.value);
    return 1.0 - keep;
}

}  // namespace chipgate
