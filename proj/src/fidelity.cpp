#include "chipgate/fidelity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "chipgate/detail/nelder_mead.hpp"

namespace chipgate {

double InternalState::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s;
}

void InternalState::normalize() {
    const double s = std::sqrt(norm_sq());
    if (!(s > 0.0)) throw std::runtime_error("internal state: zero norm");
    for (auto& a : amp) a /= s;
}

std::array<TwoParticleState, 4> symmetrize_composite(const std::array<TwoParticleState, 4>& psi) {
    // P12 swaps internal labels (ij -> ji) together with the coordinates
    std::array<TwoParticleState, 4> out;
    static constexpr int swapped[4] = {0, 2, 1, 3};
    for (int s = 0; s < 4; ++s) {
        const auto t = psi[std::size_t(swapped[s])].transposed();
        out[std::size_t(s)].grid = psi[std::size_t(s)].grid;
        out[std::size_t(s)].amp.resize(psi[std::size_t(s)].amp.size());
        for (std::size_t m = 0; m < t.amp.size(); ++m)
            out[std::size_t(s)].amp[m] = 0.5 * (psi[std::size_t(s)].amp[m] + t.amp[m]);
    }
    return out;
}

namespace {

constexpr int swap_sector(int s) {
    constexpr int sw[4] = {0, 2, 1, 3};
    return sw[s];
}

/// Precomputed overlap data of one motional configuration.
struct ConfigGram {
    std::array<cplx, 4> v1{};  // <psi0 | a_s>
    std::array<cplx, 4> v2{};  // <psi0 | a_s^T>
    cplx s0{};                 // <psi0 | psi0^T>
    double weight = 1.0;
};

ConfigGram build_gram(const SectorEndpoints& cfg, const std::array<cplx, 4>& corrections) {
    ConfigGram g;
    g.weight = cfg.weight;
    const TwoParticleState psi0_t = cfg.psi0.transposed();
    g.s0 = inner(cfg.psi0, psi0_t);
    for (int s = 0; s < 4; ++s) {
        if (s == 0 || s == 3) {
            // symmetric-run endpoint: U_s[(LR + RL)] / ||LR + RL||. Only the
            // combination v1 + v2 = <LR|U_s[LR + RL]> enters diagonal sectors.
            const cplx u = std::sqrt(2.0 * (1.0 + g.s0.real())) *
                           inner(cfg.psi0, cfg.psi[std::size_t(s)]) * corrections[std::size_t(s)];
            g.v1[std::size_t(s)] = 0.5 * u;
            g.v2[std::size_t(s)] = 0.5 * u;
        } else {
            g.v1[std::size_t(s)] =
                inner(cfg.psi0, cfg.psi[std::size_t(s)]) * corrections[std::size_t(s)];
            g.v2[std::size_t(s)] =
                inner(psi0_t, cfg.psi[std::size_t(s)]) * corrections[std::size_t(s)];
        }
    }
    return g;
}

/// Fidelity contribution of one configuration: squared overlap of the
/// bosonic-symmetrized actual output with the symmetrized ideal output
/// (internal target chi~, motional state returned to psi0).
double config_fidelity(const ConfigGram& g, const InternalState& chi,
                       const InternalState& target) {
    // numerator <S[chi~ psi0] | U S[chi psi0]>; the (1+P12) factors expand into
    // the direct and transposed overlap vectors
    cplx num = 0.0;
    for (int p = 0; p < 4; ++p) {
        const int ps = swap_sector(p);
        const cplx tp = std::conj(target.amp[std::size_t(p)]);
        const cplx tps = std::conj(target.amp[std::size_t(ps)]);
        const cplx cp = chi.amp[std::size_t(p)];
        const cplx cps = chi.amp[std::size_t(ps)];
        // <psi0^T | a_p> = <psi0 | a_p^T> and <psi0^T | a_ps^T> = <psi0 | a_ps>
        num += tp * cp * g.v1[std::size_t(p)] + tp * cps * g.v2[std::size_t(ps)] +
               tps * cp * g.v2[std::size_t(p)] + tps * cps * g.v1[std::size_t(ps)];
    }
    // ||(1+P)[chi psi0]||^2 = 2 (1 + sum_p Re(chi_p* chi_p' s0)); the target
    // norm is identical since its sector-diagonal phases drop out of the
    // p <-> p' pairings
    double denom = 0.0;
    for (int p = 0; p < 4; ++p) {
        const int ps = swap_sector(p);
        denom += std::norm(chi.amp[std::size_t(p)]) +
                 std::real(std::conj(chi.amp[std::size_t(p)]) * chi.amp[std::size_t(ps)] * g.s0);
    }
    denom *= 2.0;
    return std::norm(num) / (denom * denom);
}

InternalState from_angles(const std::vector<double>& ang) {
    // hyperspherical moduli with three relative phases
    const double t1 = ang[0], t2 = ang[1], t3 = ang[2];
    InternalState chi;
    chi.amp[0] = std::cos(t1);
    chi.amp[1] = std::sin(t1) * std::cos(t2) * std::exp(cplx(0.0, ang[3]));
    chi.amp[2] = std::sin(t1) * std::sin(t2) * std::cos(t3) * std::exp(cplx(0.0, ang[4]));
    chi.amp[3] = std::sin(t1) * std::sin(t2) * std::sin(t3) * std::exp(cplx(0.0, ang[5]));
    return chi;
}

}  // namespace

namespace {

struct FidelitySetup {
    std::vector<ConfigGram> grams;
    InternalState target_phases;
    double wsum = 0.0;

    double fidelity_of(const InternalState& chi_raw) const {
        InternalState chi = chi_raw;
        const double n2 = chi.norm_sq();
        if (!(n2 > 1e-14)) return 1.0;  // degenerate parameter point
        chi.normalize();
        InternalState target;
        for (int s = 0; s < 4; ++s)
            target.amp[std::size_t(s)] =
                chi.amp[std::size_t(s)] * target_phases.amp[std::size_t(s)];
        double f = 0.0;
        for (const auto& g : grams) f += g.weight * config_fidelity(g, chi, target);
        return f / wsum;
    }
};

FidelitySetup build_setup(std::span<const SectorEndpoints> configs,
                          const ProcessFidelityOptions& opts) {
    if (configs.empty()) throw std::invalid_argument("process_fidelity: missing basis-state data");

    // measured endpoint phases of the ground configuration (first entry)
    std::array<double, 4> theta{};
    for (int s = 0; s < 4; ++s)
        theta[std::size_t(s)] = std::arg(inner(configs[0].psi0, configs[0].psi[std::size_t(s)]));

    // corrections multiply the evolved fields; targets carry the ideal phases
    std::array<cplx, 4> corrections;
    FidelitySetup setup;
    if (opts.convention == PhaseConvention::local_z_absorbed) {
        const double g0 = theta[0];
        const double z1 = theta[2] - theta[0];
        const double z2 = theta[1] - theta[0];
        const std::array<double, 4> corr = {g0, g0 + z2, g0 + z1, g0 + z1 + z2};
        for (int s = 0; s < 4; ++s)
            corrections[std::size_t(s)] = std::exp(cplx(0.0, -corr[std::size_t(s)]));
    } else {
        for (int s = 0; s < 4; ++s)
            corrections[std::size_t(s)] = std::exp(cplx(0.0, -theta[std::size_t(s)]));
    }
    for (int s = 0; s < 4; ++s) setup.target_phases.amp[std::size_t(s)] = 1.0;
    if (opts.convention == PhaseConvention::local_z_absorbed)
        setup.target_phases.amp[3] = std::exp(cplx(0.0, opts.target_phase));

    setup.grams.reserve(configs.size());
    for (const auto& cfg : configs) {
        setup.grams.push_back(build_gram(cfg, corrections));
        setup.wsum += cfg.weight;
    }
    if (!(setup.wsum > 0.0)) throw std::invalid_argument("process_fidelity: zero ensemble weight");
    return setup;
}

}  // namespace

double state_fidelity(std::span<const SectorEndpoints> configs, const InternalState& chi,
                      const ProcessFidelityOptions& opts) {
    return build_setup(configs, opts).fidelity_of(chi);
}

ProcessFidelityResult process_fidelity(std::span<const SectorEndpoints> configs,
                                       const ProcessFidelityOptions& opts) {
    const FidelitySetup setup = build_setup(configs, opts);
    auto fidelity_of = [&](const InternalState& chi) { return setup.fidelity_of(chi); };

    auto objective = [&](const std::vector<double>& ang) { return fidelity_of(from_angles(ang)); };

    // coarse grid over the 6 angles, then local refinement
    const int np = opts.grid_points_per_angle;
    std::vector<double> best_ang(6, 0.0);
    double best = 2.0;
    std::vector<double> ang(6, 0.0);
    const double half_pi = 0.5 * pi;
    for (int i0 = 0; i0 < np; ++i0) {
        ang[0] = half_pi * (i0 + 0.5) / np;
        for (int i1 = 0; i1 < np; ++i1) {
            ang[1] = half_pi * (i1 + 0.5) / np;
            for (int i2 = 0; i2 < np; ++i2) {
                ang[2] = half_pi * (i2 + 0.5) / np;
                for (int i3 = 0; i3 < np; ++i3) {
                    ang[3] = 2.0 * pi * i3 / np;
                    for (int i4 = 0; i4 < np; ++i4) {
                        ang[4] = 2.0 * pi * i4 / np;
                        for (int i5 = 0; i5 < np; ++i5) {
                            ang[5] = 2.0 * pi * i5 / np;
                            const double f = objective(ang);
                            if (f < best) {
                                best = f;
                                best_ang = ang;
                            }
                        }
                    }
                }
            }
        }
    }

    auto refined = detail::nelder_mead(objective, best_ang, 0.15, 1e-12, opts.refine_iterations);
    double f_ref = objective(refined);
    // deterministic restarts guard against a poor simplex
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    for (int r = 0; r < opts.random_restarts; ++r) {
        std::vector<double> start = best_ang;
        for (auto& v : start) v += jitter(rng);
        const auto alt = detail::nelder_mead(objective, start, 0.15, 1e-12, opts.refine_iterations);
        const double f_alt = objective(alt);
        if (f_alt < f_ref) {
            f_ref = f_alt;
            refined = alt;
        }
    }

    ProcessFidelityResult out;
    out.fidelity = std::min(f_ref, best);
    out.minimizer = from_angles(refined);
    out.minimizer.normalize();
    return out;
}

ThermalEnsemble thermal_occupations(double T, double omega_x, int n_max,
                                    const PhysicalConstants& pc) {
    if (T < 0.0) throw std::invalid_argument("thermal_occupations: negative temperature");
    if (!(omega_x > 0.0)) throw std::invalid_argument("thermal_occupations: omega_x must be positive");
    if (n_max < 0) throw std::invalid_argument("thermal_occupations: n_max must be >= 0");

    ThermalEnsemble ens;
    ens.temperature = T;
    ens.omega_x = omega_x;
    ens.n_max = n_max;
    ens.p_single.assign(std::size_t(n_max) + 1, 0.0);
    if (T == 0.0) {
        ens.p_single[0] = 1.0;
        return ens;
    }
    const double beta_e = pc.hbar * omega_x / (pc.k_B * T);
    const double z_full = 1.0 / (1.0 - std::exp(-beta_e));  // geometric series
    double kept = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        ens.p_single[std::size_t(n)] = std::exp(-beta_e * n) * (1.0 - std::exp(-beta_e));
        kept += ens.p_single[std::size_t(n)];
    }
    ens.truncated_weight = 1.0 - kept;
    for (auto& p : ens.p_single) p /= kept;
    ens.truncation_warning = (1.0 / beta_e > 2.0) && ens.truncated_weight > 1e-3;
    (void)z_full;
    return ens;
}

}  // namespace chipgate
