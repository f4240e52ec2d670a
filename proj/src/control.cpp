#include "chipgate/control.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "chipgate/eigenstates.hpp"

namespace chipgate {

namespace {

/// Update-shape envelope: zero at both ends, one in the bulk.
std::vector<double> edge_shape(std::size_t n_steps, double edge_fraction) {
    std::vector<double> s(n_steps, 1.0);
    const std::size_t ramp = std::max<std::size_t>(1, std::size_t(edge_fraction * double(n_steps)));
    for (std::size_t k = 0; k < ramp && k < n_steps; ++k) {
        const double f = std::sin(0.5 * pi * double(k) / double(ramp));
        s[k] = std::min(s[k], f * f);
        s[n_steps - 1 - k] = std::min(s[n_steps - 1 - k], f * f);
    }
    return s;
}

/// Piecewise-constant per-step control from a node waveform.
std::vector<double> to_intervals(const Waveform& wf) {
    std::vector<double> c(wf.grid.n_steps);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = wf.midpoint(k);
    return c;
}

/// Node waveform whose step midpoints track the interval control closely.
Waveform to_waveform(const std::vector<double>& c, const TimeGrid& grid, WaveformUnit unit) {
    Waveform wf(grid, 0.0, unit);
    wf[0] = c.front();
    for (std::size_t k = 1; k < grid.n_steps; ++k) wf[k] = 0.5 * (c[k - 1] + c[k]);
    wf[grid.n_steps] = c.back();
    return wf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stage 1
// ---------------------------------------------------------------------------

namespace {

struct Stage1Machine {
    const PotentialSet& pot;
    const TimeGrid& tgrid;
    const PhysicalConstants& pc;
    std::vector<cplx> psi0;
    SplitOperator1D fwd;
    SplitOperator1D bwd;
    std::vector<double> vbuf;

    Stage1Machine(const PotentialSet& p, const TimeGrid& tg, const PhysicalConstants& c,
                  std::vector<cplx> initial)
        : pot(p), tgrid(tg), pc(c), psi0(std::move(initial)),
          fwd(p.grid, c.m_atom, cplx(tg.dt(), 0.0), c),
          bwd(p.grid, c.m_atom, cplx(-tg.dt(), 0.0), c),
          vbuf(p.grid.n_points) {}

    const std::vector<double>& state_term(int i) const { return i == 0 ? pot.u_0 : pot.u_1; }

    const std::vector<double>& potential(int i, double lam) {
        const auto& ui = state_term(i);
        for (std::size_t m = 0; m < vbuf.size(); ++m)
            vbuf[m] = pot.u_c[m] + lam * (ui[m] + pot.u_comp[m]);
        return vbuf;
    }

    void guard(double dt) const {
        double vmax = 0.0;
        for (std::size_t m = 0; m < pot.u_c.size(); ++m) {
            vmax = std::max(vmax, std::fabs(pot.u_c[m]));
            vmax = std::max(vmax, std::fabs(pot.u_c[m] + pot.u_0[m] + pot.u_comp[m]));
            vmax = std::max(vmax, std::fabs(pot.u_c[m] + pot.u_1[m] + pot.u_comp[m]));
        }
        const double phase = vmax * dt / pc.hbar;
        if (phase > pi / 4.0)
            throw std::runtime_error("stage1: potential phase per step exceeds pi/4; use dt <= " +
                                     std::to_string(dt * (pi / 4.0) / phase));
    }

    std::array<std::vector<cplx>, 2> forward(const std::vector<double>& c) {
        std::array<std::vector<cplx>, 2> psi{psi0, psi0};
        for (std::size_t k = 0; k < c.size(); ++k)
            for (int i = 0; i < 2; ++i) fwd.step(psi[std::size_t(i)], potential(i, c[k]));
        return psi;
    }

    double objective(const std::array<std::vector<cplx>, 2>& psi_end) const {
        const double dx = pot.grid.spacing();
        double j = 0.0;
        for (int i = 0; i < 2; ++i) {
            const cplx o = kernels::dot(psi0.data(), psi_end[std::size_t(i)].data(), psi0.size()) * dx;
            j += 0.5 * std::norm(o);
        }
        return j;
    }

    std::array<std::vector<cplx>, 2> costate_initial(
        const std::array<std::vector<cplx>, 2>& psi_end) const {
        const double dx = pot.grid.spacing();
        std::array<std::vector<cplx>, 2> chi;
        for (int i = 0; i < 2; ++i) {
            const cplx o = kernels::dot(psi0.data(), psi_end[std::size_t(i)].data(), psi0.size()) * dx;
            chi[std::size_t(i)].resize(psi0.size());
            for (std::size_t m = 0; m < psi0.size(); ++m) chi[std::size_t(i)][m] = psi0[m] * o;
        }
        return chi;
    }

    void backward(std::array<std::vector<cplx>, 2>& chi, const std::vector<double>& c) {
        for (std::size_t k = c.size(); k-- > 0;)
            for (int i = 0; i < 2; ++i) bwd.step(chi[std::size_t(i)], potential(i, c[k]));
    }

    double gradient(const std::array<std::vector<cplx>, 2>& chi,
                    const std::array<std::vector<cplx>, 2>& psi) const {
        const double dx = pot.grid.spacing();
        double g = 0.0;
        for (int i = 0; i < 2; ++i) {
            const auto& ui = state_term(i);
            const auto& cv = chi[std::size_t(i)];
            const auto& pv = psi[std::size_t(i)];
            cplx acc = 0.0;
            for (std::size_t m = 0; m < pv.size(); ++m)
                acc += std::conj(cv[m]) * ((ui[m] + pot.u_comp[m]) * pv[m]);
            g += (acc * dx).imag() / pc.hbar;
        }
        return g;
    }
};

}  // namespace

Stage1Result stage1_optimize(const PotentialSet& pots, const TimeGrid& tgrid,
                             const Waveform& lambda_trial, const Stage1Options& opts,
                             const PhysicalConstants& pc) {
    if (!(lambda_trial.grid == tgrid))
        throw std::invalid_argument("stage1: trial waveform does not match the time grid");
    // interaction-free problem; initial state = localized ground state of u_c
    const Wavefunction1D ground = ground_state_in_well(pots.u_c, pots.grid, Well::left, {}, pc);

    Stage1Machine mach(pots, tgrid, pc, ground.amp);
    mach.guard(tgrid.dt());

    std::vector<double> c = to_intervals(lambda_trial);
    for (double& v : c) v = std::clamp(v, 0.0, 1.0);
    const auto shape = edge_shape(c.size(), opts.edge_fraction);

    auto psi_end = mach.forward(c);
    double J = mach.objective(psi_end);
    if (J <= opts.min_initial_objective)
        throw std::runtime_error("stage1: trial objective " + std::to_string(J) +
                                 " is outside the working basin (need > " +
                                 std::to_string(opts.min_initial_objective) + ")");

    Stage1Result res;
    res.objective_history.push_back(J);

    // penalty scale: cap the first sweep's largest update
    double penalty = 0.0;
    {
        auto chi = mach.costate_initial(psi_end);
        mach.backward(chi, c);
        std::array<std::vector<cplx>, 2> psi{mach.psi0, mach.psi0};
        double gmax = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            gmax = std::max(gmax, std::fabs(shape[k] * mach.gradient(chi, psi)));
            for (int i = 0; i < 2; ++i) {
                mach.fwd.step(psi[std::size_t(i)], mach.potential(i, c[k]));
                mach.fwd.step(chi[std::size_t(i)], mach.potential(i, c[k]));
            }
        }
        penalty = std::max(gmax / opts.first_update_max, 1e-300);
    }

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        auto chi0 = mach.costate_initial(psi_end);
        mach.backward(chi0, c);

        bool accepted = false;
        for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
            std::vector<double> c_try = c;
            auto chi = chi0;
            std::array<std::vector<cplx>, 2> psi{mach.psi0, mach.psi0};
            for (std::size_t k = 0; k < c.size(); ++k) {
                const double delta = shape[k] * mach.gradient(chi, psi) / penalty;
                c_try[k] = std::clamp(c[k] + delta, 0.0, 1.0);
                for (int i = 0; i < 2; ++i) {
                    mach.fwd.step(psi[std::size_t(i)], mach.potential(i, c_try[k]));
                    mach.fwd.step(chi[std::size_t(i)], mach.potential(i, c[k]));
                }
            }
            const double J_try = mach.objective(psi);
            if (J_try >= J - opts.monotonic_tol) {
                c = std::move(c_try);
                psi_end = std::move(psi);
                accepted = true;
                const double gain = J_try - J;
                J = J_try;
                res.objective_history.push_back(J);
                if (gain < opts.convergence_tol && iter > 0) iter = opts.max_iterations;
                break;
            }
            penalty *= 2.0;
        }
        if (!accepted)
            throw std::runtime_error("stage1: objective decreased beyond tolerance; algorithm fault");
    }
    res.hit_iteration_limit = res.objective_history.size() == std::size_t(opts.max_iterations) + 1;

    res.lambda = to_waveform(c, tgrid, WaveformUnit::dimensionless);
    res.lambda = res.lambda.clamped(0.0, 1.0);
    res.penalty = penalty;
    const double dx = pots.grid.spacing();
    for (int i = 0; i < 2; ++i)
        res.overlaps[std::size_t(i)] = std::abs(
            kernels::dot(mach.psi0.data(), psi_end[std::size_t(i)].data(), mach.psi0.size()) * dx);
    return res;
}

double stage1_objective(const PotentialSet& pots, const TimeGrid& tgrid, const Waveform& lambda,
                        const PhysicalConstants& pc) {
    const Wavefunction1D ground = ground_state_in_well(pots.u_c, pots.grid, Well::left, {}, pc);
    Stage1Machine mach(pots, tgrid, pc, ground.amp);
    mach.guard(tgrid.dt());
    std::vector<double> c = to_intervals(lambda);
    for (double& v : c) v = std::clamp(v, 0.0, 1.0);
    return mach.objective(mach.forward(c));
}

// ---------------------------------------------------------------------------
// omega_perp tuning
// ---------------------------------------------------------------------------

namespace {

double phi11_of(const PotentialSet& pots, const TimeGrid& tgrid, const Waveform& lambda,
                const InteractionSpec& inter, const TwoParticleState& psi0_sym, double factor,
                const PhysicalConstants& pc) {
    GatePropagator prop(pots, tgrid, pc);
    GateControls controls;
    controls.lambda = lambda;
    controls.omega_scale = Waveform(tgrid, factor, WaveformUnit::dimensionless);
    SectorRunOptions opts;
    opts.sample_every = std::max<std::size_t>(1, tgrid.n_steps / 64);
    const auto traj = prop.run_sector(1, 1, psi0_sym, controls, inter, opts);
    return traj.phase.back();
}

}  // namespace

TuneResult tune_omega_perp(const PotentialSet& pots, const TimeGrid& tgrid,
                           const Waveform& lambda, const InteractionSpec& interaction,
                           const TwoParticleState& psi0, const TuneOptions& opts,
                           const PhysicalConstants& pc) {
    TuneResult res;
    const TwoParticleState psi0_sym = symmetrized_pair(psi0);
    auto eval = [&](double f) {
        ++res.evaluations;
        return phi11_of(pots, tgrid, lambda, interaction, psi0_sym, f, pc);
    };

    // the collisional phase grows with the transverse confinement; bracket the
    // target, then bisect with a secant polish
    double lo = 1.0, hi = 1.0;
    double p_lo = eval(1.0);
    double p_hi = p_lo;
    if (std::fabs(p_lo - opts.target_phase) < opts.tolerance) {
        res.omega_factor = 1.0;
        res.phi11 = p_lo;
        return res;
    }
    if (p_lo < opts.target_phase) {
        while (p_hi < opts.target_phase) {
            if (hi >= opts.scale_max || res.evaluations >= opts.max_evaluations)
                throw std::runtime_error(
                    "tune_omega_perp: target phase unreachable below the scale ceiling, phi11 = " +
                    std::to_string(p_hi));
            lo = hi;
            p_lo = p_hi;
            hi = std::min(hi * 1.3, opts.scale_max);
            p_hi = eval(hi);
        }
    } else {
        while (p_lo > opts.target_phase) {
            if (lo <= opts.scale_min || res.evaluations >= opts.max_evaluations)
                throw std::runtime_error(
                    "tune_omega_perp: target phase overshoots at the scale floor, phi11 = " +
                    std::to_string(p_lo));
            hi = lo;
            p_hi = p_lo;
            lo = std::max(lo / 1.3, opts.scale_min);
            p_lo = eval(lo);
        }
    }

    double f_best = hi, p_best = p_hi;
    while (res.evaluations < opts.max_evaluations &&
           std::fabs(p_best - opts.target_phase) >= opts.tolerance) {
        // secant estimate, safeguarded to the bracket interior
        double f_next = lo + (opts.target_phase - p_lo) * (hi - lo) / (p_hi - p_lo);
        if (!(f_next > lo && f_next < hi)) f_next = 0.5 * (lo + hi);
        const double p_next = eval(f_next);
        if (std::fabs(p_next - opts.target_phase) < std::fabs(p_best - opts.target_phase)) {
            f_best = f_next;
            p_best = p_next;
        }
        if (p_next < opts.target_phase) {
            lo = f_next;
            p_lo = p_next;
        } else {
            hi = f_next;
            p_hi = p_next;
        }
    }
    if (std::fabs(p_best - opts.target_phase) >= opts.tolerance)
        throw std::runtime_error("tune_omega_perp: could not reach the target phase, best phi11 = " +
                                 std::to_string(p_best));
    res.omega_factor = f_best;
    res.phi11 = p_best;
    return res;
}

// ---------------------------------------------------------------------------
// Stage 2
// ---------------------------------------------------------------------------

namespace {

struct InteractionDerivative {
    double a_s;
    double c_cir;  // 1.46 a_s sqrt(m / 2 hbar)

    explicit InteractionDerivative(double a, const PhysicalConstants& pc)
        : a_s(a), c_cir(1.46 * a * std::sqrt(pc.m_atom / (2.0 * pc.hbar))) {}

    double g(double omega, const PhysicalConstants& pc) const {
        return g1d_strength(a_s, omega, pc);
    }
    double dg_domega(double omega, const PhysicalConstants& pc) const {
        const double r = c_cir * std::sqrt(omega);
        const double denom = 1.0 - r;
        return 2.0 * pc.hbar * a_s * (1.0 - 0.5 * r) / (denom * denom);
    }
};

}  // namespace

Stage2Result stage2_optimize(const PotentialSet& pots, const TimeGrid& tgrid,
                             const Waveform& lambda, double omega_factor,
                             const InteractionSpec& interaction, const TwoParticleState& psi0,
                             double phi11_target, const Stage2Options& opts,
                             const PhysicalConstants& pc) {
    const std::size_t n = pots.grid.n_points;
    const std::size_t steps = tgrid.n_steps;
    const double dx = pots.grid.spacing();
    const double dt = tgrid.dt();
    const double A = opts.amplitude_bound;
    const InteractionDerivative deriv(interaction.a_s_11, pc);
    const TwoParticleState psi0s = symmetrized_pair(psi0);

    // base transverse profile after the tuning factor
    std::vector<double> wperp(n);
    for (std::size_t m = 0; m < n; ++m) wperp[m] = pots.omega_perp[m] * omega_factor;
    const double omega0 = omega_factor * pots.omega_perp[n / 2];

    const std::vector<double> lam = to_intervals(lambda);
    SplitOperator2D fwd(pots.grid, pc.m_atom, cplx(dt, 0.0), pc);
    SplitOperator2D bwd(pots.grid, pc.m_atom, cplx(-dt, 0.0), pc);

    std::vector<double> V(n);
    auto potential_at = [&](double l) -> const std::vector<double>& {
        for (std::size_t m = 0; m < n; ++m)
            V[m] = pots.u_c[m] + l * (pots.u_1[m] + pots.u_comp[m]);
        return V;
    };
    std::vector<double> gdiag(n);
    auto interaction_at = [&](double s) -> const std::vector<double>& {
        for (std::size_t m = 0; m < n; ++m)
            gdiag[m] = deriv.g(wperp[m] * s, pc) / dx;
        return gdiag;
    };

    // reference evolution (a_s = 0) fixes the phase bookkeeping once
    std::vector<cplx> psiref = psi0s.amp;
    for (std::size_t k = 0; k < steps; ++k) fwd.step(psiref, potential_at(lam[k]), V, nullptr);
    const cplx ref_ov = kernels::dot(psi0s.amp.data(), psiref.data(), n * n) * dx * dx;
    const double gamma0 = std::arg(ref_ov);
    const double gamma_target = gamma0 - phi11_target;
    std::vector<cplx> target(n * n);
    const cplx phase_t = std::exp(cplx(0.0, gamma_target));
    for (std::size_t m = 0; m < n * n; ++m) target[m] = psi0s.amp[m] * phase_t;

    auto objective_of = [&](const std::vector<cplx>& psi_end) {
        return (kernels::dot(target.data(), psi_end.data(), n * n) * dx * dx).real();
    };

    std::vector<double> alpha(steps, 0.0);
    auto scale_of = [&](double a) { return A * std::tanh(a) + 1.0; };

    auto forward_full = [&](const std::vector<double>& av) {
        std::vector<cplx> psi = psi0s.amp;
        for (std::size_t k = 0; k < steps; ++k)
            fwd.step(psi, potential_at(lam[k]), V, &interaction_at(scale_of(av[k])));
        return psi;
    };

    auto psi_end = forward_full(alpha);
    double J = objective_of(psi_end);
    Stage2Result res;
    res.phi11_target = phi11_target;
    res.objective_history.push_back(J);
    const auto shape = edge_shape(steps, opts.edge_fraction);

    // gradient of J through the diagonal interaction term
    auto diag_gradient = [&](const std::vector<cplx>& chi, const std::vector<cplx>& psi,
                             double a_k) {
        const double s = scale_of(a_k);
        cplx acc = 0.0;
        double wsum;
        for (std::size_t m = 0; m < n; ++m) {
            wsum = deriv.dg_domega(wperp[m] * s, pc) * wperp[m];
            acc += std::conj(chi[m * n + m]) * psi[m * n + m] * wsum;
        }
        const double sech = 1.0 / std::cosh(a_k);
        return (acc * (dx * dx / dx)).imag() * A * sech * sech / pc.hbar;
    };

    double penalty = 0.0;
    {
        std::vector<cplx> chi = target;
        for (std::size_t k = steps; k-- > 0;)
            bwd.step(chi, potential_at(lam[k]), V, &interaction_at(scale_of(alpha[k])));
        std::vector<cplx> psi = psi0s.amp;
        double gmax = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            gmax = std::max(gmax, std::fabs(shape[k] * diag_gradient(chi, psi, alpha[k])));
            const auto& Vk = potential_at(lam[k]);
            const auto& gk = interaction_at(scale_of(alpha[k]));
            fwd.step(psi, Vk, Vk, &gk);
            fwd.step(chi, Vk, Vk, &gk);
        }
        penalty = std::max(gmax / opts.first_update_max, 1e-300);
    }

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::vector<cplx> chi0 = target;
        for (std::size_t k = steps; k-- > 0;)
            bwd.step(chi0, potential_at(lam[k]), V, &interaction_at(scale_of(alpha[k])));

        bool accepted = false;
        for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
            std::vector<double> a_try = alpha;
            std::vector<cplx> chi = chi0;
            std::vector<cplx> psi = psi0s.amp;
            for (std::size_t k = 0; k < steps; ++k) {
                // implicit in the updated control; two fixed-point refinements
                double delta = shape[k] * diag_gradient(chi, psi, alpha[k]) / penalty;
                for (int fp = 0; fp < 2; ++fp)
                    delta = shape[k] * diag_gradient(chi, psi, alpha[k] + delta) / penalty;
                a_try[k] = alpha[k] + delta;
                const auto& Vk = potential_at(lam[k]);
                {
                    const auto& gk = interaction_at(scale_of(a_try[k]));
                    fwd.step(psi, Vk, Vk, &gk);
                }
                {
                    const auto& gk = interaction_at(scale_of(alpha[k]));
                    fwd.step(chi, Vk, Vk, &gk);
                }
            }
            const double J_try = objective_of(psi);
            if (J_try >= J - opts.monotonic_tol) {
                alpha = std::move(a_try);
                psi_end = std::move(psi);
                const double gain = J_try - J;
                J = J_try;
                res.objective_history.push_back(J);
                accepted = true;
                if (gain < opts.convergence_tol && iter > 0) iter = opts.max_iterations;
                break;
            }
            penalty *= 2.0;
        }
        if (!accepted)
            throw std::runtime_error("stage2: objective decreased beyond tolerance; algorithm fault");
    }

    {
        const cplx o = kernels::dot(psi0s.amp.data(), psi_end.data(), n * n) * dx * dx;
        res.F11_unfiltered = std::norm(o);
    }

    res.alpha = to_waveform(alpha, tgrid, WaveformUnit::dimensionless);
    Waveform scale_wf(tgrid, 1.0, WaveformUnit::dimensionless);
    for (std::size_t k = 0; k < scale_wf.size(); ++k) scale_wf[k] = scale_of(res.alpha[k]);
    const double omega_c = opts.cutoff_factor * omega0;
    res.omega_scale = spectral_filter(scale_wf, omega_c).clamped(1.0 - A, 1.0 + A);

    // verify with the filtered control
    {
        std::vector<cplx> psi = psi0s.amp;
        std::vector<cplx> pref = psi0s.amp;
        for (std::size_t k = 0; k < steps; ++k) {
            const auto& Vk = potential_at(lam[k]);
            const auto& gk = interaction_at(res.omega_scale.midpoint(k));
            fwd.step(psi, Vk, Vk, &gk);
            fwd.step(pref, Vk, Vk, nullptr);
        }
        const cplx o = kernels::dot(psi0s.amp.data(), psi.data(), n * n) * dx * dx;
        res.F11 = std::norm(o);
        res.phi11 = std::arg(kernels::dot(psi.data(), pref.data(), n * n));
        res.filter_warning = (res.F11_unfiltered - res.F11) > opts.filter_degradation_warn;
    }
    return res;
}

// ---------------------------------------------------------------------------
// spectral filter, parametric excitation, noise
// ---------------------------------------------------------------------------

Waveform spectral_filter(const Waveform& wf, double omega_c) {
    const std::size_t n = wf.grid.n_steps;  // periodic samples, node n duplicates node 0
    const double span = wf.grid.duration();
    if (omega_c < 10.0 * (2.0 * pi / span))
        throw std::invalid_argument("spectral_filter: cutoff below 10 fundamental harmonics");

    // linear detrend pins the endpoints
    const double v0 = wf.values.front(), v1 = wf.values.back();
    std::vector<cplx> buf(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double line = v0 + (v1 - v0) * double(k) / double(n);
        buf[k] = wf.values[k] - line;
    }

    fftw_plan pf, pb;
    {
        static std::mutex m;
        std::scoped_lock lock(m);
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        pf = fftw_plan_dft_1d(int(n), p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        pb = fftw_plan_dft_1d(int(n), p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(pf, p, p);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t harmonic = std::min(k, n - k);
        const double omega_k = 2.0 * pi * double(harmonic) / span;
        if (omega_k > omega_c) buf[k] = 0.0;
    }
    fftw_execute_dft(pb, p, p);
    {
        static std::mutex m2;
        std::scoped_lock lock(m2);
        fftw_destroy_plan(pf);
        fftw_destroy_plan(pb);
    }

    Waveform out(wf.grid, 0.0, wf.unit);
    const double w0 = buf[0].real() / double(n);  // endpoint re-pin constant
    for (std::size_t k = 0; k < n; ++k) {
        const double line = v0 + (v1 - v0) * double(k) / double(n);
        out.values[k] = buf[k].real() / double(n) - w0 + line;
    }
    out.values[n] = v1;
    return out;
}

Waveform parametric_excitation_probability(const Waveform& omega_scale, double omega_perp0) {
    if (!(omega_perp0 > 0.0))
        throw std::invalid_argument("parametric_excitation: omega_perp0 must be positive");
    for (double v : omega_scale.values)
        if (!(v > 0.0))
            throw std::invalid_argument("parametric_excitation: omega_perp(t) must stay positive");

    const std::size_t n = omega_scale.grid.n_steps;
    const double dt = omega_scale.grid.dt();
    Waveform p(omega_scale.grid, 0.0, WaveformUnit::dimensionless);

    // Ermakov scale equation b'' + w(t)^2 b = w0^2 / b^3, in units of w0
    const double w0 = omega_perp0;
    double b = 1.0, v = 0.0;
    auto wsq = [&](double t) {
        const double s = omega_scale.at(t);
        return (w0 * s) * (w0 * s);
    };
    auto accel = [&](double t, double bb) { return -wsq(t) * bb + w0 * w0 / (bb * bb * bb); };
    // excitation out of the instantaneous ground state; adiabatic following
    // does not count as excitation
    auto prob = [&](double bb, double vv, double w_now) {
        const double u = (w0 / w_now) / (bb * bb);  // Re a / a_inst
        const double wim = -(vv / bb) / w_now;
        return 1.0 - 2.0 * std::sqrt(u) / std::sqrt((1.0 + u) * (1.0 + u) + wim * wim);
    };

    p.values[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = omega_scale.grid.t(k);
        const double k1b = v, k1v = accel(t, b);
        const double k2b = v + 0.5 * dt * k1v, k2v = accel(t + 0.5 * dt, b + 0.5 * dt * k1b);
        const double k3b = v + 0.5 * dt * k2v, k3v = accel(t + 0.5 * dt, b + 0.5 * dt * k2b);
        const double k4b = v + dt * k3v, k4v = accel(t + dt, b + dt * k3b);
        b += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        p.values[k + 1] = std::max(0.0, prob(b, v, w0 * omega_scale[k + 1]));
    }
    return p;
}

Waveform inject_control_noise(const Waveform& wf, double n_a, std::uint64_t seed,
                              bool clamp_unit_interval) {
    if (n_a < 0.0) throw std::invalid_argument("inject_control_noise: negative amplitude");
    Waveform out = wf;
    if (n_a == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& v : out.values) v *= 1.0 + n_a * gauss(rng);
    if (clamp_unit_interval) out = out.clamped(0.0, 1.0);
    return out;
}

}  // namespace chipgate
