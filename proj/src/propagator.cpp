#include "chipgate/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <stdexcept>

namespace chipgate {

// ---------------------------------------------------------------------------
// states
// ---------------------------------------------------------------------------

void Wavefunction1D::normalize() {
    const double s = std::sqrt(norm_sq());
    if (!(s > 0.0)) throw std::runtime_error("wavefunction: zero norm");
    for (auto& a : amp) a /= s;
}

cplx inner(const Wavefunction1D& a, const Wavefunction1D& b) {
    return kernels::dot(a.amp.data(), b.amp.data(), a.amp.size()) * a.grid.spacing();
}

void TwoParticleState::normalize() {
    const double s = std::sqrt(norm_sq());
    if (!(s > 0.0)) throw std::runtime_error("two-particle state: zero norm");
    for (auto& a : amp) a /= s;
}

TwoParticleState TwoParticleState::transposed() const {
    TwoParticleState out;
    out.grid = grid;
    const std::size_t m = n();
    out.amp.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out.amp[j * m + i] = amp[i * m + j];
    return out;
}

double TwoParticleState::symmetry_error() const {
    const std::size_t m = n();
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) diff += 2.0 * std::norm(amp[i * m + j] - amp[j * m + i]);
    return std::sqrt(diff / kernels::squared_norm(amp.data(), amp.size()));
}

cplx inner(const TwoParticleState& a, const TwoParticleState& b) {
    const double dx = a.grid.spacing();
    return kernels::dot(a.amp.data(), b.amp.data(), a.amp.size()) * dx * dx;
}

TwoParticleState product_state(const Wavefunction1D& a, const Wavefunction1D& b) {
    TwoParticleState out;
    out.grid = a.grid;
    const std::size_t m = out.n();
    out.amp.resize(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out.amp[i * m + j] = a.amp[i] * b.amp[j];
    return out;
}

// ---------------------------------------------------------------------------
// FFT workspace
// ---------------------------------------------------------------------------

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FourierWorkspace::FourierWorkspace(std::size_t n) : n_(n) {
    std::scoped_lock lock(plan_mutex());
    std::vector<cplx> probe(n * n);
    auto* p = reinterpret_cast<fftw_complex*>(probe.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan_f1_ = fftw_plan_dft_1d(int(n), p, p, FFTW_FORWARD, flags);
    plan_b1_ = fftw_plan_dft_1d(int(n), p, p, FFTW_BACKWARD, flags);
    plan_f2_ = fftw_plan_dft_2d(int(n), int(n), p, p, FFTW_FORWARD, flags);
    plan_b2_ = fftw_plan_dft_2d(int(n), int(n), p, p, FFTW_BACKWARD, flags);
    if (!plan_f1_ || !plan_b1_ || !plan_f2_ || !plan_b2_)
        throw std::runtime_error("fft: plan creation failed");
}

FourierWorkspace::~FourierWorkspace() {
    std::scoped_lock lock(plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_f1_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_b1_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_f2_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_b2_));
}

void FourierWorkspace::forward_1d(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_f1_), p, p);
}
void FourierWorkspace::inverse_1d(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_b1_), p, p);
}
void FourierWorkspace::forward_2d(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_f2_), p, p);
}
void FourierWorkspace::inverse_2d(cplx* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_b2_), p, p);
}

// ---------------------------------------------------------------------------
// split-operator steps
// ---------------------------------------------------------------------------

SplitOperator1D::SplitOperator1D(const SpatialGrid1D& grid, double mass, cplx time_step,
                                 const PhysicalConstants& pc)
    : grid_(grid), hbar_(pc.hbar), time_step_(time_step),
      fft_(std::make_shared<FourierWorkspace>(grid.n_points)) {
    const auto ks = grid.wavenumbers();
    const std::size_t n = grid.n_points;
    kin_phase_.resize(n);
    ksq_.resize(n);
    const cplx coef = cplx(0, -1) * time_step_ / hbar_;
    for (std::size_t i = 0; i < n; ++i) {
        ksq_[i] = hbar_ * hbar_ * ks[i] * ks[i] / (2.0 * mass);
        kin_phase_[i] = std::exp(coef * ksq_[i]) / double(n);
    }
    half_buf_.resize(n);
}

void SplitOperator1D::step(std::vector<cplx>& psi, const std::vector<double>& V) {
    const std::size_t n = grid_.n_points;
    const cplx coef = cplx(0, -0.5) * time_step_ / hbar_;
    for (std::size_t i = 0; i < n; ++i) half_buf_[i] = std::exp(coef * V[i]);
    kernels::pointwise_multiply(psi.data(), half_buf_.data(), n);
    fft_->forward_1d(psi.data());
    kernels::pointwise_multiply(psi.data(), kin_phase_.data(), n);
    fft_->inverse_1d(psi.data());
    kernels::pointwise_multiply(psi.data(), half_buf_.data(), n);
}

double SplitOperator1D::kinetic_energy(const std::vector<cplx>& psi) const {
    std::vector<cplx> tmp = psi;
    fft_->forward_1d(tmp.data());
    const double num = kernels::weighted_squared_norm(tmp.data(), ksq_.data(), tmp.size());
    const double den = kernels::squared_norm(tmp.data(), tmp.size());
    return num / den;
}

double SplitOperator1D::max_phase_per_step(double vmax) const {
    return vmax * std::abs(time_step_) / hbar_;
}

SplitOperator2D::SplitOperator2D(const SpatialGrid1D& grid, double mass, cplx time_step,
                                 const PhysicalConstants& pc)
    : grid_(grid), hbar_(pc.hbar), time_step_(time_step),
      fft_(std::make_shared<FourierWorkspace>(grid.n_points)) {
    const auto ks = grid.wavenumbers();
    const std::size_t n = grid.n_points;
    ksq_.resize(n);
    for (std::size_t i = 0; i < n; ++i) ksq_[i] = hbar_ * hbar_ * ks[i] * ks[i] / (2.0 * mass);
    kin_phase_.resize(n * n);
    const cplx coef = cplx(0, -1) * time_step_ / hbar_;
    const double scale = 1.0 / double(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            kin_phase_[i * n + j] = std::exp(coef * (ksq_[i] + ksq_[j])) * scale;
    row_phase_.resize(n);
    col_phase_.resize(n);
    diag_phase_.resize(n);
}

void SplitOperator2D::apply_half_potential(std::vector<cplx>& psi, const std::vector<double>& V1,
                                           const std::vector<double>& V2,
                                           const std::vector<double>* gdiag) {
    const std::size_t n = grid_.n_points;
    const cplx coef = cplx(0, -0.5) * time_step_ / hbar_;
    for (std::size_t i = 0; i < n; ++i) row_phase_[i] = std::exp(coef * V1[i]);
    if (&V1 == &V2) {
        col_phase_ = row_phase_;
    } else {
        for (std::size_t i = 0; i < n; ++i) col_phase_[i] = std::exp(coef * V2[i]);
    }
    kernels::outer_multiply(psi.data(), row_phase_.data(), col_phase_.data(), n);
    if (gdiag) {
        for (std::size_t k = 0; k < n; ++k) psi[k * n + k] *= std::exp(coef * (*gdiag)[k]);
    }
}

void SplitOperator2D::step(std::vector<cplx>& psi, const std::vector<double>& V1,
                           const std::vector<double>& V2, const std::vector<double>* gdiag) {
    const std::size_t n = grid_.n_points;
    apply_half_potential(psi, V1, V2, gdiag);
    fft_->forward_2d(psi.data());
    kernels::pointwise_multiply(psi.data(), kin_phase_.data(), n * n);
    fft_->inverse_2d(psi.data());
    apply_half_potential(psi, V1, V2, gdiag);
}

double SplitOperator2D::kinetic_energy(const std::vector<cplx>& psi) const {
    const std::size_t n = grid_.n_points;
    scratch_ = psi;
    fft_->forward_2d(scratch_.data());
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wrow = ksq_[i];
        for (std::size_t j = 0; j < n; ++j) num += (wrow + ksq_[j]) * std::norm(scratch_[i * n + j]);
    }
    return num / kernels::squared_norm(scratch_.data(), scratch_.size());
}

double SplitOperator2D::kinetic_energy_one(const std::vector<cplx>& psi) const {
    const std::size_t n = grid_.n_points;
    scratch_ = psi;
    fft_->forward_2d(scratch_.data());
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wrow = ksq_[i];
        num += wrow * kernels::squared_norm(scratch_.data() + i * n, n);
    }
    return num / kernels::squared_norm(scratch_.data(), scratch_.size());
}

// ---------------------------------------------------------------------------
// interaction
// ---------------------------------------------------------------------------

double transverse_length(double omega_perp, const PhysicalConstants& pc) {
    if (!(omega_perp > 0.0)) throw std::invalid_argument("transverse_length: omega_perp <= 0");
    return std::sqrt(2.0 * pc.hbar / (pc.m_atom * omega_perp));
}

double g1d_strength(double a_s, double omega_perp, const PhysicalConstants& pc) {
    const double a_perp = transverse_length(omega_perp, pc);
    const double denom = 1.0 - 1.46 * a_s / a_perp;
    if (!(denom > 0.0))
        throw std::domain_error("g1d: confinement-induced resonance, 1.46 a_s/a_perp >= 1");
    return 2.0 * pc.hbar * omega_perp * a_s / denom;
}

// ---------------------------------------------------------------------------
// gate propagation
// ---------------------------------------------------------------------------

GatePropagator::GatePropagator(const PotentialSet& pots, TimeGrid tgrid,
                               const PhysicalConstants& pc)
    : pots_(&pots), tgrid_(tgrid), pc_(pc) {}

SectorTrajectory GatePropagator::run_sector(int i, int j, const TwoParticleState& psi0,
                                            const GateControls& controls,
                                            const InteractionSpec& interaction,
                                            const SectorRunOptions& opts) const {
    const PotentialSet& pot = *pots_;
    const std::size_t n = pot.grid.n_points;
    const double dx = pot.grid.spacing();
    const double dt = tgrid_.dt();
    const Waveform& lam = controls.lambda;
    const Waveform& lam0 = controls.lambda0 ? *controls.lambda0 : controls.lambda;
    if (!(lam.grid == tgrid_) || !(lam0.grid == tgrid_))
        throw std::invalid_argument("run_sector: control waveforms do not cover the time grid");
    if (controls.omega_scale && !(controls.omega_scale->grid == tgrid_))
        throw std::invalid_argument("run_sector: omega_perp waveform does not cover the time grid");
    if (std::fabs(psi0.norm_sq() - 1.0) > 1e-8)
        throw std::invalid_argument("run_sector: initial state not normalized");

    const std::vector<double>& ui = (i == 0) ? pot.u_0 : pot.u_1;
    const std::vector<double>& uj = (j == 0) ? pot.u_0 : pot.u_1;

    // stability guard over the full modulation range
    double vmax_single = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double base = std::fabs(pot.u_c[k]);
        const double full_i = std::fabs(pot.u_c[k] + ui[k] + pot.u_comp[k]);
        const double full_j = std::fabs(pot.u_c[k] + uj[k] + pot.u_comp[k]);
        vmax_single = std::max({vmax_single, base, full_i, full_j});
    }
    const double phase_bound = 2.0 * vmax_single * dt / pc_.hbar;
    if (phase_bound > pi / 4.0)
        throw std::runtime_error("run_sector: potential phase per step " +
                                 std::to_string(phase_bound) + " rad exceeds pi/4; use dt <= " +
                                 std::to_string(dt * (pi / 4.0) / phase_bound) + " s");

    SplitOperator2D prop(pot.grid, pc_.m_atom, cplx(dt, 0.0), pc_);
    std::vector<cplx> psi = psi0.amp;
    std::vector<cplx> psi_ref = psi0.amp;

    std::vector<double> V1(n), V2(n), gdiag(n);
    const bool same_potential = (i == j);
    const bool with_interaction = interaction.enabled;
    const double a_s = interaction.a_s(i, j);

    // |x1 - x2| weights for the separation diagnostic
    std::vector<double> sep_w;
    if (opts.record_kinetic) {
        sep_w.resize(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                sep_w[r * n + c] = std::fabs(pot.grid.x(r) - pot.grid.x(c));
    }

    SectorTrajectory out;
    double prev_phase = 0.0;
    auto record = [&](double t) {
        out.times.push_back(t);
        const cplx o = kernels::dot(psi.data(), psi0.amp.data(), n * n) * dx * dx;
        out.overlap.push_back(o);
        out.fidelity.push_back(std::norm(o));
        const cplx cross = kernels::dot(psi.data(), psi_ref.data(), n * n) * dx * dx;
        const double raw = std::arg(cross);
        const double unwrapped = raw + 2.0 * pi * std::round((prev_phase - raw) / (2.0 * pi));
        prev_phase = unwrapped;
        out.phase.push_back(unwrapped);
        out.phase_ok.push_back(std::abs(cross) >= opts.phase_floor);
        out.norm.push_back(kernels::squared_norm(psi.data(), n * n) * dx * dx);
        if (opts.record_kinetic) {
            out.kinetic_one.push_back(prop.kinetic_energy_one(psi));
            out.separation.push_back(kernels::weighted_squared_norm(psi.data(), sep_w.data(), n * n) *
                                     dx * dx);
        }
    };
    record(tgrid_.t(0));

    for (std::size_t k = 0; k < tgrid_.n_steps; ++k) {
        const double l = lam.midpoint(k);
        const double l0 = lam0.midpoint(k);
        const double s = controls.omega_scale ? controls.omega_scale->midpoint(k) : 1.0;
        for (std::size_t m = 0; m < n; ++m) {
            V1[m] = pot.u_c[m] + l * ui[m] + l0 * pot.u_comp[m];
            if (!same_potential) V2[m] = pot.u_c[m] + l * uj[m] + l0 * pot.u_comp[m];
        }
        const std::vector<double>& V2ref = same_potential ? V1 : V2;
        if (with_interaction) {
            for (std::size_t m = 0; m < n; ++m)
                gdiag[m] = g1d_strength(a_s, pot.omega_perp[m] * s, pc_) / dx;
            prop.step(psi, V1, V2ref, &gdiag);
        } else {
            prop.step(psi, V1, V2ref, nullptr);
        }
        prop.step(psi_ref, V1, V2ref, nullptr);
        if ((k + 1) % opts.sample_every == 0 || k + 1 == tgrid_.n_steps) record(tgrid_.t(k + 1));
    }

    if (std::fabs(out.norm.back() - 1.0) > opts.norm_tolerance)
        throw std::runtime_error("run_sector: norm drifted by " +
                                 std::to_string(out.norm.back() - 1.0));

    out.final_state = TwoParticleState{pot.grid, std::move(psi)};
    out.final_reference = TwoParticleState{pot.grid, std::move(psi_ref)};
    return out;
}

TwoParticleState symmetrized_pair(const TwoParticleState& labeled) {
    const TwoParticleState swapped = labeled.transposed();
    TwoParticleState sym;
    sym.grid = labeled.grid;
    sym.amp.resize(labeled.amp.size());
    for (std::size_t i = 0; i < labeled.amp.size(); ++i)
        sym.amp[i] = labeled.amp[i] + swapped.amp[i];
    sym.normalize();
    return sym;
}

GateTrajectory simulate_gate(const PotentialSet& pots, const TimeGrid& tgrid,
                             const GateControls& controls, const InteractionSpec& interaction,
                             const TwoParticleState& psi0, const GateSimOptions& opts,
                             const PhysicalConstants& pc) {
    GatePropagator prop(pots, tgrid, pc);
    GateTrajectory out;
    out.tgrid = tgrid;

    // identical internal states live in the exchange-symmetric motional
    // subspace; mixed sectors keep the well-labeled product state
    const TwoParticleState psi0_sym = symmetrized_pair(psi0);

    auto run_one = [&](int idx) {
        const auto [si, sj] = GateTrajectory::sector_labels[std::size_t(idx)];
        SectorRunOptions sopts = opts.sector;
        sopts.record_kinetic = opts.sector.record_kinetic || (si == 1 && sj == 1);
        return prop.run_sector(si, sj, (si == sj) ? psi0_sym : psi0, controls, interaction,
                               sopts);
    };

    const unsigned jobs = std::max(1u, opts.jobs);
    std::vector<std::future<SectorTrajectory>> futures(4);
    const int prelaunch = int(std::min(jobs, 4u));
    for (int idx = 0; idx < prelaunch; ++idx)
        futures[std::size_t(idx)] = std::async(std::launch::async, run_one, idx);
    int next = prelaunch;
    for (int idx = 0; idx < 4; ++idx) {
        out.sectors[std::size_t(idx)] = futures[std::size_t(idx)].get();
        if (next < 4) {
            futures[std::size_t(next)] = std::async(std::launch::async, run_one, next);
            ++next;
        }
    }

    out.times = out.sectors[0].times;
    const std::size_t m = out.times.size();
    out.phi_g.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        out.phi_g[k] = out.sectors[3].phase[k] + out.sectors[0].phase[k] - out.sectors[1].phase[k] -
                       out.sectors[2].phase[k];
    for (int s = 0; s < 4; ++s) {
        out.O_end[std::size_t(s)] = out.sectors[std::size_t(s)].overlap.back();
        out.F_end[std::size_t(s)] = out.sectors[std::size_t(s)].fidelity.back();
        out.phi_end[std::size_t(s)] = out.sectors[std::size_t(s)].phase.back();
    }
    out.phi_g_end = out.phi_g.back();
    return out;
}

double kinetic_energy_estimate(const SectorTrajectory& traj, double t_lo, double t_hi) {
    if (traj.kinetic_one.empty() || traj.separation.empty())
        throw std::invalid_argument("kinetic_energy_estimate: trajectory lacks diagnostics");
    double best = -1.0;
    for (std::size_t k = 1; k + 1 < traj.times.size(); ++k) {
        if (traj.times[k] < t_lo || traj.times[k] > t_hi) continue;
        if (traj.separation[k] < traj.separation[k - 1] &&
            traj.separation[k] <= traj.separation[k + 1])
            best = std::max(best, traj.kinetic_one[k]);
    }
    if (best < 0.0) throw std::runtime_error("kinetic_energy_estimate: no collision in window");
    return best;
}

GroundState2D two_particle_ground_state(const std::vector<double>& V, const SpatialGrid1D& grid,
                                        double g1d, int max_iters, double tol,
                                        const PhysicalConstants& pc) {
    const std::size_t n = grid.n_points;
    const double dx = grid.spacing();
    GroundState2D out;
    out.state.grid = grid;
    out.state.amp.resize(n * n);
    // smooth symmetric seed spanning the well region
    const double sigma = 0.15 * (grid.x_max - grid.x_min);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x1 = grid.x(i), x2 = grid.x(j);
            out.state.amp[i * n + j] = std::exp(-(x1 * x1 + x2 * x2) / (2.0 * sigma * sigma));
        }
    out.state.normalize();

    std::vector<double> gdiag(n, g1d / dx);
    double vmax = 0.0;
    for (double v : V) vmax = std::max(vmax, std::fabs(v));
    vmax = std::max(vmax, 1e-30);

    auto energy_of = [&](SplitOperator2D& prop, const TwoParticleState& st) {
        double e = prop.kinetic_energy(st.amp);
        double vsum = 0.0, gsum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) vsum += (V[i] + V[j]) * std::norm(st.amp[i * n + j]);
        for (std::size_t k = 0; k < n; ++k) gsum += gdiag[k] * std::norm(st.amp[k * n + k]);
        const double nrm = kernels::squared_norm(st.amp.data(), st.amp.size());
        return e + (vsum + gsum) / nrm;
    };

    double dtau = 0.2 * pc.hbar / vmax;
    double energy = 0.0;
    int iters_left = max_iters;
    const int check_every = 16;
    for (int stage = 0; stage < 4; ++stage) {
        SplitOperator2D prop(grid, pc.m_atom, cplx(0.0, -dtau), pc);
        double prev = 1e300;
        while (iters_left > 0) {
            for (int s = 0; s < check_every && iters_left > 0; ++s, --iters_left) {
                prop.step(out.state.amp, V, V, &gdiag);
                out.state.normalize();
            }
            energy = energy_of(prop, out.state);
            if (std::fabs(energy - prev) < tol * std::fabs(energy) + 1e-300) break;
            prev = energy;
        }
        dtau *= 0.25;
    }
    out.energy = energy;
    return out;
}

}  // namespace chipgate
