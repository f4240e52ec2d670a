#include "chipgate/eigenstates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chipgate/potentials.hpp"
#include "chipgate/propagator.hpp"

namespace chipgate {

std::vector<cplx> apply_hamiltonian(const std::vector<cplx>& psi, const std::vector<double>& V,
                                    const SpatialGrid1D& grid, const PhysicalConstants& pc) {
    const std::size_t n = grid.n_points;
    FourierWorkspace fft(n);
    const auto ks = grid.wavenumbers();
    std::vector<cplx> kin = psi;
    fft.forward_1d(kin.data());
    for (std::size_t i = 0; i < n; ++i)
        kin[i] *= pc.hbar * pc.hbar * ks[i] * ks[i] / (2.0 * pc.m_atom * double(n));
    fft.inverse_1d(kin.data());
    for (std::size_t i = 0; i < n; ++i) kin[i] += V[i] * psi[i];
    return kin;
}

double energy_expectation(const Wavefunction1D& psi, const std::vector<double>& V,
                          const PhysicalConstants& pc) {
    const auto hpsi = apply_hamiltonian(psi.amp, V, psi.grid, pc);
    const cplx num = kernels::dot(psi.amp.data(), hpsi.data(), psi.amp.size());
    const double den = kernels::squared_norm(psi.amp.data(), psi.amp.size());
    return num.real() / den;
}

namespace {

void orthogonalize(std::vector<cplx>& psi, const std::vector<Wavefunction1D>& against,
                   double dx) {
    for (const auto& s : against) {
        const cplx c = kernels::dot(s.amp.data(), psi.data(), psi.size()) * dx;
        for (std::size_t i = 0; i < psi.size(); ++i) psi[i] -= c * s.amp[i];
    }
}

/// Imaginary-time relaxation to the lowest state orthogonal to `against`.
Wavefunction1D itp_lowest(const std::vector<double>& V, const SpatialGrid1D& grid,
                          const std::vector<cplx>& seed, const std::vector<Wavefunction1D>& against,
                          const EigensolveOptions& opts, const PhysicalConstants& pc) {
    const double dx = grid.spacing();
    Wavefunction1D out{grid, seed, 0.0};
    orthogonalize(out.amp, against, dx);
    out.normalize();

    double vspan = 0.0;
    for (double v : V) vspan = std::max(vspan, std::fabs(v));
    vspan = std::max(vspan, 1e-32);

    double dtau = 0.25 * pc.hbar / vspan;
    int iters_left = opts.max_iters;
    double energy = 0.0;
    for (int stage = 0; stage < 3; ++stage) {
        SplitOperator1D prop(grid, pc.m_atom, cplx(0.0, -dtau), pc);
        auto energy_now = [&]() {
            double vsum = 0.0, nsum = 0.0;
            for (std::size_t i = 0; i < out.amp.size(); ++i) {
                const double d = std::norm(out.amp[i]);
                vsum += V[i] * d;
                nsum += d;
            }
            return prop.kinetic_energy(out.amp) + vsum / nsum;
        };
        energy = energy_now();
        double prev = 1e300;
        const int check_every = 8;
        while (iters_left > 0) {
            for (int s = 0; s < check_every && iters_left > 0; ++s, --iters_left) {
                prop.step(out.amp, V);
                orthogonalize(out.amp, against, dx);
                out.normalize();
            }
            energy = energy_now();
            if (std::fabs(energy - prev) < opts.energy_tol * std::fabs(energy) + 1e-320) break;
            prev = energy;
        }
        dtau *= 0.25;
    }
    out.energy = energy;
    return out;
}

struct WellLayout {
    bool double_well = false;
    std::size_t barrier_index = 0;  // only meaningful for a double well
    double barrier_energy = 0.0;
    std::vector<std::size_t> minima;
};

WellLayout classify(const std::vector<double>& V, const SpatialGrid1D& grid) {
    WellLayout lay;
    lay.minima = distinct_wells(V);
    if (lay.minima.empty()) throw std::invalid_argument("eigenstates: potential has no minimum");
    if (lay.minima.size() > 2)
        throw std::invalid_argument("eigenstates: potential has more than two wells");
    lay.double_well = lay.minima.size() == 2;
    if (lay.double_well) {
        std::size_t top = lay.minima[0];
        for (std::size_t i = lay.minima[0]; i <= lay.minima[1]; ++i)
            if (V[i] > V[top]) top = i;
        lay.barrier_index = top;
        lay.barrier_energy = V[top];
    } else {
        lay.barrier_energy = *std::max_element(V.begin(), V.end());
    }
    (void)grid;
    return lay;
}

std::vector<double> masked_potential(const std::vector<double>& V, const SpatialGrid1D& grid,
                                     const WellLayout& lay, Well which,
                                     const PhysicalConstants& pc) {
    // harmonic wall rising from the barrier top keeps the relaxation on one side
    std::vector<double> Vm = V;
    const double xb = grid.x(lay.barrier_index);
    const double omega_wall = 40.0 * std::sqrt(std::max(lay.barrier_energy - V[lay.minima[0]], 1e-32) /
                                               pc.m_atom) /
                              std::max(grid.x(lay.minima[1]) - grid.x(lay.minima[0]), grid.spacing());
    const double k_wall = pc.m_atom * omega_wall * omega_wall;
    for (std::size_t i = 0; i < Vm.size(); ++i) {
        const double x = grid.x(i);
        const double over = (which == Well::left) ? x - xb : xb - x;
        if (over > 0) Vm[i] += 0.5 * k_wall * over * over;
    }
    return Vm;
}

std::vector<cplx> gaussian_seed(const SpatialGrid1D& grid, double center, double width, int nodes) {
    std::vector<cplx> s(grid.n_points);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const double u = (grid.x(i) - center) / width;
        double poly = 1.0;
        if (nodes == 1) poly = u;
        if (nodes == 2) poly = u * u - 0.5;
        if (nodes == 3) poly = u * u * u - 1.5 * u;
        s[i] = poly * std::exp(-0.5 * u * u);
    }
    return s;
}

}  // namespace

std::vector<Wavefunction1D> well_eigenstates(const std::vector<double>& V,
                                             const SpatialGrid1D& grid, Well which, int n_max,
                                             const EigensolveOptions& opts,
                                             const PhysicalConstants& pc) {
    if (n_max < 0 || n_max > 3)
        throw std::invalid_argument("well_eigenstates: n_max must be in [0, 3]");
    const WellLayout lay = classify(V, grid);
    const std::size_t i_min = lay.double_well
                                  ? (which == Well::left ? lay.minima[0] : lay.minima[1])
                                  : lay.minima[0];
    const double x_well = grid.x(i_min);

    // local width estimate from the curvature at the minimum
    const auto fit = fit_well(V, grid, i_min, 5, pc.m_atom);
    const double a_ho = std::sqrt(pc.hbar / (pc.m_atom * fit.frequency));

    const std::vector<double> Vm =
        lay.double_well ? masked_potential(V, grid, lay, which, pc) : V;

    std::vector<Wavefunction1D> states;
    for (int k = 0; k <= n_max; ++k) {
        auto seed = gaussian_seed(grid, x_well, a_ho, k);
        Wavefunction1D s = itp_lowest(Vm, grid, seed, states, opts, pc);
        states.push_back(std::move(s));
    }

    if (lay.double_well) {
        // short relaxation on the true potential heals the wall-side tail
        const double dtau = opts.relax_time_periods * 2.0 * pi / fit.frequency / 50.0;
        std::vector<Wavefunction1D> relaxed;
        for (auto& s : states) {
            SplitOperator1D prop(grid, pc.m_atom, cplx(0.0, -dtau), pc);
            for (int it = 0; it < 50; ++it) {
                prop.step(s.amp, V);
                orthogonalize(s.amp, relaxed, grid.spacing());
                s.normalize();
            }
            s.energy = energy_expectation(s, V, pc);
            relaxed.push_back(std::move(s));
        }
        states = std::move(relaxed);
    }

    for (const auto& s : states) {
        if (s.energy > lay.barrier_energy)
            throw std::runtime_error("well_eigenstates: state above the barrier requested (E = " +
                                     std::to_string(s.energy) + " J)");
    }

    if (lay.double_well && opts.check_splitting) {
        // localized pair rotation rate from the two-level reduction
        const Wavefunction1D& L = states.front();
        Wavefunction1D R{grid, {}, 0.0};
        R.amp.resize(grid.n_points);
        for (std::size_t i = 0; i < grid.n_points; ++i)
            R.amp[i] = L.amp[grid.n_points - 1 - i];  // mirror seed
        auto mirror = itp_lowest(masked_potential(V, grid, lay, which == Well::left ? Well::right
                                                                                    : Well::left, pc),
                                 grid, R.amp, {}, opts, pc);
        const double dxs = grid.spacing();
        const auto hL = apply_hamiltonian(L.amp, V, grid, pc);
        const cplx s_ov = kernels::dot(mirror.amp.data(), L.amp.data(), grid.n_points) * dxs;
        const cplx h_ov = kernels::dot(mirror.amp.data(), hL.data(), grid.n_points) * dxs;
        const double e_mean = 0.5 * (L.energy + mirror.energy);
        const double denom = std::max(1.0 - std::norm(s_ov), 1e-12);
        const double splitting = 2.0 * std::abs(h_ov - s_ov * e_mean) / denom;  // J
        const double rate = splitting / pc.hbar;
        if (rate > opts.max_splitting_rate)
            throw std::runtime_error(
                "well_eigenstates: tunneling splitting too large for localized states (" +
                std::to_string(rate) + " rad/s)");
    }
    return states;
}

Wavefunction1D ground_state_in_well(const std::vector<double>& V, const SpatialGrid1D& grid,
                                    Well which, const EigensolveOptions& opts,
                                    const PhysicalConstants& pc) {
    return well_eigenstates(V, grid, which, 0, opts, pc).front();
}

}  // namespace chipgate
