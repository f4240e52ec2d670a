#include "chipgate/cpw.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chipgate {

namespace {
constexpr double eps0 = 8.8541878128e-12;  // F/m
constexpr double mu0 = 1.25663706212e-6;   // T m/A
}  // namespace

void CPWSpec::validate() const {
    if (!(center_width > 0 && gap > 0 && thickness > 0 && ground_width > 0))
        throw std::invalid_argument("cpw: geometry must be positive");
    if (!(sigma > 0)) throw std::invalid_argument("cpw: conductivity must be positive");
    if (!(eps_r >= 1)) throw std::invalid_argument("cpw: eps_r must be >= 1");
    if (!(omega > 0)) throw std::invalid_argument("cpw: frequency must be positive");
    // uniform current density rests on t < delta_s
    if (!(thickness < skin_depth(omega, sigma)))
        throw std::invalid_argument("cpw: thickness exceeds the skin depth");
}

double skin_depth(double omega, double sigma) {
    if (!(omega > 0 && sigma > 0)) throw std::invalid_argument("skin_depth: need positive inputs");
    return std::sqrt(2.0 / (omega * mu0 * sigma));
}

bool FieldMap2D::contains(double px, double pz) const {
    return px >= x0 && px <= x0 + cell * double(nx - 1) && pz >= z0 &&
           pz <= z0 + cell * double(nz - 1);
}

void FieldMap2D::sample(double px, double pz, double& ex, double& ez, double& bx,
                        double& bz) const {
    if (!contains(px, pz)) throw std::out_of_range("field map: point outside simulated window");
    const double fx = (px - x0) / cell;
    const double fz = (pz - z0) / cell;
    const std::size_t i = std::min(std::size_t(fx), nx - 2);
    const std::size_t j = std::min(std::size_t(fz), nz - 2);
    const double ax = fx - double(i), az = fz - double(j);
    auto lerp = [&](const std::vector<double>& f) -> double {
        if (f.empty()) return 0.0;
        const double v00 = f[idx(i, j)], v10 = f[idx(i + 1, j)];
        const double v01 = f[idx(i, j + 1)], v11 = f[idx(i + 1, j + 1)];
        return (1 - ax) * (1 - az) * v00 + ax * (1 - az) * v10 + (1 - ax) * az * v01 +
               ax * az * v11;
    };
    ex = lerp(Ex);
    ez = lerp(Ez);
    bx = lerp(Bx);
    bz = lerp(Bz);
}

namespace {

struct Mesh {
    double x0, z0, h;
    std::size_t nx, nz;
    // 0 = free, 1 = center conductor, 2 = left ground, 3 = right ground
    std::vector<uint8_t> mark;
    std::size_t idx(std::size_t i, std::size_t j) const { return j * nx + i; }
};

Mesh build_mesh(const CPWSpec& s, const SolverWindow& w) {
    const double half_extent = 0.5 * s.center_width + s.gap + s.ground_width;
    Mesh m;
    m.h = w.cell;
    const auto cells = [&](double span) { return std::size_t(std::ceil(span / w.cell)); };
    const std::size_t half_nx = cells(half_extent + w.margin);
    m.nx = 2 * half_nx + 1;
    m.x0 = -double(half_nx) * w.cell;  // node exactly at x = 0
    const std::size_t below = cells(w.margin);
    const std::size_t above = cells(s.thickness + w.margin);
    m.nz = below + above + 1;
    m.z0 = -double(below) * w.cell;  // node exactly at z = 0
    m.mark.assign(m.nx * m.nz, 0);

    const double snap = 0.25 * w.cell;
    for (std::size_t j = 0; j < m.nz; ++j) {
        const double z = m.z0 + double(j) * w.cell;
        if (z < -snap || z > s.thickness + snap) continue;
        for (std::size_t i = 0; i < m.nx; ++i) {
            const double x = m.x0 + double(i) * w.cell;
            const double ax = std::fabs(x);
            if (ax <= 0.5 * s.center_width + snap)
                m.mark[m.idx(i, j)] = 1;
            else if (ax >= 0.5 * s.center_width + s.gap - snap &&
                     ax <= 0.5 * s.center_width + s.gap + s.ground_width + snap)
                m.mark[m.idx(i, j)] = (x < 0) ? 2 : 3;
        }
    }
    return m;
}

/// Red-black SOR for div(c grad u) = -f with Dirichlet boundary/conductor
/// nodes. Face coefficients supplied per node pair via cface. Deterministic
/// sweep order; throws with the residual when not converged.
void solve_sor(const Mesh& m, std::vector<double>& u, const std::vector<uint8_t>& dirichlet,
               const std::vector<double>& f,
               const std::vector<double>& ceast, const std::vector<double>& cnorth,
               double tol, std::size_t max_sweeps, const std::string& label) {
    const std::size_t nx = m.nx, nz = m.nz;
    const double omega_sor = 2.0 / (1.0 + std::sin(pi / double(std::max(nx, nz))));
    double max_update = 0.0;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        max_update = 0.0;
        for (int color = 0; color < 2; ++color) {
            for (std::size_t j = 1; j + 1 < nz; ++j) {
                for (std::size_t i = 1 + ((j + std::size_t(color)) & 1); i + 1 < nx; i += 2) {
                    const std::size_t k = m.idx(i, j);
                    if (dirichlet[k]) continue;
                    const double cw = ceast[k - 1], ce = ceast[k];
                    const double cs = cnorth[k - nx], cn = cnorth[k];
                    const double diag = cw + ce + cs + cn;
                    const double rhs = cw * u[k - 1] + ce * u[k + 1] + cs * u[k - nx] +
                                       cn * u[k + nx] + f[k];
                    const double unew = (1.0 - omega_sor) * u[k] + omega_sor * rhs / diag;
                    max_update = std::max(max_update, std::fabs(unew - u[k]));
                    u[k] = unew;
                }
            }
        }
        if ((sweep & 15) == 15 && max_update < tol) return;
    }
    if (max_update >= tol)
        throw std::runtime_error("cpw: " + label + " relaxation did not converge, residual " +
                                 std::to_string(max_update));
}

}  // namespace

double cpw_electrostatics(const CPWSpec& spec, const SolverWindow& window, FieldMap2D& maps,
                          double* C_mutual) {
    spec.validate();
    const Mesh m = build_mesh(spec, window);
    const std::size_t n = m.nx * m.nz;
    std::vector<double> phi(n, 0.0), f(n, 0.0);
    std::vector<uint8_t> dirichlet(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        if (m.mark[k]) {
            dirichlet[k] = 1;
            phi[k] = (m.mark[k] == 1) ? 1.0 : 0.0;
        }
    }
    // window boundary held at zero
    for (std::size_t i = 0; i < m.nx; ++i) dirichlet[m.idx(i, 0)] = dirichlet[m.idx(i, m.nz - 1)] = 1;
    for (std::size_t j = 0; j < m.nz; ++j) dirichlet[m.idx(0, j)] = dirichlet[m.idx(m.nx - 1, j)] = 1;

    // permittivity on faces: substrate half-space below the conductor plane
    auto eps_at = [&](double z) {
        if (z < -0.25 * m.h) return spec.eps_r;
        if (z > 0.25 * m.h) return 1.0;
        return 0.5 * (1.0 + spec.eps_r);
    };
    std::vector<double> ceast(n, 0.0), cnorth(n, 0.0);
    for (std::size_t j = 0; j < m.nz; ++j) {
        const double z = m.z0 + double(j) * m.h;
        for (std::size_t i = 0; i < m.nx; ++i) {
            const std::size_t k = m.idx(i, j);
            if (i + 1 < m.nx) ceast[k] = eps_at(z);
            if (j + 1 < m.nz) cnorth[k] = eps_at(z + 0.5 * m.h);
        }
    }
    solve_sor(m, phi, dirichlet, f, ceast, cnorth, window.tolerance, window.max_sweeps,
              "electrostatic");

    // discrete Gauss law: net flux out of a marked conductor region
    auto charge_of = [&](uint8_t mark) {
        double q = 0.0;
        for (std::size_t j = 1; j + 1 < m.nz; ++j) {
            for (std::size_t i = 1; i + 1 < m.nx; ++i) {
                const std::size_t k = m.idx(i, j);
                if (m.mark[k] != mark) continue;
                if (m.mark[k + 1] != mark) q += ceast[k] * (phi[k] - phi[k + 1]);
                if (m.mark[k - 1] != mark) q += ceast[k - 1] * (phi[k] - phi[k - 1]);
                if (m.mark[k + m.nx] != mark) q += cnorth[k] * (phi[k] - phi[k + m.nx]);
                if (m.mark[k - m.nx] != mark) q += cnorth[k - m.nx] * (phi[k] - phi[k - m.nx]);
            }
        }
        return eps0 * q;
    };
    const double C = charge_of(1);  // per unit V
    if (C_mutual) *C_mutual = -charge_of(2);

    maps.x0 = m.x0;
    maps.z0 = m.z0;
    maps.cell = m.h;
    maps.nx = m.nx;
    maps.nz = m.nz;
    maps.Ex.assign(n, 0.0);
    maps.Ez.assign(n, 0.0);
    for (std::size_t j = 1; j + 1 < m.nz; ++j) {
        for (std::size_t i = 1; i + 1 < m.nx; ++i) {
            const std::size_t k = m.idx(i, j);
            maps.Ex[k] = -(phi[k + 1] - phi[k - 1]) / (2.0 * m.h);
            maps.Ez[k] = -(phi[k + m.nx] - phi[k - m.nx]) / (2.0 * m.h);
        }
    }
    return C;
}

void cpw_magnetoquasistatics(const CPWSpec& spec, const SolverWindow& window, FieldMap2D& maps,
                             double& L, double& R) {
    spec.validate();
    const Mesh m = build_mesh(spec, window);
    const std::size_t n = m.nx * m.nz;
    std::vector<double> A(n, 0.0), f(n, 0.0);
    std::vector<uint8_t> dirichlet(n, 0);
    std::vector<double> cone(n, 1.0);

    // uniform current density, +1 A center and -1/2 A in each ground
    const double Jc = 1.0 / (spec.center_width * spec.thickness);
    const double Jg = -0.5 / (spec.ground_width * spec.thickness);
    std::vector<double> J(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        if (m.mark[k]) J[k] = (m.mark[k] == 1) ? Jc : Jg;
    for (std::size_t k = 0; k < n; ++k) f[k] = mu0 * J[k] * m.h * m.h;

    for (std::size_t i = 0; i < m.nx; ++i) dirichlet[m.idx(i, 0)] = dirichlet[m.idx(i, m.nz - 1)] = 1;
    for (std::size_t j = 0; j < m.nz; ++j) dirichlet[m.idx(0, j)] = dirichlet[m.idx(m.nx - 1, j)] = 1;

    solve_sor(m, A, dirichlet, f, cone, cone, window.tolerance * mu0, window.max_sweeps,
              "magneto-quasistatic");

    // L from the interaction energy: W = 1/2 * integral(A J), I0 = 1
    double W2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) W2 += A[k] * J[k];
    L = W2 * m.h * m.h;

    // DC loop resistance: center in series with the two grounds in parallel
    R = 1.0 / (spec.sigma * spec.center_width * spec.thickness) +
        1.0 / (2.0 * spec.sigma * spec.ground_width * spec.thickness);

    maps.x0 = m.x0;
    maps.z0 = m.z0;
    maps.cell = m.h;
    maps.nx = m.nx;
    maps.nz = m.nz;
    maps.Bx.assign(n, 0.0);
    maps.Bz.assign(n, 0.0);
    for (std::size_t j = 1; j + 1 < m.nz; ++j) {
        for (std::size_t i = 1; i + 1 < m.nx; ++i) {
            const std::size_t k = m.idx(i, j);
            maps.Bx[k] = -(A[k + m.nx] - A[k - m.nx]) / (2.0 * m.h);
            maps.Bz[k] = (A[k + 1] - A[k - 1]) / (2.0 * m.h);
        }
    }
}

double two_wire_capacitance(double width, double thickness, double separation,
                            const SolverWindow& window) {
    if (!(width > 0 && thickness > 0 && separation > width))
        throw std::invalid_argument("two_wire_capacitance: bad geometry");
    // reuse the CPW mesh with the pair as "grounds" and an unused center slot
    CPWSpec spec;
    spec.center_width = 1e-12;  // vanishing center, never marked at this cell size
    spec.gap = 0.5 * (separation - width) - 0.5e-12;
    spec.thickness = thickness;
    spec.ground_width = width;
    const Mesh m = build_mesh(spec, window);
    const std::size_t n = m.nx * m.nz;
    std::vector<double> phi(n, 0.0), f(n, 0.0), cone(n, 1.0);
    std::vector<uint8_t> dirichlet(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        if (m.mark[k] == 2) {
            dirichlet[k] = 1;
            phi[k] = +0.5;
        } else if (m.mark[k] == 3) {
            dirichlet[k] = 1;
            phi[k] = -0.5;
        }
    }
    for (std::size_t i = 0; i < m.nx; ++i) dirichlet[m.idx(i, 0)] = dirichlet[m.idx(i, m.nz - 1)] = 1;
    for (std::size_t j = 0; j < m.nz; ++j) dirichlet[m.idx(0, j)] = dirichlet[m.idx(m.nx - 1, j)] = 1;
    solve_sor(m, phi, dirichlet, f, cone, cone, window.tolerance, window.max_sweeps, "two-wire");

    double q = 0.0;
    for (std::size_t j = 1; j + 1 < m.nz; ++j) {
        for (std::size_t i = 1; i + 1 < m.nx; ++i) {
            const std::size_t k = m.idx(i, j);
            if (m.mark[k] != 2) continue;
            if (m.mark[k + 1] != 2) q += phi[k] - phi[k + 1];
            if (m.mark[k - 1] != 2) q += phi[k] - phi[k - 1];
            if (m.mark[k + m.nx] != 2) q += phi[k] - phi[k + m.nx];
            if (m.mark[k - m.nx] != 2) q += phi[k] - phi[k - m.nx];
        }
    }
    return eps0 * q;  // Q / (V+ - V-) with unit differential drive
}

void cpw_impedance(double R, double L, double C, double omega, std::complex<double>& Zc,
                   double& beta_mw, double& alpha_mw) {
    const std::complex<double> series(R, omega * L);
    const std::complex<double> shunt(0.0, omega * C);
    Zc = std::sqrt(series / shunt);
    const std::complex<double> gamma = std::sqrt(series * shunt);
    beta_mw = gamma.imag();
    alpha_mw = gamma.real();
}

CPWResult analyze_cpw(const CPWSpec& spec, const SolverWindow& window) {
    CPWResult out;
    FieldMap2D emaps;
    out.C = cpw_electrostatics(spec, window, emaps);
    cpw_magnetoquasistatics(spec, window, out.maps, out.L, out.R);
    out.maps.Ex = std::move(emaps.Ex);
    out.maps.Ez = std::move(emaps.Ez);
    cpw_impedance(out.R, out.L, out.C, spec.omega, out.Zc, out.beta_mw, out.alpha_mw);
    return out;
}

MwFieldSample mw_field_at(const CPWResult& result, double V0, double I0, double x, double z) {
    MwFieldSample s;
    double ex, ez, bx, bz;
    result.maps.sample(x, z, ex, ez, bx, bz);
    s.Ex = ex * V0;
    s.Ez = ez * V0;
    s.Bx = bx * I0;
    s.Bz = bz * I0;
    return s;
}

}  // namespace chipgate
