#include "chipgate/potentials.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chipgate/detail/nelder_mead.hpp"
#include "chipgate/hyperfine.hpp"

namespace chipgate {

std::vector<std::size_t> local_minima(const std::vector<double>& values, double min_barrier) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] < values[i - 1] && values[i] <= values[i + 1]) {
            // plateau guard: require a strict rise somewhere to the right
            std::size_t j = i + 1;
            while (j + 1 < values.size() && values[j] == values[i]) ++j;
            if (values[j] > values[i]) out.push_back(i);
        }
    }
    if (min_barrier <= 0.0 || out.size() < 2) return out;
    // merge wells whose separating barrier is below the threshold
    bool merged = true;
    while (merged && out.size() >= 2) {
        merged = false;
        for (std::size_t k = 0; k + 1 < out.size(); ++k) {
            double top = values[out[k]];
            for (std::size_t i = out[k]; i <= out[k + 1]; ++i) top = std::max(top, values[i]);
            const double rise = top - std::max(values[out[k]], values[out[k + 1]]);
            if (rise < min_barrier) {
                out.erase(out.begin() + long(values[out[k]] <= values[out[k + 1]] ? k + 1 : k));
                merged = true;
                break;
            }
        }
    }
    return out;
}

std::vector<std::size_t> distinct_wells(const std::vector<double>& values,
                                        double barrier_fraction) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return local_minima(values, barrier_fraction * (*hi - *lo));
}

QuadraticFit fit_well(const std::vector<double>& u, const SpatialGrid1D& grid, std::size_t i0,
                      int window, double mass) {
    const long n = long(u.size());
    const long lo = std::max(0L, long(i0) - window);
    const long hi = std::min(n - 1, long(i0) + window);
    if (hi - lo < 4) throw std::invalid_argument("fit_well: window too small");
    const double xc = grid.x(i0);
    const double scale = grid.spacing() * double(window);

    // quartic least squares keeps the extracted curvature continuous as the
    // sampled minimum crosses grid points
    Eigen::MatrixXd A(hi - lo + 1, 5);
    Eigen::VectorXd b(hi - lo + 1);
    for (long i = lo; i <= hi; ++i) {
        const double t = (grid.x(std::size_t(i)) - xc) / scale;
        A(i - lo, 0) = 1.0;
        A(i - lo, 1) = t;
        A(i - lo, 2) = t * t;
        A(i - lo, 3) = t * t * t;
        A(i - lo, 4) = t * t * t * t;
        b(i - lo) = u[std::size_t(i)];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    auto dp = [&](double t) {
        return c(1) + 2.0 * c(2) * t + 3.0 * c(3) * t * t + 4.0 * c(4) * t * t * t;
    };
    auto d2p = [&](double t) { return 2.0 * c(2) + 6.0 * c(3) * t + 12.0 * c(4) * t * t; };
    double t = 0.0;
    for (int it = 0; it < 40; ++it) {
        const double k = d2p(t);
        if (!(k > 0.0)) break;
        const double step = dp(t) / k;
        t -= step;
        t = std::clamp(t, -0.75, 0.75);
        if (std::fabs(step) < 1e-15) break;
    }
    QuadraticFit fit;
    fit.curvature = d2p(t) / (scale * scale);
    if (!(fit.curvature > 0.0)) throw std::runtime_error("fit_well: non-positive curvature");
    fit.x_min = xc + t * scale;
    fit.value = c(0) + c(1) * t + c(2) * t * t + c(3) * t * t * t + c(4) * t * t * t * t;
    fit.frequency = std::sqrt(fit.curvature / mass);
    return fit;
}

std::vector<double> PotentialSet::omega_perp_profile_scaled(double scale) const {
    std::vector<double> out = omega_perp;
    for (double& w : out) w *= scale;
    return out;
}

namespace {

std::vector<double> combined(const PotentialSet& p, const std::vector<double>& ui) {
    std::vector<double> u(p.u_c.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = p.u_c[i] + ui[i] + p.u_comp[i];
    return u;
}

}  // namespace

void PotentialSet::validate(double depth_tolerance) const {
    const std::size_t n = grid.n_points;
    if (u_c.size() != n || u_0.size() != n || u_1.size() != n || u_comp.size() != n ||
        omega_perp.size() != n)
        throw std::invalid_argument("potential set: array sizes do not match the grid");
    for (double w : omega_perp)
        if (!(w > 0.0)) throw std::invalid_argument("potential set: transverse curvature non-positive");

    const auto mins_c = distinct_wells(u_c);
    if (mins_c.size() != 2) throw std::runtime_error("potential set: u_c is not a double well");
    const double depth_scale = barrier_height > 0 ? barrier_height
                                                  : std::fabs(u_c[mins_c[0]]) + 1e-300;
    if (std::fabs(u_c[mins_c[0]] - u_c[mins_c[1]]) > depth_tolerance * depth_scale)
        throw std::runtime_error("potential set: u_c wells are not equally deep");

    const auto mins_1 = distinct_wells(combined(*this, u_1));
    if (mins_1.size() != 1)
        throw std::runtime_error("potential set: u_c + u_1 must leave a single well");

    const auto mins_0 = distinct_wells(combined(*this, u_0));
    if (mins_0.size() != 2)
        throw std::runtime_error("potential set: u_c + u_0 must stay a double well");
    const double sep0 = grid.x(mins_0[1]) - grid.x(mins_0[0]);
    const double sep_c = grid.x(mins_c[1]) - grid.x(mins_c[0]);
    if (!(sep0 > sep_c))
        throw std::runtime_error("potential set: u_0 must push the wells apart");
}

// ---------------------------------------------------------------------------
// Analytic model
// ---------------------------------------------------------------------------

PotentialSet model_potential_set(const ModelPotentialParams& params, const PhysicalConstants& pc) {
    if (!(params.omega_x > 0 && params.d_x > 0 && params.omega_state0 > 0 &&
          params.omega_state1 > 0 && params.omega_perp0 > 0))
        throw std::invalid_argument("model potential: parameters must be positive");

    const double m = pc.m_atom;
    const double x0 = 0.5 * params.d_x;
    const double s1 = params.sigma1_factor * x0;
    const double s0 = params.sigma0_factor * x0;
    const std::size_t n = params.grid.n_points;
    const auto xs = params.grid.points();

    PotentialSet pot;
    pot.grid = params.grid;
    pot.provenance = "model";
    pot.u_comp.assign(n, 0.0);
    pot.omega_perp.assign(n, params.omega_perp0);

    auto build_uc = [&](double a) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double q = xs[i] * xs[i] - x0 * x0;
            u[i] = std::min(a * q * q, params.potential_cap);
        }
        return u;
    };
    auto gaussian = [&](double h, double s) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = h * std::exp(-xs[i] * xs[i] / (2.0 * s * s));
        return u;
    };
    auto fitted_freq = [&](const std::vector<double>& u, bool expect_single) {
        const auto mins = distinct_wells(u);
        if (expect_single && mins.size() != 1)
            throw std::runtime_error("model potential: expected a single well during calibration");
        if (!expect_single && mins.size() != 2)
            throw std::runtime_error("model potential: expected a double well during calibration");
        return fit_well(u, params.grid, mins.back(), params.fit_window, m).frequency;
    };

    // quartic stiffness: analytic seed, then absorb the fit-window bias
    double a = m * params.omega_x * params.omega_x / (8.0 * x0 * x0);
    for (int it = 0; it < 40; ++it) {
        const double w = fitted_freq(build_uc(a), false);
        const double corr = params.omega_x / w;
        a *= corr * corr;
        if (std::fabs(corr - 1.0) < 0.1 * params.calibration_tolerance) break;
    }
    pot.u_c = build_uc(a);

    // barrier-removal term: match the single-well frequency at the origin
    double h1 = s1 * s1 * (m * params.omega_state1 * params.omega_state1 + 4.0 * a * x0 * x0);
    for (int it = 0; it < 60; ++it) {
        std::vector<double> u(n);
        const auto u1 = gaussian(-h1, s1);
        for (std::size_t i = 0; i < n; ++i) u[i] = pot.u_c[i] + u1[i];
        const double w = fitted_freq(u, true);
        const double target_k = m * params.omega_state1 * params.omega_state1;
        const double got_k = m * w * w;
        h1 += s1 * s1 * (target_k - got_k);
        if (std::fabs(w / params.omega_state1 - 1.0) < 0.1 * params.calibration_tolerance) break;
    }
    pot.u_1 = gaussian(-h1, s1);

    // well-separating term: bracket and bisect on the fitted well frequency
    const double target0 = params.omega_state0;
    auto freq0 = [&](double h0) {
        std::vector<double> u(n);
        const auto u0 = gaussian(h0, s0);
        for (std::size_t i = 0; i < n; ++i) u[i] = pot.u_c[i] + u0[i];
        return fitted_freq(u, false);
    };
    double lo = 0.0, hi = 0.25 * h1;
    while (freq0(hi) < target0) {
        hi *= 2.0;
        if (hi > 1e6 * h1) throw std::runtime_error("model potential: u_0 calibration diverged");
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (freq0(mid) < target0 ? lo : hi) = mid;
    }
    const double h0 = 0.5 * (lo + hi);
    pot.u_0 = gaussian(h0, s0);

    // characterization through the same fits the chip path uses
    const auto mins_c = distinct_wells(pot.u_c);
    const auto fit_l = fit_well(pot.u_c, pot.grid, mins_c[0], params.fit_window, m);
    const auto fit_r = fit_well(pot.u_c, pot.grid, mins_c[1], params.fit_window, m);
    pot.well_separation = fit_r.x_min - fit_l.x_min;
    pot.omega_x = 0.5 * (fit_l.frequency + fit_r.frequency);
    pot.barrier_height = pot.u_c[n / 2] - 0.5 * (fit_l.value + fit_r.value);

    const auto u_c1 = combined(pot, pot.u_1);
    pot.omega_state1 =
        fit_well(u_c1, pot.grid, distinct_wells(u_c1).front(), params.fit_window, m).frequency;
    const auto u_c0 = combined(pot, pot.u_0);
    pot.omega_state0 =
        fit_well(u_c0, pot.grid, distinct_wells(u_c0).back(), params.fit_window, m).frequency;

    const double tol = params.calibration_tolerance;
    if (std::fabs(pot.omega_x / params.omega_x - 1.0) > tol ||
        std::fabs(pot.omega_state1 / params.omega_state1 - 1.0) > tol ||
        std::fabs(pot.omega_state0 / params.omega_state0 - 1.0) > tol)
        throw std::runtime_error("model potential: calibration missed the target frequencies");

    pot.validate();
    return pot;
}

// ---------------------------------------------------------------------------
// Chip assembly
// ---------------------------------------------------------------------------

std::pair<Waveform, Waveform> compensation_ramps(const Waveform& lambda0,
                                                 const CompensationRamps& ramps) {
    Waveform bx(lambda0.grid, 0.0, WaveformUnit::dimensionless);
    Waveform ic(lambda0.grid, 0.0, WaveformUnit::dimensionless);
    for (std::size_t k = 0; k < lambda0.size(); ++k) {
        const double l = lambda0[k];
        if (l < -1e-12 || l > 1.0 + 1e-12)
            throw std::invalid_argument("compensation_ramps: lambda_0 outside [0, 1]");
        const auto [b, i] = ramps.eval(l);
        bx[k] = b;
        ic[k] = i;
    }
    return {bx, ic};
}

Vec3 ChipConfig::static_field(const Vec3& point, double lambda0,
                              const PhysicalConstants& pc) const {
    const auto [bx, ic] = apply_compensation ? ramps.eval(lambda0) : ramps.eval(0.0);
    BiasField b{bx, bias.By, bias.Bz};
    Vec3 field = b.vec();
    for (std::size_t i = 0; i < wires.size(); ++i) {
        WireSegment w = wires[i];
        if (int(i) == center_wire) w.current = ic;
        field += field_of_rectangular_wire(w, point, nullptr, pc);
    }
    return field;
}

namespace {

double uc_at(const ChipConfig& chip, const Vec3& r, double lambda0, const PhysicalConstants& pc) {
    return 0.5 * pc.mu_B * chip.static_field(r, lambda0, pc).norm();
}

Eigen::Matrix3d hessian(const ChipConfig& chip, const Vec3& r, double h,
                        const PhysicalConstants& pc) {
    Eigen::Matrix3d H;
    const double u0 = uc_at(chip, r, 0.0, pc);
    for (int i = 0; i < 3; ++i) {
        Vec3 ei = Vec3::Zero();
        ei[i] = h;
        H(i, i) = (uc_at(chip, r + ei, 0.0, pc) - 2.0 * u0 + uc_at(chip, r - ei, 0.0, pc)) / (h * h);
        for (int j = i + 1; j < 3; ++j) {
            Vec3 ej = Vec3::Zero();
            ej[j] = h;
            const double v = (uc_at(chip, r + ei + ej, 0.0, pc) - uc_at(chip, r + ei - ej, 0.0, pc) -
                              uc_at(chip, r - ei + ej, 0.0, pc) + uc_at(chip, r - ei - ej, 0.0, pc)) /
                             (4.0 * h * h);
            H(i, j) = H(j, i) = v;
        }
    }
    return H;
}

}  // namespace

PotentialSet assemble_potential_set(const ChipConfig& chip, const CPWResult& cpw_result,
                                    const AssembleOptions& opts, const PhysicalConstants& pc) {
    // locate the static trap minimum of |B|
    auto objective = [&](const std::vector<double>& p) {
        return chip.static_field(Vec3(p[0], p[1], p[2]), 0.0, pc).norm();
    };
    const auto pmin = detail::nelder_mead(
        objective, {chip.search_start.x(), chip.search_start.y(), chip.search_start.z()}, 0.2e-6,
        1e-16, 4000);
    Vec3 r_min(pmin[0], pmin[1], pmin[2]);

    // the NM result is one of the wells; recenter on the double-well midpoint
    // and polish transversally so the sampling axis runs through the saddle
    Vec3 axis, t1, t2;
    for (int round = 0; round < 3; ++round) {
        const Eigen::Matrix3d H = hessian(chip, r_min, opts.hessian_step, pc);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("assemble: Hessian decomposition failed");
        axis = es.eigenvectors().col(0);
        if (axis.x() < 0) axis = -axis;
        t1 = es.eigenvectors().col(1);
        t2 = es.eigenvectors().col(2);

        // axial recentering between the wells
        std::vector<double> probe(opts.grid.n_points);
        for (std::size_t i = 0; i < probe.size(); ++i)
            probe[i] = uc_at(chip, r_min + opts.grid.x(i) * axis, 0.0, pc);
        const auto wells = distinct_wells(probe);
        if (wells.size() == 2) {
            const auto fl = fit_well(probe, opts.grid, wells[0], opts.fit_window, pc.m_atom);
            const auto fr = fit_well(probe, opts.grid, wells[1], opts.fit_window, pc.m_atom);
            r_min += 0.5 * (fl.x_min + fr.x_min) * axis;
        }
        // transverse Newton at the recentered point
        for (int it = 0; it < 6; ++it) {
            const double h = 5e-9;
            auto u_of = [&](const Vec3& p) { return uc_at(chip, p, 0.0, pc); };
            const double g1 = (u_of(r_min + h * t1) - u_of(r_min - h * t1)) / (2.0 * h);
            const double g2 = (u_of(r_min + h * t2) - u_of(r_min - h * t2)) / (2.0 * h);
            const double k1 = (u_of(r_min + h * t1) - 2.0 * u_of(r_min) + u_of(r_min - h * t1)) /
                              (h * h);
            const double k2 = (u_of(r_min + h * t2) - 2.0 * u_of(r_min) + u_of(r_min - h * t2)) /
                              (h * h);
            if (!(k1 > 0.0 && k2 > 0.0)) break;
            const Vec3 step = (g1 / k1) * t1 + (g2 / k2) * t2;
            r_min -= step;
            if (step.norm() < 1e-13) break;
        }
    }

    const std::size_t n = opts.grid.n_points;
    PotentialSet pot;
    pot.grid = opts.grid;
    pot.provenance = "chip";
    pot.tilt_angle = std::acos(std::clamp(std::fabs(axis.x()), 0.0, 1.0));
    pot.u_c.resize(n);
    pot.u_0.resize(n);
    pot.u_1.resize(n);
    pot.u_comp.resize(n);
    pot.omega_perp.resize(n);

    RegimeMonitor monitor;
    const double hstep = opts.hessian_step;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 r = r_min + opts.grid.x(i) * axis;
        const Vec3 B0 = chip.static_field(r, 0.0, pc);
        pot.u_c[i] = 0.5 * pc.mu_B * B0.norm();
        pot.u_comp[i] = uc_at(chip, r, 1.0, pc) - pot.u_c[i];

        // transverse curvatures about the axis
        auto u_of = [&](const Vec3& p) { return uc_at(chip, p, 0.0, pc); };
        const double u0 = pot.u_c[i];
        const double k1 =
            (u_of(r + hstep * t1) - 2.0 * u0 + u_of(r - hstep * t1)) / (hstep * hstep);
        const double k2 =
            (u_of(r + hstep * t2) - 2.0 * u0 + u_of(r - hstep * t2)) / (hstep * hstep);
        if (!(k1 > 0.0 && k2 > 0.0))
            throw std::runtime_error("assemble: transverse curvature non-positive");
        pot.omega_perp[i] = std::pow(k1 * k2 / (pc.m_atom * pc.m_atom), 0.25);

        // microwave terms at full drive
        const MwFieldSample mw = mw_field_at(cpw_result, chip.V0_full, chip.I0_full,
                                             r.x() - chip.cpw_origin.x(), r.z() - chip.cpw_origin.z());
        const CVec3 Bmw(cxd(mw.Bx, 0.0), cxd(0.0, 0.0), cxd(mw.Bz, 0.0));
        const auto pol = local_polarization_decompose(Bmw, B0.normalized());
        const double B0n = B0.norm();
        const double v_el =
            electric_mw_potential(std::sqrt(mw.Ex * mw.Ex + mw.Ez * mw.Ez), pc);
        pot.u_0[i] = v_el + mw_potential_F1(-1, pol, chip.delta0, B0n, &monitor, pc);
        pot.u_1[i] = v_el + mw_potential_F2(+1, pol, chip.delta0, B0n, &monitor, pc);
    }
    pot.max_mw_ratio_sq = monitor.max_ratio_sq;
    if (!chip.apply_compensation) pot.u_comp.assign(n, 0.0);

    // characterization
    const auto mins_c = distinct_wells(pot.u_c);
    if (mins_c.size() != 2) throw std::runtime_error("assemble: no double well along the trap axis");
    const auto fit_l = fit_well(pot.u_c, pot.grid, mins_c[0], opts.fit_window, pc.m_atom);
    const auto fit_r = fit_well(pot.u_c, pot.grid, mins_c[1], opts.fit_window, pc.m_atom);
    pot.well_separation = fit_r.x_min - fit_l.x_min;
    pot.omega_x = 0.5 * (fit_l.frequency + fit_r.frequency);
    std::size_t i_top = mins_c[0];
    for (std::size_t i = mins_c[0]; i <= mins_c[1]; ++i)
        if (pot.u_c[i] > pot.u_c[i_top]) i_top = i;
    pot.barrier_height = pot.u_c[i_top] - 0.5 * (fit_l.value + fit_r.value);

    const auto u_c1 = combined(pot, pot.u_1);
    const auto m1 = distinct_wells(u_c1);
    if (m1.size() != 1) throw std::runtime_error("assemble: u_c + u_1 did not merge to one well");
    pot.omega_state1 = fit_well(u_c1, pot.grid, m1.front(), opts.fit_window, pc.m_atom).frequency;

    const auto u_c0 = combined(pot, pot.u_0);
    const auto m0 = distinct_wells(u_c0);
    if (m0.size() != 2) throw std::runtime_error("assemble: u_c + u_0 lost the double well");
    pot.omega_state0 = fit_well(u_c0, pot.grid, m0.back(), opts.fit_window, pc.m_atom).frequency;

    pot.validate(opts.depth_tolerance);
    return pot;
}

}  // namespace chipgate
