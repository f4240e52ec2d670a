#include "chipgate/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "chipgate/eigenstates.hpp"
#include "chipgate/io.hpp"

namespace chipgate {

using json = nlohmann::ordered_json;

void RunConfig::validate() const {
    if (potential_source != "model" && potential_source != "chip")
        throw std::invalid_argument("config: potential.source must be 'model' or 'chip'");
    if (potential_source == "chip" && geometry_file.empty())
        throw std::invalid_argument("config: potential.geometry_file is required for chip runs");
    if (n_oscillations < 1) throw std::invalid_argument("config: gate.n_oscillations must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("config: gate.dt_ns must be positive");
    if (thermal_n_max < 0) throw std::invalid_argument("config: fidelity.n_max must be >= 0");
    for (double t : temperatures_kT)
        if (t < 0.0) throw std::invalid_argument("config: fidelity.temperatures_kT must be >= 0");
    if (noise_seeds < 1) throw std::invalid_argument("config: noise.seeds must be >= 1");
}

namespace {

double require_number(const json& j, const std::string& path) {
    const json* cur = &j;
    std::string walked;
    std::stringstream ss(path);
    std::string key;
    while (std::getline(ss, key, '.')) {
        walked += (walked.empty() ? "" : ".") + key;
        if (!cur->contains(key))
            throw std::invalid_argument("config: missing mandatory field '" + walked + "'");
        cur = &(*cur)[key];
    }
    return cur->get<double>();
}

}  // namespace

RunConfig parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    json j = json::parse(in);

    RunConfig cfg;
    if (!j.contains("potential") || !j["potential"].contains("source"))
        throw std::invalid_argument("config: missing mandatory field 'potential.source'");
    cfg.potential_source = j["potential"]["source"];

    if (cfg.potential_source == "model") {
        const json m = j["potential"].value("model", json::object());
        auto& p = cfg.model;
        p.omega_x = 2.0 * pi * 1e3 * m.value("omega_x_khz", 4.432);
        p.d_x = 1e-6 * m.value("d_x_um", 1.32);
        p.omega_state1 = 2.0 * pi * 1e3 * m.value("omega_state1_khz", 5.448);
        p.omega_state0 = 2.0 * pi * 1e3 * m.value("omega_state0_khz", 4.775);
        p.omega_perp0 = 2.0 * pi * 1e3 * m.value("omega_perp_khz", 77.46);
        if (m.contains("grid")) {
            const auto& g = m["grid"];
            cfg.model.grid = make_grid(1e-6 * require_number(g, "x_min_um"),
                                       1e-6 * require_number(g, "x_max_um"),
                                       std::size_t(require_number(g, "n")));
        }
    } else {
        cfg.geometry_file = j["potential"].value("geometry_file", std::string());
        if (j["potential"].contains("cpw_cell_nm"))
            cfg.cpw_window.cell = 1e-9 * double(j["potential"]["cpw_cell_nm"]);
        if (j["potential"].contains("cpw_margin_um"))
            cfg.cpw_window.margin = 1e-6 * double(j["potential"]["cpw_margin_um"]);
        if (j["potential"].contains("grid")) {
            const auto& g = j["potential"]["grid"];
            cfg.assemble.grid = make_grid(1e-6 * require_number(g, "x_min_um"),
                                          1e-6 * require_number(g, "x_max_um"),
                                          std::size_t(require_number(g, "n")));
        }
    }

    const json gate = j.value("gate", json::object());
    cfg.n_oscillations = gate.value("n_oscillations", 3);
    cfg.oscillation_period = 1e-6 * gate.value("period_us", 370.0);
    cfg.period_scan = gate.value("period_scan", true);
    cfg.dt = 1e-9 * gate.value("dt_ns", 50.0);
    cfg.two_stage = gate.value("two_stage", true);

    const json inter = j.value("interaction", json::object());
    const double a_s = 1e-9 * inter.value("a_s_nm", 5.4);
    cfg.interaction.a_s_00 = 1e-9 * inter.value("a_s_00_nm", a_s * 1e9);
    cfg.interaction.a_s_01 = 1e-9 * inter.value("a_s_01_nm", a_s * 1e9);
    cfg.interaction.a_s_11 = 1e-9 * inter.value("a_s_11_nm", a_s * 1e9);
    cfg.interaction.symmetrized_coordinate = inter.value("symmetrized_coordinate", false);

    const json ctrl = j.value("control", json::object());
    cfg.stage1.max_iterations = ctrl.value("stage1_iterations", cfg.stage1.max_iterations);
    cfg.stage1.convergence_tol = ctrl.value("stage1_tolerance", cfg.stage1.convergence_tol);
    cfg.stage2.max_iterations = ctrl.value("stage2_iterations", cfg.stage2.max_iterations);
    cfg.stage2.amplitude_bound = ctrl.value("amplitude_bound", cfg.stage2.amplitude_bound);
    cfg.stage2.cutoff_factor = ctrl.value("cutoff_factor", cfg.stage2.cutoff_factor);
    cfg.tune.tolerance = ctrl.value("tune_tolerance", cfg.tune.tolerance);
    cfg.tune.target_phase = ctrl.value("tune_target_phase", cfg.tune.target_phase);

    const json fid = j.value("fidelity", json::object());
    cfg.temperatures_kT = fid.value("temperatures_kT", std::vector<double>{});
    cfg.thermal_n_max = fid.value("n_max", 1);
    cfg.probability_floor = fid.value("probability_floor", 1e-4);

    const json noise = j.value("noise", json::object());
    cfg.noise_enabled = noise.value("enabled", false);
    cfg.noise_amplitude = noise.value("n_a", 1e-3);
    cfg.noise_seeds = noise.value("seeds", 8);

    const json err = j.value("errors", json::object());
    cfg.gamma_s = err.value("gamma_s", 0.9);
    cfg.delta_B = 1e-7 * err.value("delta_B_mG", 0.01);
    cfg.ratio_sq_budget = err.value("ratio_sq", 1e-2);

    cfg.seed = j.value("seed", 1);
    cfg.jobs = j.value("jobs", 2);
    cfg.validate();
    return cfg;
}

std::string canonical_config_dump(const RunConfig& c) {
    json j;
    j["potential_source"] = c.potential_source;
    j["model"] = {c.model.omega_x, c.model.d_x,        c.model.omega_state1,
                  c.model.omega_state0, c.model.omega_perp0, double(c.model.grid.n_points),
                  c.model.grid.x_min,   c.model.grid.x_max};
    j["geometry_file"] = c.geometry_file.string();
    j["gate"] = {c.n_oscillations, c.oscillation_period, c.dt, c.two_stage, c.period_scan};
    j["interaction"] = {c.interaction.a_s_00, c.interaction.a_s_01, c.interaction.a_s_11};
    j["stage1"] = {c.stage1.max_iterations, c.stage1.convergence_tol};
    j["stage2"] = {c.stage2.max_iterations, c.stage2.amplitude_bound, c.stage2.cutoff_factor};
    j["fidelity"] = {c.temperatures_kT, c.thermal_n_max, c.probability_floor};
    j["noise"] = {c.noise_enabled, c.noise_amplitude, c.noise_seeds};
    j["errors"] = {c.gamma_s, c.delta_B, c.ratio_sq_budget};
    j["seed"] = c.seed;
    return j.dump();
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

void write_report(const fs::path& path, const GateReport& r) {
    json j;
    j["n_oscillations"] = r.n_oscillations;
    j["tau_g"] = r.tau_g;
    j["oscillation_period"] = r.oscillation_period;
    j["stage1_overlaps"] = {r.stage1_overlaps[0], r.stage1_overlaps[1]};
    json sectors = json::object();
    static const char* names[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s) {
        sectors[names[s]] = {{"O_re", r.O_end[std::size_t(s)].real()},
                             {"O_im", r.O_end[std::size_t(s)].imag()},
                             {"F", r.F_end[std::size_t(s)]},
                             {"phi", r.phi_end[std::size_t(s)]}};
    }
    j["sectors"] = sectors;
    j["phi_g"] = r.phi_g;
    j["fidelity"] = r.fidelity;
    j["fidelity_strict"] = r.fidelity_strict;
    j["minimizer"] = json::array();
    for (const auto& a : r.minimizer.amp) j["minimizer"].push_back({a.real(), a.imag()});
    j["omega_factor"] = r.omega_factor;
    j["omega_perp0"] = r.omega_perp0;
    j["max_parametric_excitation"] = r.max_parametric_excitation;
    j["kinetic_ratio"] = r.kinetic_ratio;
    j["fidelity_vs_T"] = json::array();
    for (const auto& row : r.fidelity_vs_T) j["fidelity_vs_T"].push_back({row[0], row[1], row[2]});
    if (r.noise_fidelity_drop) j["noise_fidelity_drop"] = *r.noise_fidelity_drop;
    j["error_budget"] = json::array();
    for (const auto& e : r.budget.entries)
        j["error_budget"].push_back(
            {{"name", e.name}, {"value", e.value}, {"formula", e.formula}, {"inputs", e.inputs}});
    j["error_budget_aggregate"] = r.budget.aggregate();
    j["config_hash"] = r.config_hash;
    j["seed"] = r.seed;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

GateReport load_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("report: cannot open " + path.string());
    json j = json::parse(in);
    GateReport r;
    r.n_oscillations = j["n_oscillations"];
    r.tau_g = j["tau_g"];
    r.oscillation_period = j["oscillation_period"];
    r.stage1_overlaps = {j["stage1_overlaps"][0], j["stage1_overlaps"][1]};
    static const char* names[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s) {
        const auto& js = j["sectors"][names[s]];
        r.O_end[std::size_t(s)] = cplx(js["O_re"], js["O_im"]);
        r.F_end[std::size_t(s)] = js["F"];
        r.phi_end[std::size_t(s)] = js["phi"];
    }
    r.phi_g = j["phi_g"];
    r.fidelity = j["fidelity"];
    r.fidelity_strict = j["fidelity_strict"];
    for (int s = 0; s < 4; ++s)
        r.minimizer.amp[std::size_t(s)] = cplx(j["minimizer"][s][0], j["minimizer"][s][1]);
    r.omega_factor = j["omega_factor"];
    r.omega_perp0 = j["omega_perp0"];
    r.max_parametric_excitation = j["max_parametric_excitation"];
    r.kinetic_ratio = j["kinetic_ratio"];
    for (const auto& row : j["fidelity_vs_T"])
        r.fidelity_vs_T.push_back({row[0], row[1], row[2]});
    if (j.contains("noise_fidelity_drop")) r.noise_fidelity_drop = j["noise_fidelity_drop"];
    for (const auto& e : j["error_budget"])
        r.budget.add(e["name"], e["value"], e["formula"], e["inputs"]);
    r.config_hash = j["config_hash"];
    r.seed = j["seed"];
    return r;
}

// ---------------------------------------------------------------------------
// stage helpers
// ---------------------------------------------------------------------------

namespace {

PotentialSet load_pot(const fs::path& out) {
    return io::load_potential(out / "potentials.csv", out / "potentials.json");
}

TwoParticleState initial_state(const PotentialSet& pot, const PhysicalConstants& pc) {
    const Wavefunction1D left = ground_state_in_well(pot.u_c, pot.grid, Well::left, {}, pc);
    const Wavefunction1D right = ground_state_in_well(pot.u_c, pot.grid, Well::right, {}, pc);
    TwoParticleState psi0 = product_state(left, right);
    psi0.normalize();
    return psi0;
}

TimeGrid gate_grid(double period, int n_osc, double dt) {
    const double tau = period * n_osc;
    const std::size_t steps = std::size_t(std::llround(tau / dt));
    return make_time_grid(0.0, tau, steps);
}

json load_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("pipeline: missing artifact " + p.string());
    return json::parse(in);
}

void dump_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

}  // namespace

void stage_fields(const RunConfig& cfg, const fs::path& out) {
    if (cfg.potential_source != "chip") return;  // nothing to do for model runs
    const ChipConfig chip = io::load_geometry(cfg.geometry_file);
    const CPWResult res = analyze_cpw(chip.cpw, cfg.cpw_window);
    json j;
    j["Zc_abs"] = std::abs(res.Zc);
    j["Zc_arg"] = std::arg(res.Zc);
    j["R"] = res.R;
    j["L"] = res.L;
    j["C"] = res.C;
    j["beta_mw"] = res.beta_mw;
    j["alpha_mw"] = res.alpha_mw;
    j["skin_depth"] = skin_depth(chip.cpw.omega, chip.cpw.sigma);
    dump_json(out / "cpw.json", j);
    io::write_fieldmap_csv(out / "fieldmap.csv", res.maps);
}

void stage_potential(const RunConfig& cfg, const fs::path& out) {
    PotentialSet pot;
    if (cfg.potential_source == "model") {
        pot = model_potential_set(cfg.model);
    } else {
        const ChipConfig chip = io::load_geometry(cfg.geometry_file);
        const CPWResult res = analyze_cpw(chip.cpw, cfg.cpw_window);
        pot = assemble_potential_set(chip, res, cfg.assemble);
    }
    io::write_potential_csv(out / "potentials.csv", pot);
    io::write_potential_meta(out / "potentials.json", pot);
}

void stage_optimize(const RunConfig& cfg, const fs::path& out) {
    const PotentialSet pot = load_pot(out);
    const PhysicalConstants pc = PhysicalConstants::rb87();

    // trial period: near twice the merged-well period, optionally scanned
    double period = cfg.oscillation_period;
    json scan_log = json::array();
    if (cfg.period_scan) {
        const double base = 2.0 * pi / pot.omega_state1;
        double best_j = -1.0;
        for (int k = 0; k <= 8; ++k) {
            const double cand = base * (1.6 + 0.1 * k);
            const TimeGrid tg = gate_grid(cand, cfg.n_oscillations, cfg.dt);
            const Waveform trial = linear_ramp_trial(tg.duration() / cfg.n_oscillations,
                                                     std::size_t(cfg.n_oscillations), tg);
            const double jv = stage1_objective(pot, tg, trial, pc);
            scan_log.push_back({{"period", cand}, {"objective", jv}});
            if (jv > best_j) {
                best_j = jv;
                period = cand;
            }
        }
    }

    const TimeGrid tgrid = gate_grid(period, cfg.n_oscillations, cfg.dt);
    const Waveform trial = linear_ramp_trial(tgrid.duration() / cfg.n_oscillations,
                                             std::size_t(cfg.n_oscillations), tgrid);

    const Stage1Result s1 = stage1_optimize(pot, tgrid, trial, cfg.stage1, pc);

    const TwoParticleState psi0 = initial_state(pot, pc);
    const TuneResult tune = tune_omega_perp(pot, tgrid, s1.lambda, cfg.interaction, psi0,
                                            cfg.tune, pc);

    Waveform omega_scale(tgrid, tune.omega_factor, WaveformUnit::dimensionless);
    json j;
    j["period"] = period;
    j["period_scan"] = scan_log;
    j["tau_g"] = tgrid.duration();
    j["stage1_objective_history"] = s1.objective_history;
    j["stage1_overlaps"] = {s1.overlaps[0], s1.overlaps[1]};
    j["stage1_penalty"] = s1.penalty;
    j["omega_factor"] = tune.omega_factor;
    j["tune_phi11"] = tune.phi11;
    j["tune_evaluations"] = tune.evaluations;

    if (cfg.two_stage) {
        // stage-2 phase target keeps phi_g at pi given the other sectors
        GateSimOptions gopts;
        gopts.jobs = cfg.jobs;
        gopts.sector.sample_every = std::max<std::size_t>(1, tgrid.n_steps / 128);
        GateControls controls{s1.lambda, std::nullopt, omega_scale};
        const GateTrajectory pre = simulate_gate(pot, tgrid, controls, cfg.interaction, psi0,
                                                 gopts, pc);
        const double phi_target = pi - pre.phi_end[0] + pre.phi_end[1] + pre.phi_end[2];
        const Stage2Result s2 =
            stage2_optimize(pot, tgrid, s1.lambda, tune.omega_factor, cfg.interaction, psi0,
                            phi_target, cfg.stage2, pc);
        omega_scale = s2.omega_scale;
        for (auto& v : omega_scale.values) v *= tune.omega_factor;
        j["stage2_objective_history"] = s2.objective_history;
        j["stage2_F11_unfiltered"] = s2.F11_unfiltered;
        j["stage2_F11"] = s2.F11;
        j["stage2_phi11"] = s2.phi11;
        j["stage2_phi11_target"] = s2.phi11_target;
        j["stage2_filter_warning"] = s2.filter_warning;
    }
    dump_json(out / "optimize.json", j);
    io::write_waveforms_csv(out / "waveforms.csv", trial, s1.lambda, omega_scale);
}

void stage_simulate(const RunConfig& cfg, const fs::path& out) {
    const PotentialSet pot = load_pot(out);
    const PhysicalConstants pc = PhysicalConstants::rb87();
    const auto wf = io::load_waveforms_csv(out / "waveforms.csv");
    const TimeGrid tgrid = wf.lambda.grid;
    const TwoParticleState psi0 = initial_state(pot, pc);

    GateSimOptions gopts;
    gopts.jobs = cfg.jobs;
    gopts.sector.sample_every = std::max<std::size_t>(1, tgrid.n_steps / 512);
    gopts.sector.record_kinetic = true;
    GateControls controls{wf.lambda, std::nullopt, wf.omega_scale};
    const GateTrajectory traj = simulate_gate(pot, tgrid, controls, cfg.interaction, psi0, gopts, pc);

    io::write_trajectory_csv(out / "trajectory.csv", traj);
    io::write_state_snapshot(out / "psi0.bin", psi0, 0.0);
    static const char* names[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s)
        io::write_state_snapshot(out / (std::string("psi_end_") + names[s] + ".bin"),
                                 traj.sectors[std::size_t(s)].final_state, tgrid.t_end);

    // collision diagnostics of the 11 branch
    double e_kin = 0.0;
    double ratio = 0.0;
    try {
        e_kin = kinetic_energy_estimate(traj.sectors[3], 0.0, tgrid.t_end);
        const double w0 = wf.omega_scale.values.front() * pot.omega_perp[pot.grid.n_points / 2];
        ratio = quasi1d_check(e_kin, w0, pc).ratio;
    } catch (const std::exception&) {
        ratio = -1.0;  // no collision detected (interaction off or failed run)
    }

    json j;
    static const char* snames[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s) {
        j["sectors"][snames[s]] = {{"F", traj.F_end[std::size_t(s)]},
                                   {"phi", traj.phi_end[std::size_t(s)]},
                                   {"O_re", traj.O_end[std::size_t(s)].real()},
                                   {"O_im", traj.O_end[std::size_t(s)].imag()}};
    }
    j["phi_g"] = traj.phi_g_end;
    j["kinetic_energy"] = e_kin;
    j["kinetic_ratio"] = ratio;
    dump_json(out / "simulate.json", j);
}

namespace {

SectorEndpoints propagate_config(const PotentialSet& pot, const TimeGrid& tgrid,
                                 const GateControls& controls, const InteractionSpec& inter,
                                 const TwoParticleState& psi0, double weight, unsigned jobs,
                                 const PhysicalConstants& pc) {
    GatePropagator prop(pot, tgrid, pc);
    SectorRunOptions sopts;
    sopts.sample_every = tgrid.n_steps;  // endpoints only
    SectorEndpoints ep;
    ep.psi0 = psi0;
    ep.weight = weight;
    const TwoParticleState psi0_sym = symmetrized_pair(psi0);
    auto run = [&](int idx) {
        const auto [i, j] = GateTrajectory::sector_labels[std::size_t(idx)];
        return prop.run_sector(i, j, (i == j) ? psi0_sym : psi0, controls, inter, sopts)
            .final_state;
    };
    if (jobs >= 2) {
        for (int s = 0; s < 4; s += 2) {
            auto f0 = std::async(std::launch::async, run, s);
            auto f1 = std::async(std::launch::async, run, s + 1);
            ep.psi[std::size_t(s)] = f0.get();
            ep.psi[std::size_t(s + 1)] = f1.get();
        }
    } else {
        for (int s = 0; s < 4; ++s) ep.psi[std::size_t(s)] = run(s);
    }
    return ep;
}

}  // namespace

void stage_fidelity(const RunConfig& cfg, const fs::path& out) {
    const PotentialSet pot = load_pot(out);
    const PhysicalConstants pc = PhysicalConstants::rb87();
    const auto wf = io::load_waveforms_csv(out / "waveforms.csv");
    const TimeGrid tgrid = wf.lambda.grid;

    SectorEndpoints ground;
    ground.psi0 = io::read_state_snapshot(out / "psi0.bin");
    static const char* names[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s)
        ground.psi[std::size_t(s)] =
            io::read_state_snapshot(out / (std::string("psi_end_") + names[s] + ".bin"));
    ground.weight = 1.0;

    ProcessFidelityOptions fopts = cfg.fidelity_opts;
    fopts.convention = PhaseConvention::local_z_absorbed;
    const auto fid = process_fidelity({&ground, 1}, fopts);
    fopts.convention = PhaseConvention::strict_actual;
    const auto fid_strict = process_fidelity({&ground, 1}, fopts);

    json j;
    j["fidelity"] = fid.fidelity;
    j["fidelity_strict"] = fid_strict.fidelity;
    j["minimizer"] = json::array();
    for (const auto& a : fid.minimizer.amp) j["minimizer"].push_back({a.real(), a.imag()});

    // finite temperature: propagate the occupied (n1, n2) configurations once
    if (!cfg.temperatures_kT.empty()) {
        const double kT_max = *std::max_element(cfg.temperatures_kT.begin(),
                                                cfg.temperatures_kT.end());
        std::vector<SectorEndpoints> configs;
        std::vector<std::pair<int, int>> labels;
        GateControls controls{wf.lambda, std::nullopt, wf.omega_scale};
        if (kT_max > 0.0 && cfg.thermal_n_max > 0) {
            const auto left = well_eigenstates(pot.u_c, pot.grid, Well::left, cfg.thermal_n_max,
                                               {}, pc);
            const auto right = well_eigenstates(pot.u_c, pot.grid, Well::right, cfg.thermal_n_max,
                                                {}, pc);
            for (int n1 = 0; n1 <= cfg.thermal_n_max; ++n1)
                for (int n2 = 0; n2 <= cfg.thermal_n_max; ++n2) {
                    TwoParticleState psi0 =
                        product_state(left[std::size_t(n1)], right[std::size_t(n2)]);
                    psi0.normalize();
                    configs.push_back(propagate_config(pot, tgrid, controls, cfg.interaction,
                                                       psi0, 0.0, cfg.jobs, pc));
                    labels.emplace_back(n1, n2);
                }
        } else {
            configs.push_back(ground);
            labels.emplace_back(0, 0);
        }

        json ft = json::array();
        std::vector<std::array<double, 3>> rows;
        for (double kT : cfg.temperatures_kT) {
            const double T = kT * pc.hbar * pot.omega_x / pc.k_B;
            const ThermalEnsemble ens = thermal_occupations(T, pot.omega_x, cfg.thermal_n_max, pc);
            std::vector<SectorEndpoints> weighted;
            double dropped = 0.0;
            for (std::size_t c = 0; c < configs.size(); ++c) {
                const double w = ens.occupation(labels[c].first, labels[c].second);
                if (w < cfg.probability_floor) {
                    dropped += w;
                    continue;
                }
                SectorEndpoints ep = configs[c];
                ep.weight = w;
                weighted.push_back(std::move(ep));
            }
            if (weighted.empty()) {
                SectorEndpoints ep = configs[0];
                ep.weight = 1.0;
                weighted.push_back(std::move(ep));
            }
            fopts.convention = PhaseConvention::local_z_absorbed;
            const auto ftfid = process_fidelity({weighted.data(), weighted.size()}, fopts);
            rows.push_back({T, kT, 1.0 - ftfid.fidelity});
            ft.push_back({{"T", T},
                          {"kT_over_hbar_omega", kT},
                          {"F", ftfid.fidelity},
                          {"dropped_weight", dropped + ens.truncated_weight}});
        }
        io::write_ft_csv(out / "ft.csv", rows);
        j["fidelity_vs_T"] = ft;
    }

    // white-noise robustness on both controls
    if (cfg.noise_enabled) {
        GateControls clean{wf.lambda, std::nullopt, wf.omega_scale};
        double drop_sum = 0.0;
        for (int s = 0; s < cfg.noise_seeds; ++s) {
            GateControls noisy;
            noisy.lambda = inject_control_noise(wf.lambda, cfg.noise_amplitude,
                                                cfg.seed + 2 * std::uint64_t(s), true);
            noisy.omega_scale = inject_control_noise(wf.omega_scale, cfg.noise_amplitude,
                                                     cfg.seed + 2 * std::uint64_t(s) + 1, false);
            const auto ep = propagate_config(pot, tgrid, noisy, cfg.interaction, ground.psi0, 1.0,
                                             cfg.jobs, pc);
            fopts.convention = PhaseConvention::local_z_absorbed;
            const auto f_noisy = process_fidelity({&ep, 1}, fopts);
            drop_sum += fid.fidelity - f_noisy.fidelity;
        }
        j["noise_fidelity_drop"] = drop_sum / cfg.noise_seeds;
        j["noise_amplitude"] = cfg.noise_amplitude;
        j["noise_seeds"] = cfg.noise_seeds;
    }

    dump_json(out / "fidelity.json", j);
}

void stage_errors(const RunConfig& cfg, const fs::path& out) {
    const PotentialSet pot = load_pot(out);
    const PhysicalConstants pc = PhysicalConstants::rb87();
    const json sim = load_json(out / "simulate.json");
    const json opt = load_json(out / "optimize.json");
    const double tau_g = opt["tau_g"];

    ErrorBudget budget;
    const double ratio_sq = (pot.provenance == "chip" && pot.max_mw_ratio_sq > 0.0)
                                ? pot.max_mw_ratio_sq
                                : cfg.ratio_sq_budget;

    const auto loss = surface_loss_error(cfg.gamma_s, tau_g);
    budget.add("surface_loss", loss.error, "1 - exp(-Gamma_s tau_g)",
               "Gamma_s=" + std::to_string(cfg.gamma_s) + " 1/s, tau_g=" + std::to_string(tau_g));

    const double dmu = mw_moment_shift(std::sqrt(ratio_sq), 1.0, pc);
    const double tau_c = dephasing_time(dmu, cfg.delta_B, pc);
    budget.add("dephasing", tau_g / tau_c, "tau_g / tau_c, tau_c = hbar/(dmu dB)",
               "dmu/mu_B=" + std::to_string(dmu / pc.mu_B) + ", dB=" + std::to_string(cfg.delta_B));

    // two-photon and admixture diagnostics at the trap field
    const double B0 = 3.23e-4;
    const double delta0 = 2.0 * pi * 29.4e6;
    const double omega_r = std::sqrt(ratio_sq) * delta0;
    const double two_ph = two_photon_suppression(omega_r, omega_r, delta0, B0, pc);
    budget.add("two_photon", two_ph, "(Omega_2ph/Delta_2ph)^2",
               "Omega_R/Delta=" + std::to_string(std::sqrt(ratio_sq)));
    const double da = scattering_length_shift(omega_r, delta0, cfg.interaction.a_s_11,
                                              0.98 * cfg.interaction.a_s_11);
    budget.add("scattering_length_shift", da / cfg.interaction.a_s_11,
               "(Omega^2/2Delta^2)(a11-a01)/a11", "relative shift");

    const double kratio = sim["kinetic_ratio"];
    json j;
    j["budget"] = json::array();
    for (const auto& e : budget.entries)
        j["budget"].push_back(
            {{"name", e.name}, {"value", e.value}, {"formula", e.formula}, {"inputs", e.inputs}});
    j["aggregate"] = budget.aggregate();
    j["quasi1d_ratio"] = kratio;
    j["quasi1d_pass"] = kratio >= 0.0 && kratio < 1.0;
    j["magic_field"] = magic_field(0.5e-4, 6e-4, pc);
    j["trap_lifetime"] = loss.trap_lifetime;
    dump_json(out / "errors.json", j);
}

void stage_report(const RunConfig& cfg, const fs::path& out) {
    const PotentialSet pot = load_pot(out);
    const json opt = load_json(out / "optimize.json");
    const json sim = load_json(out / "simulate.json");
    const json fid = load_json(out / "fidelity.json");
    const json err = load_json(out / "errors.json");
    const auto wf = io::load_waveforms_csv(out / "waveforms.csv");

    GateReport r;
    r.n_oscillations = cfg.n_oscillations;
    r.tau_g = opt["tau_g"];
    r.oscillation_period = opt["period"];
    r.stage1_overlaps = {opt["stage1_overlaps"][0], opt["stage1_overlaps"][1]};
    static const char* names[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s) {
        const auto& js = sim["sectors"][names[s]];
        r.O_end[std::size_t(s)] = cplx(js["O_re"], js["O_im"]);
        r.F_end[std::size_t(s)] = js["F"];
        r.phi_end[std::size_t(s)] = js["phi"];
    }
    r.phi_g = sim["phi_g"];
    r.fidelity = fid["fidelity"];
    r.fidelity_strict = fid["fidelity_strict"];
    for (int s = 0; s < 4; ++s)
        r.minimizer.amp[std::size_t(s)] = cplx(fid["minimizer"][s][0], fid["minimizer"][s][1]);
    r.omega_factor = opt["omega_factor"];
    r.omega_perp0 = wf.omega_scale.values.front() * pot.omega_perp[pot.grid.n_points / 2];

    // transverse excitation of the final omega_perp(t)
    Waveform scale = wf.omega_scale;
    const double f0 = scale.values.front();
    for (auto& v : scale.values) v /= f0;
    const Waveform p_exc = parametric_excitation_probability(scale, r.omega_perp0);
    r.max_parametric_excitation = p_exc.max_abs();

    r.kinetic_ratio = sim["kinetic_ratio"];
    if (fid.contains("fidelity_vs_T"))
        for (const auto& row : fid["fidelity_vs_T"])
            r.fidelity_vs_T.push_back(
                {row["T"], row["kT_over_hbar_omega"], 1.0 - double(row["F"])});
    if (fid.contains("noise_fidelity_drop")) r.noise_fidelity_drop = fid["noise_fidelity_drop"];
    for (const auto& e : err["budget"])
        r.budget.add(e["name"], e["value"], e["formula"], e["inputs"]);
    r.config_hash = io::fnv1a_hash(canonical_config_dump(cfg));
    r.seed = cfg.seed;
    write_report(out / "gate_report.json", r);

    json manifest;
    manifest["config_hash"] = r.config_hash;
    manifest["seed"] = r.seed;
    manifest["config"] = json::parse(canonical_config_dump(cfg));
    manifest["artifacts"] = {"potentials.csv", "potentials.json", "waveforms.csv",
                             "trajectory.csv", "gate_report.json"};
    dump_json(out / "manifest.json", manifest);
}

GateReport run_pipeline(const RunConfig& cfg, const fs::path& out) {
    cfg.validate();
    fs::create_directories(out);
    struct Stage {
        const char* name;
        void (*fn)(const RunConfig&, const fs::path&);
        std::vector<const char*> outputs;
    };
    const std::vector<Stage> stages = {
        {"fields", stage_fields, {"cpw.json", "fieldmap.csv"}},
        {"potential", stage_potential, {"potentials.csv", "potentials.json"}},
        {"optimize", stage_optimize, {"optimize.json", "waveforms.csv"}},
        {"simulate", stage_simulate, {"simulate.json", "trajectory.csv"}},
        {"fidelity", stage_fidelity, {"fidelity.json", "ft.csv"}},
        {"errors", stage_errors, {"errors.json"}},
        {"report", stage_report, {"gate_report.json", "manifest.json"}},
    };
    for (const auto& st : stages) {
        try {
            st.fn(cfg, out);
        } catch (const std::exception& e) {
            for (const char* f : st.outputs) {
                const fs::path p = out / f;
                if (fs::exists(p)) fs::rename(p, fs::path(p.string() + ".partial"));
            }
            throw std::runtime_error(std::string(st.name) + ": " + e.what());
        }
    }
    return load_report(out / "gate_report.json");
}

void emit_table1(const std::vector<GateReport>& reports, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("table1: cannot open " + path.string());
    out << "source,N,tau_g_ms,O_0,O_1,F_00,F_01,F_11,phi_g_over_pi,F\n";
    out << "reference,3,1.110,0.998,0.997,0.996,0.996,0.995,0.997,0.997\n";
    for (const auto& r : reports) {
        out << "run," << r.n_oscillations << "," << r.tau_g * 1e3 << "," << r.stage1_overlaps[0]
            << "," << r.stage1_overlaps[1] << "," << r.F_end[0] << "," << r.F_end[1] << ","
            << r.F_end[3] << "," << r.phi_g / pi << "," << r.fidelity << "\n";
    }
}

}  // namespace chipgate
