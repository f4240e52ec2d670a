#ifndef CHIPGATE_PIPELINE_HPP
#define CHIPGATE_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chipgate/control.hpp"
#include "chipgate/error_budget.hpp"
#include "chipgate/fidelity.hpp"
#include "chipgate/potentials.hpp"
#include "chipgate/propagator.hpp"

namespace chipgate {

namespace fs = std::filesystem;

struct RunConfig {
    // potential source
    std::string potential_source = "model";  // "model" | "chip"
    ModelPotentialParams model;
    fs::path geometry_file;
    SolverWindow cpw_window;
    AssembleOptions assemble;

    // gate
    int n_oscillations = 3;
    double oscillation_period = 370e-6;  // s; <= 0 requests a scan
    double dt = 50e-9;                   // s
    bool two_stage = true;
    bool period_scan = true;

    // dynamics
    InteractionSpec interaction;
    Stage1Options stage1;
    Stage2Options stage2;
    TuneOptions tune;

    // fidelity
    ProcessFidelityOptions fidelity_opts;
    std::vector<double> temperatures_kT;  // units of hbar omega_x
    int thermal_n_max = 1;
    double probability_floor = 1e-4;

    // noise robustness (optional)
    bool noise_enabled = false;
    double noise_amplitude = 1e-3;
    int noise_seeds = 8;

    // error-budget inputs
    double gamma_s = 0.9;            // 1/s
    double delta_B = 0.01e-7;        // T (0.01 mG)
    double ratio_sq_budget = 1e-2;   // max Omega^2/Delta^2 for model runs

    std::uint64_t seed = 1;
    unsigned jobs = 2;

    void validate() const;
};

RunConfig parse_config(const fs::path& path);
std::string canonical_config_dump(const RunConfig& cfg);

struct GateReport {
    int n_oscillations = 0;
    double tau_g = 0.0;
    double oscillation_period = 0.0;
    std::array<double, 2> stage1_overlaps{};
    std::array<cplx, 4> O_end{};
    std::array<double, 4> F_end{};
    std::array<double, 4> phi_end{};
    double phi_g = 0.0;
    double fidelity = 0.0;         // min over chi, local-Z absorbed
    double fidelity_strict = 0.0;  // min over chi, actual-phase target
    InternalState minimizer;
    double omega_factor = 1.0;
    double omega_perp0 = 0.0;
    double max_parametric_excitation = 0.0;
    double kinetic_ratio = 0.0;  // 2 E_kin / hbar omega_perp at collisions
    std::vector<std::array<double, 3>> fidelity_vs_T;  // T, kT/hw, 1-F
    std::optional<double> noise_fidelity_drop;
    ErrorBudget budget;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

void write_report(const fs::path& path, const GateReport& report);
GateReport load_report(const fs::path& path);

/// Stage entry points; each reads its inputs from and writes its outputs to
/// the run directory, so stages can be rerun independently.
void stage_fields(const RunConfig& cfg, const fs::path& out);
void stage_potential(const RunConfig& cfg, const fs::path& out);
void stage_optimize(const RunConfig& cfg, const fs::path& out);
void stage_simulate(const RunConfig& cfg, const fs::path& out);
void stage_fidelity(const RunConfig& cfg, const fs::path& out);
void stage_errors(const RunConfig& cfg, const fs::path& out);
void stage_report(const RunConfig& cfg, const fs::path& out);

/// Full pipeline; returns the final report.
GateReport run_pipeline(const RunConfig& cfg, const fs::path& out);

/// Side-by-side table over several runs, with the published N = 3 reference
/// row for comparison.
void emit_table1(const std::vector<GateReport>& reports, const fs::path& path);

}  // namespace chipgate

#endif
