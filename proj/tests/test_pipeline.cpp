#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chipgate/io.hpp"
#include "chipgate/pipeline.hpp"

using namespace chipgate;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("chipgate_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_smoke_config(const fs::path& path, std::uint64_t seed) {
    std::ofstream out(path);
    out << R"({
  "potential": {"source": "model",
    "model": {"grid": {"x_min_um": -2.0, "x_max_um": 2.0, "n": 128}}},
  "gate": {"n_oscillations": 2, "period_us": 330.4, "period_scan": false,
           "dt_ns": 100.0, "two_stage": false},
  "control": {"stage1_iterations": 3, "tune_tolerance": 0.05},
  "fidelity": {"temperatures_kT": [], "n_max": 0},
  "errors": {"gamma_s": 0.9, "delta_B_mG": 0.01, "ratio_sq": 0.01},
  "seed": )" << seed
        << ",\n  \"jobs\": 2\n}\n";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation names the missing path") {
    const fs::path dir = temp_dir("cfg");
    {
        std::ofstream out(dir / "bad.json");
        out << R"({"gate": {"n_oscillations": 2}})";
    }
    try {
        parse_config(dir / "bad.json");
        FAIL("expected a schema error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("potential.source") != std::string::npos);
    }
    {
        std::ofstream out(dir / "bad2.json");
        out << R"({"potential": {"source": "model",
                   "model": {"grid": {"x_min_um": -2.0, "n": 128}}}})";
    }
    try {
        parse_config(dir / "bad2.json");
        FAIL("expected a schema error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("x_max_um") != std::string::npos);
    }
    {
        std::ofstream out(dir / "bad3.json");
        out << R"({"potential": {"source": "chip"}})";
    }
    CHECK_THROWS(parse_config(dir / "bad3.json"));
}

TEST_CASE("waveform and potential artifacts round-trip") {
    const fs::path dir = temp_dir("roundtrip");
    const PotentialSet pot = model_potential_set(ModelPotentialParams{});
    io::write_potential_csv(dir / "p.csv", pot);
    io::write_potential_meta(dir / "p.json", pot);
    const PotentialSet back = io::load_potential(dir / "p.csv", dir / "p.json");
    CHECK(back.grid.n_points == pot.grid.n_points);
    CHECK(back.omega_x == pot.omega_x);
    for (std::size_t i = 0; i < pot.u_c.size(); i += 17) {
        CHECK(back.u_c[i] == pot.u_c[i]);
        CHECK(back.u_1[i] == pot.u_1[i]);
        CHECK(back.omega_perp[i] == pot.omega_perp[i]);
    }

    const TimeGrid tg = make_time_grid(0.0, 1e-3, 500);
    Waveform l0(tg, 0.0), l(tg, 0.0), os(tg, 1.1);
    for (std::size_t k = 0; k < tg.n_samples(); ++k) {
        l0[k] = 0.5 + 0.5 * std::sin(double(k));
        l[k] = l0[k] * 0.9;
    }
    io::write_waveforms_csv(dir / "wf.csv", l0, l, os);
    const auto wf = io::load_waveforms_csv(dir / "wf.csv");
    CHECK(wf.lambda.grid == tg);
    for (std::size_t k = 0; k < tg.n_samples(); k += 13) {
        CHECK(wf.lambda0[k] == l0[k]);
        CHECK(wf.lambda[k] == l[k]);
        CHECK(wf.omega_scale[k] == os[k]);
    }

    TwoParticleState st;
    st.grid = make_grid(-1e-6, 1e-6, 16);
    st.amp.resize(256);
    for (std::size_t i = 0; i < st.amp.size(); ++i) st.amp[i] = cplx(double(i), -0.5 * double(i));
    io::write_state_snapshot(dir / "st.bin", st, 1.5e-3);
    double t = 0;
    const auto st2 = io::read_state_snapshot(dir / "st.bin", &t);
    CHECK(t == 1.5e-3);
    CHECK(st2.grid.n_points == 16);
    CHECK(st2.amp == st.amp);
    fs::remove_all(dir);
}

TEST_CASE("geometry file round-trip") {
    const fs::path dir = temp_dir("geom");
    const ChipConfig chip = io::load_geometry(CHIPGATE_SOURCE_DIR "/configs/paper_chip.json");
    CHECK(chip.wires.size() == 4);
    CHECK(chip.center_wire == 1);
    CHECK(chip.bias.By == doctest::Approx(103.717e-4));
    io::write_geometry(dir / "copy.json", chip);
    const ChipConfig back = io::load_geometry(dir / "copy.json");
    CHECK(back.wires.size() == chip.wires.size());
    CHECK(back.cpw.gap == chip.cpw.gap);
    CHECK(back.ramps.Ic_slope == chip.ramps.Ic_slope);
    CHECK(back.drive_is_same(chip));
    fs::remove_all(dir);
}

TEST_CASE("pipeline is deterministic: identical config and seed, identical report") {
    const fs::path dir1 = temp_dir("run1");
    const fs::path dir2 = temp_dir("run2");
    write_smoke_config(dir1 / "cfg.json", 11);
    const RunConfig cfg = parse_config(dir1 / "cfg.json");

    const GateReport r1 = run_pipeline(cfg, dir1);
    const GateReport r2 = run_pipeline(cfg, dir2);
    CHECK(slurp(dir1 / "gate_report.json") == slurp(dir2 / "gate_report.json"));
    CHECK(r1.phi_g == r2.phi_g);
    CHECK(r1.fidelity == r2.fidelity);

    // smoke-level physics sanity of the quick model gate
    CHECK(r1.phi_g == doctest::Approx(pi).epsilon(0.25));
    CHECK(r1.fidelity > 0.5);
    CHECK(r1.stage1_overlaps[0] > 0.9);
    CHECK(r1.config_hash == r2.config_hash);

    // table emission across the two runs
    emit_table1({r1, r2}, dir1 / "table1.csv");
    const std::string table = slurp(dir1 / "table1.csv");
    CHECK(table.find("reference,3,1.110") != std::string::npos);
    CHECK(table.find("run,2,") != std::string::npos);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}
