#include "chipgate/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace chipgate::io {

using json = nlohmann::ordered_json;

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_write(const fs::path& path) {
    File f(std::fopen(path.string().c_str(), "wb"));
    if (!f) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    return f;
}

std::vector<std::vector<double>> read_csv(const fs::path& path, std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path.string());
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            first = false;
            if (header) {
                while (std::getline(ss, cell, ',')) header->push_back(cell);
                continue;
            }
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void write_potential_csv(const fs::path& path, const PotentialSet& pot) {
    auto f = open_write(path);
    std::fprintf(f.get(), "x,u_c,u_0,u_1,u_comp,omega_perp\n");
    for (std::size_t i = 0; i < pot.grid.n_points; ++i)
        std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pot.grid.x(i), pot.u_c[i],
                     pot.u_0[i], pot.u_1[i], pot.u_comp[i], pot.omega_perp[i]);
}

void write_potential_meta(const fs::path& path, const PotentialSet& pot) {
    json j;
    j["provenance"] = pot.provenance;
    j["grid"] = {{"x_min", pot.grid.x_min}, {"x_max", pot.grid.x_max}, {"n", pot.grid.n_points}};
    j["well_separation"] = pot.well_separation;
    j["omega_x"] = pot.omega_x;
    j["omega_state0"] = pot.omega_state0;
    j["omega_state1"] = pot.omega_state1;
    j["barrier_height"] = pot.barrier_height;
    j["tilt_angle"] = pot.tilt_angle;
    j["max_mw_ratio_sq"] = pot.max_mw_ratio_sq;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

PotentialSet load_potential(const fs::path& csv, const fs::path& meta) {
    std::vector<std::string> header;
    const auto rows = read_csv(csv, &header);
    if (rows.empty()) throw std::runtime_error("io: empty potential file");
    std::ifstream in(meta);
    if (!in) throw std::runtime_error("io: cannot open " + meta.string());
    json j = json::parse(in);

    PotentialSet pot;
    pot.grid = SpatialGrid1D{j["grid"]["x_min"], j["grid"]["x_max"], j["grid"]["n"]};
    if (rows.size() != pot.grid.n_points)
        throw std::runtime_error("io: potential row count does not match the grid");
    const std::size_t n = rows.size();
    pot.u_c.resize(n);
    pot.u_0.resize(n);
    pot.u_1.resize(n);
    pot.u_comp.resize(n);
    pot.omega_perp.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pot.u_c[i] = rows[i][1];
        pot.u_0[i] = rows[i][2];
        pot.u_1[i] = rows[i][3];
        pot.u_comp[i] = rows[i][4];
        pot.omega_perp[i] = rows[i][5];
    }
    pot.provenance = j["provenance"];
    pot.well_separation = j["well_separation"];
    pot.omega_x = j["omega_x"];
    pot.omega_state0 = j["omega_state0"];
    pot.omega_state1 = j["omega_state1"];
    pot.barrier_height = j["barrier_height"];
    pot.tilt_angle = j["tilt_angle"];
    pot.max_mw_ratio_sq = j["max_mw_ratio_sq"];
    return pot;
}

void write_waveforms_csv(const fs::path& path, const Waveform& lambda0, const Waveform& lambda,
                         const Waveform& omega_scale) {
    auto f = open_write(path);
    std::fprintf(f.get(), "# t_start=%.17g t_end=%.17g n_steps=%zu\n", lambda.grid.t_start,
                 lambda.grid.t_end, lambda.grid.n_steps);
    std::fprintf(f.get(), "t,lambda0,lambda,delta_lambda,omega_perp_scale\n");
    for (std::size_t k = 0; k < lambda.size(); ++k)
        std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g\n", lambda.grid.t(k), lambda0[k],
                     lambda[k], lambda[k] - lambda0[k], omega_scale[k]);
}

LoadedWaveforms load_waveforms_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path.string());
    std::string comment;
    std::getline(in, comment);
    double t_start = 0, t_end = 0;
    std::size_t n_steps = 0;
    if (std::sscanf(comment.c_str(), "# t_start=%lg t_end=%lg n_steps=%zu", &t_start, &t_end,
                    &n_steps) != 3)
        throw std::runtime_error("io: malformed waveform header");
    const TimeGrid grid{t_start, t_end, n_steps};
    LoadedWaveforms out{Waveform(grid, 0.0), Waveform(grid, 0.0),
                        Waveform(grid, 1.0, WaveformUnit::dimensionless)};
    std::string line;
    std::getline(in, line);  // column header
    std::size_t k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (k >= grid.n_samples()) throw std::runtime_error("io: too many waveform samples");
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        out.lambda0[k] = row[1];
        out.lambda[k] = row[2];
        out.omega_scale[k] = row[4];
        ++k;
    }
    if (k != grid.n_samples()) throw std::runtime_error("io: waveform sample count mismatch");
    return out;
}

void write_trajectory_csv(const fs::path& path, const GateTrajectory& traj) {
    auto f = open_write(path);
    std::fprintf(f.get(), "t,F_00,F_01,F_10,F_11,phi_g,norm_00,norm_01,norm_10,norm_11\n");
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     traj.times[k], traj.sectors[0].fidelity[k], traj.sectors[1].fidelity[k],
                     traj.sectors[2].fidelity[k], traj.sectors[3].fidelity[k], traj.phi_g[k],
                     traj.sectors[0].norm[k], traj.sectors[1].norm[k], traj.sectors[2].norm[k],
                     traj.sectors[3].norm[k]);
}

void write_ft_csv(const fs::path& path, const std::vector<std::array<double, 3>>& rows) {
    auto f = open_write(path);
    std::fprintf(f.get(), "T,kT_over_hbar_omega,one_minus_F\n");
    for (const auto& r : rows) std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", r[0], r[1], r[2]);
}

void write_fieldmap_csv(const fs::path& path, const FieldMap2D& maps, std::size_t stride) {
    auto f = open_write(path);
    std::fprintf(f.get(), "x,z,Bx,By,Bz,Ex,Ez\n");
    for (std::size_t j = 0; j < maps.nz; j += stride)
        for (std::size_t i = 0; i < maps.nx; i += stride) {
            const std::size_t k = maps.idx(i, j);
            const double bx = maps.Bx.empty() ? 0.0 : maps.Bx[k];
            const double bz = maps.Bz.empty() ? 0.0 : maps.Bz[k];
            const double ex = maps.Ex.empty() ? 0.0 : maps.Ex[k];
            const double ez = maps.Ez.empty() ? 0.0 : maps.Ez[k];
            std::fprintf(f.get(), "%.17g,%.17g,%.17g,0,%.17g,%.17g,%.17g\n", maps.x(i), maps.z(j),
                         bx, bz, ex, ez);
        }
}

void write_state_snapshot(const fs::path& path, const TwoParticleState& state, double t) {
    auto f = open_write(path);
    const char magic[4] = {'C', 'G', 'W', '2'};
    std::fwrite(magic, 1, 4, f.get());
    const std::uint64_t n = state.n();
    std::fwrite(&n, sizeof n, 1, f.get());
    std::fwrite(&state.grid.x_min, sizeof(double), 1, f.get());
    std::fwrite(&state.grid.x_max, sizeof(double), 1, f.get());
    std::fwrite(&t, sizeof(double), 1, f.get());
    std::fwrite(state.amp.data(), sizeof(cplx), state.amp.size(), f.get());
}

TwoParticleState read_state_snapshot(const fs::path& path, double* t_out) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw std::runtime_error("io: cannot open " + path.string());
    File guard(f);
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "CGW2", 4) != 0)
        throw std::runtime_error("io: bad snapshot magic");
    std::uint64_t n = 0;
    double x_min = 0, x_max = 0, t = 0;
    if (std::fread(&n, sizeof n, 1, f) != 1 || std::fread(&x_min, sizeof x_min, 1, f) != 1 ||
        std::fread(&x_max, sizeof x_max, 1, f) != 1 || std::fread(&t, sizeof t, 1, f) != 1)
        throw std::runtime_error("io: truncated snapshot header");
    TwoParticleState st;
    st.grid = SpatialGrid1D{x_min, x_max, std::size_t(n)};
    st.amp.resize(std::size_t(n) * std::size_t(n));
    if (std::fread(st.amp.data(), sizeof(cplx), st.amp.size(), f) != st.amp.size())
        throw std::runtime_error("io: truncated snapshot payload");
    if (t_out) *t_out = t;
    return st;
}

ChipConfig load_geometry(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("io: cannot open " + path.string());
    json j = json::parse(in);
    ChipConfig chip;
    for (const auto& w : j.at("wires")) {
        WireSegment seg;
        seg.start = Vec3(w.at("start")[0], w.at("start")[1], w.at("start")[2]);
        seg.end = Vec3(w.at("end")[0], w.at("end")[1], w.at("end")[2]);
        seg.width = w.at("width");
        seg.thickness = w.at("thickness");
        seg.current = w.at("current");
        chip.wires.push_back(seg);
    }
    chip.bias.Bx = j.at("bias").at("Bx");
    chip.bias.By = j.at("bias").at("By");
    chip.bias.Bz = j.at("bias").at("Bz");
    const auto& c = j.at("cpw");
    chip.cpw.center_width = c.at("w");
    chip.cpw.gap = c.at("s");
    chip.cpw.thickness = c.at("t");
    chip.cpw.ground_width = c.at("ground_width");
    chip.cpw.sigma = c.at("sigma");
    chip.cpw.eps_r = c.at("eps_r");
    chip.cpw.omega = 2.0 * pi * double(c.at("freq"));
    if (j.contains("center_wire")) chip.center_wire = j["center_wire"];
    if (j.contains("drive")) {
        chip.delta0 = 2.0 * pi * double(j["drive"].value("delta0_hz", 29.4e6));
        chip.V0_full = j["drive"].value("V0", chip.V0_full);
        chip.I0_full = j["drive"].value("I0", chip.I0_full);
    }
    if (j.contains("cpw_origin"))
        chip.cpw_origin = Vec3(j["cpw_origin"][0], j["cpw_origin"][1], j["cpw_origin"][2]);
    if (j.contains("search_start"))
        chip.search_start = Vec3(j["search_start"][0], j["search_start"][1], j["search_start"][2]);
    if (j.contains("compensation")) {
        const auto& r = j["compensation"];
        chip.ramps.Bx_base = r.value("Bx_base", chip.ramps.Bx_base);
        chip.ramps.Bx_slope = r.value("Bx_slope", chip.ramps.Bx_slope);
        chip.ramps.Ic_base = r.value("Ic_base", chip.ramps.Ic_base);
        chip.ramps.Ic_slope = r.value("Ic_slope", chip.ramps.Ic_slope);
        chip.apply_compensation = r.value("enabled", true);
    }
    return chip;
}

void write_geometry(const fs::path& path, const ChipConfig& chip) {
    json j;
    j["wires"] = json::array();
    for (const auto& w : chip.wires) {
        j["wires"].push_back({{"start", {w.start.x(), w.start.y(), w.start.z()}},
                              {"end", {w.end.x(), w.end.y(), w.end.z()}},
                              {"width", w.width},
                              {"thickness", w.thickness},
                              {"current", w.current}});
    }
    j["bias"] = {{"Bx", chip.bias.Bx}, {"By", chip.bias.By}, {"Bz", chip.bias.Bz}};
    j["cpw"] = {{"w", chip.cpw.center_width}, {"s", chip.cpw.gap},       {"t", chip.cpw.thickness},
                {"ground_width", chip.cpw.ground_width},
                {"sigma", chip.cpw.sigma},    {"eps_r", chip.cpw.eps_r},
                {"freq", chip.cpw.omega / (2.0 * pi)}};
    j["center_wire"] = chip.center_wire;
    j["drive"] = {{"delta0_hz", chip.delta0 / (2.0 * pi)}, {"V0", chip.V0_full}, {"I0", chip.I0_full}};
    j["cpw_origin"] = {chip.cpw_origin.x(), chip.cpw_origin.y(), chip.cpw_origin.z()};
    j["search_start"] = {chip.search_start.x(), chip.search_start.y(), chip.search_start.z()};
    j["compensation"] = {{"Bx_base", chip.ramps.Bx_base},
                         {"Bx_slope", chip.ramps.Bx_slope},
                         {"Ic_base", chip.ramps.Ic_base},
                         {"Ic_slope", chip.ramps.Ic_slope},
                         {"enabled", chip.apply_compensation}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace chipgate::io
