#include "nullcone/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nc::io {

Json series_json(const SpectralSeries& s, const std::vector<double>& grid) {
    if (static_cast<int>(grid.size()) != s.n) throw std::invalid_argument("series_json: grid size");
    Json j;
    j["two_s"] = s.two_s;
    j["two_lmax"] = s.two_lmax;
    j["grid"] = grid;
    Json nodes = Json::array();
    for (int p = 0; p < s.n; ++p) {
        Json modes = Json::array();
        for (int m = 0; m < s.modes(); ++m) {
            const auto [tl, tm] = mode_lm(s.two_s, m);
            const cplx a = s.at(m, p);
            modes.push_back(Json::array({tl, tm, a.real(), a.imag()}));
        }
        nodes.push_back(std::move(modes));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

SpectralSeries series_from_json(const Json& j) {
    const int n = static_cast<int>(j.at("grid").size());
    SpectralSeries s(j.at("two_s").get<int>(), j.at("two_lmax").get<int>(), n);
    const Json& nodes = j.at("nodes");
    if (static_cast<int>(nodes.size()) != n) throw std::invalid_argument("series_from_json: node count");
    for (int p = 0; p < n; ++p)
        for (const Json& e : nodes[p]) {
            const int m = mode_index(s.two_s, e.at(0).get<int>(), e.at(1).get<int>());
            s.at(m, p) = cplx(e.at(2).get<double>(), e.at(3).get<double>());
        }
    return s;
}

Json datum_json(const NullDatum& d) {
    std::vector<double> v(d.nodes());
    for (int j = 0; j < d.nodes(); ++j) v[j] = d.v(j);
    Json j;
    j["v_max"] = d.v_max;
    j["n_v"] = d.n_v;
    j["mass"] = d.mass;
    j["charge"] = d.charge;
    j["phi"] = d.phi.c;
    j["psi1"] = series_json(d.psi1, v);
    j["psi4"] = series_json(d.psi4, v);
    return j;
}

Json slice_json(const SliceState& s) {
    Json j;
    j["t"] = s.t;
    j["tilt"] = s.tilt;
    for (int c = 0; c < 4; ++c) j["psi" + std::to_string(c + 1)] = series_json(s.psi[c], s.x);
    return j;
}

Json cone_json(const ConeSolution& sol) {
    std::vector<double> v(sol.n_v + 1);
    for (int j = 0; j <= sol.n_v; ++j) v[j] = sol.v(j);
    Json j;
    j["v_max"] = sol.v_max;
    j["n_v"] = sol.n_v;
    for (int c = 0; c < 4; ++c) j["psi" + std::to_string(c + 1)] = series_json(sol.psi[c], v);
    return j;
}

Json table_json(const ConvergenceTable& t) {
    Json j;
    j["tag"] = t.tag;
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json row;
        row["resolution"] = r.resolution;
        row["error"] = r.error;
        row["order"] = std::isfinite(r.order) ? Json(r.order) : Json(nullptr);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_text(const CsvTable& t) {
    std::string out;
    for (size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw std::invalid_argument("csv: row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
        out += "\n";
    }
    return out;
}

CsvTable convergence_csv(const ConvergenceTable& t) {
    CsvTable c{t.tag, {"resolution", "error", "order"}, {}};
    for (const auto& r : t.rows) c.rows.push_back({r.resolution, r.error, r.order});
    return c;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + file.string());
}

void write_json(const std::filesystem::path& file, const Json& j) { write_text(file, j.dump(1) + "\n"); }

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path resolve_output_dir(const std::string& cli_value, const std::string& config_value) {
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    if (!config_value.empty()) return config_value;
    return "nullcone_out";
}

}  // namespace nc::io
