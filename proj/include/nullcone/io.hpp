#pragma once
// Artifact emission: CSV tables, JSON states and the run manifest.
//
// Doubles are written in shortest round-trip form, so a file read back gives
// the exact binary values. Spectral series are stored per node as lists of
// [2l, 2m, re, im].

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullcone/constraints.hpp"
#include "nullcone/diagnostics.hpp"
#include "nullcone/fields.hpp"

namespace nc::io {

using Json = nlohmann::ordered_json;

// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputEnv = "NULLCONE_OUT";

Json series_json(const SpectralSeries& s, const std::vector<double>& grid);
SpectralSeries series_from_json(const Json& j);
Json datum_json(const NullDatum& d);
Json slice_json(const SliceState& s);
Json cone_json(const ConeSolution& sol);
Json table_json(const ConvergenceTable& t);

struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
std::string csv_text(const CsvTable& t);
CsvTable convergence_csv(const ConvergenceTable& t);

std::string format_double(double v);
void write_text(const std::filesystem::path& file, const std::string& text);
void write_json(const std::filesystem::path& file, const Json& j);
std::string read_text(const std::filesystem::path& file);

// Precedence: explicit command-line value, then the environment variable,
// then the configured value, then "nullcone_out".
std::filesystem::path resolve_output_dir(const std::string& cli_value,
                                         const std::string& config_value);

}  // namespace nc::io
