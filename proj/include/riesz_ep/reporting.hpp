#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "riesz_ep/harness.hpp"
#include "riesz_ep/mollify.hpp"
#include "riesz_ep/solver.hpp"

namespace riesz_ep {

using Json = nlohmann::json;

std::string version_string();

/// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// {suite, seed, cases: [{name, lhs, rhs, ratio, slack, pass}], summary}. The summary carries the
/// scalar summary, series, notes, empirical constant and the pass flag. No timestamps.
Json report_json(const InequalityReport& report);
/// Several suites in one document: cases prefixed "suite/", summary keyed by suite.
Json combined_report_json(const std::string& suite, const std::vector<InequalityReport>& reports);

/// Writes json.dump(2) plus a newline; the bytes depend only on the value.
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

struct RunManifest {
    std::string command;
    std::string config;  ///< fully resolved config text
    std::uint64_t seed = 0;
    std::map<std::string, std::string> hashes;  ///< artifact file name (relative to the run dir) -> sha256
    std::map<std::string, double> timings;      ///< seconds
    std::string version = version_string();

    Json to_json() const;
    static RunManifest from_json(const Json& j);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Hashes the named artifacts (relative to run_dir) and writes run_dir/manifest.json.
RunManifest write_manifest(const std::filesystem::path& run_dir, RunManifest manifest,
                           const std::vector<std::string>& artifacts);
/// Re-hashes every listed artifact; returns the names whose hash differs or that are missing.
std::vector<std::string> verify_manifest(const std::filesystem::path& run_dir);

/// Final mass and energy drift, clipped mass and abort status of a simulate run.
Json simulation_summary(const Trajectory& run, const std::optional<double>& c_ap);

Json mollify_report(const MollifyResult& result, double gamma, double epsilon, double input_mass);

struct RenderResult {
    std::filesystem::path json_path;
    std::filesystem::path csv_path;
    std::size_t rows = 0;
};

inline constexpr const char* kRenderedJson = "rendered.json";
inline constexpr const char* kRenderedCsv = "rendered.csv";

/// Merges manifest, ledger.csv, summary.json and report*.json of a run dir into rendered.json and a
/// plot-ready rendered.csv with columns t,Psi,exp(C_ap t)*Psi0,H,Hbar. Throws std::runtime_error
/// listing the missing artifacts when the directory holds none. Re-rendering is byte-identical.
RenderResult report_render(const std::filesystem::path& run_dir);

}  // namespace riesz_ep
