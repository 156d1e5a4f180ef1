#include "riesz_ep/reporting.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef RIESZ_EP_VERSION
#define RIESZ_EP_VERSION "0.0.0"
#endif

namespace riesz_ep {

namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json case_json(const CheckCase& c, const std::string& prefix) {
    return Json{{"name", prefix + c.name},
                {"lhs", finite_or_null(c.lhs)},
                {"rhs", finite_or_null(c.rhs)},
                {"ratio", finite_or_null(c.ratio)},
                {"slack", finite_or_null(c.slack)},
                {"pass", c.pass}};
}

Json summary_json(const InequalityReport& r) {
    Json s = Json::object();
    for (const auto& [k, v] : r.summary) s[k] = finite_or_null(v);
    Json series = Json::object();
    for (const auto& [k, v] : r.series) {
        Json arr = Json::array();
        for (double x : v) arr.push_back(finite_or_null(x));
        series[k] = arr;
    }
    if (!series.empty()) s["series"] = series;
    if (!r.notes.empty()) s["notes"] = r.notes;
    if (!r.corpus.empty()) s["corpus"] = r.corpus;
    s["empirical_constant"] = finite_or_null(r.empirical_constant);
    s["pass"] = r.pass;
    return s;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
    std::vector<std::optional<double>> values(const std::string& name) const {
        std::vector<std::optional<double>> out;
        const int c = column(name);
        for (const auto& r : rows) {
            if (c < 0 || static_cast<std::size_t>(c) >= r.size() || r[static_cast<std::size_t>(c)].empty())
                out.emplace_back();
            else
                out.emplace_back(std::stod(r[static_cast<std::size_t>(c)]));
        }
        return out;
    }
};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Table read_csv(const fs::path& path) {
    std::istringstream in(read_bytes(path));
    Table t;
    std::string line;
    if (std::getline(in, line)) t.header = split(line, ',');
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line, ','));
    return t;
}

Json table_json(const Table& t) {
    Json out = Json::object();
    for (const auto& name : t.header) {
        Json col = Json::array();
        for (const auto& v : t.values(name)) col.push_back(v ? Json(*v) : Json(nullptr));
        out[name] = col;
    }
    return out;
}

/// The Gronwall series (t, psi, envelope, H, Hbar) of a report, single or combined.
const Json* gronwall_series(const Json& report) {
    if (!report.contains("summary")) return nullptr;
    const Json& s = report["summary"];
    auto usable = [](const Json& j) {
        return j.is_object() && j.contains("series") && j["series"].contains("envelope");
    };
    if (usable(s)) return &s["series"];
    if (s.contains("gronwall") && usable(s["gronwall"])) return &s["gronwall"]["series"];
    return nullptr;
}

std::string cell(const Json& v) { return v.is_number() ? num(v.get<double>()) : std::string(); }
std::string cell(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::string version_string() { return RIESZ_EP_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

Json report_json(const InequalityReport& report) {
    Json cases = Json::array();
    for (const auto& c : report.cases) cases.push_back(case_json(c, ""));
    return Json{{"suite", report.name}, {"seed", report.seed}, {"cases", cases}, {"summary", summary_json(report)}};
}

Json combined_report_json(const std::string& suite, const std::vector<InequalityReport>& reports) {
    Json cases = Json::array();
    Json summary = Json::object();
    bool pass = !reports.empty();
    std::uint64_t seed = reports.empty() ? 0 : reports.front().seed;
    for (const auto& r : reports) {
        for (const auto& c : r.cases) cases.push_back(case_json(c, r.name + "/"));
        summary[r.name] = summary_json(r);
        pass = pass && r.pass;
    }
    summary["pass"] = pass;
    return Json{{"suite", suite}, {"seed", seed}, {"cases", cases}, {"summary", summary}};
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& value) { write_text(path, value.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
    try {
        return Json::parse(read_bytes(path));
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

Json RunManifest::to_json() const {
    return Json{{"command", command}, {"config", config}, {"seed", seed},
                {"hashes", hashes},   {"timings", timings}, {"version", version}};
}

RunManifest RunManifest::from_json(const Json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.hashes = j.at("hashes").get<std::map<std::string, std::string>>();
    m.timings = j.at("timings").get<std::map<std::string, double>>();
    m.version = j.at("version").get<std::string>();
    return m;
}

RunManifest write_manifest(const fs::path& run_dir, RunManifest manifest, const std::vector<std::string>& artifacts) {
    for (const auto& name : artifacts) manifest.hashes[name] = sha256_file(run_dir / name);
    write_json(run_dir / kManifestName, manifest.to_json());
    return manifest;
}

std::vector<std::string> verify_manifest(const fs::path& run_dir) {
    const RunManifest m = RunManifest::from_json(read_json(run_dir / kManifestName));
    std::vector<std::string> bad;
    for (const auto& [name, hash] : m.hashes) {
        const fs::path p = run_dir / name;
        if (!fs::exists(p) || sha256_file(p) != hash) bad.push_back(name);
    }
    return bad;
}

Json simulation_summary(const Trajectory& run, const std::optional<double>& c_ap) {
    const auto& first = run.ledger.front();
    const auto& last = run.ledger.back();
    Json s{{"role", to_string(run.role)},
           {"final_time", last.t},
           {"outputs", run.ledger.size()},
           {"steps", run.dts.size()},
           {"mass_initial", first.mass},
           {"mass_drift", (last.mass - run.clipped_mass - first.mass) / first.mass},
           {"clipped_mass", run.clipped_mass},
           {"energy_initial", first.total},
           {"energy_drift", (last.total - first.total) / first.total},
           {"aborted", !run.completed()},
           {"abort_reason", run.abort_reason ? Json(*run.abort_reason) : Json(nullptr)}};
    if (c_ap) s["C_ap"] = *c_ap;
    return s;
}

Json mollify_report(const MollifyResult& r, double gamma, double epsilon, double input_mass) {
    Json ladder = Json::array();
    for (const auto& s : r.ladder)
        ladder.push_back(Json{{"delta", s.delta}, {"l1", s.l1}, {"lgamma", s.lgamma}, {"combined", s.combined()}});
    const double mass_gap = std::abs(integrate(r.phi) - input_mass);
    return Json{{"gamma", gamma},
                {"epsilon", epsilon},
                {"attained", r.attained},
                {"delta", r.delta},
                {"range_level", r.range_level},
                {"support_radius", r.support_radius},
                {"l1_error", r.l1_error},
                {"lgamma_error", r.lgamma_error},
                {"combined_error", r.combined()},
                {"mass_gap", mass_gap},
                {"ladder", ladder}};
}

RenderResult report_render(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir)) throw std::runtime_error("run directory " + run_dir.string() + " does not exist");
    const bool has_manifest = fs::exists(run_dir / kManifestName);
    const bool has_ledger = fs::exists(run_dir / "ledger.csv");
    std::vector<fs::path> reports;
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() == ".json" && name != kManifestName && name != "summary.json" &&
            name != kRenderedJson)
            reports.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());
    if (!has_manifest || (!has_ledger && reports.empty())) {
        std::string missing;
        if (!has_manifest) missing += " manifest.json";
        if (!has_ledger && reports.empty()) missing += " ledger.csv|report.json";
        throw std::runtime_error("run directory " + run_dir.string() + " is missing:" + missing);
    }

    Json merged = Json::object();
    merged["manifest"] = read_json(run_dir / kManifestName);
    if (fs::exists(run_dir / "summary.json")) merged["summary"] = read_json(run_dir / "summary.json");
    Json report_docs = Json::object();
    const Json* series = nullptr;
    for (const auto& p : reports) {
        report_docs[p.filename().string()] = read_json(p);
        if (!series) series = gronwall_series(report_docs[p.filename().string()]);
    }
    merged["reports"] = report_docs;

    std::ostringstream csv;
    csv << "t,Psi,exp(C_ap t)*Psi0,H,Hbar\n";
    std::size_t rows = 0;
    if (series) {
        const Json& s = *series;
        for (std::size_t k = 0; k < s["t"].size(); ++k, ++rows)
            csv << cell(s["t"][k]) << ',' << cell(s["psi"][k]) << ',' << cell(s["envelope"][k]) << ','
                << cell(s["H"][k]) << ',' << cell(s["Hbar"][k]) << '\n';
    } else if (has_ledger) {
        const Table ledger = read_csv(run_dir / "ledger.csv");
        merged["ledger"] = table_json(ledger);
        std::optional<Table> ref;
        if (fs::exists(run_dir / "reference_ledger.csv")) {
            ref = read_csv(run_dir / "reference_ledger.csv");
            merged["reference_ledger"] = table_json(*ref);
        }
        const auto t = ledger.values("t");
        const auto psi = ledger.values("Psi");
        const auto h = ledger.values("H");
        const auto hbar = ref ? ref->values("H") : std::vector<std::optional<double>>(t.size());
        std::optional<double> c_ap;
        if (merged.contains("summary") && merged["summary"].contains("C_ap"))
            c_ap = merged["summary"]["C_ap"].get<double>();
        for (std::size_t k = 0; k < t.size(); ++k, ++rows) {
            std::optional<double> env;
            if (c_ap && t[k] && !psi.empty() && psi[0]) env = std::exp(*c_ap * *t[k]) * *psi[0];
            csv << cell(t[k]) << ',' << cell(psi[k]) << ',' << cell(env) << ',' << cell(h[k]) << ','
                << cell(k < hbar.size() ? hbar[k] : std::nullopt) << '\n';
        }
    }
    RenderResult out{run_dir / kRenderedJson, run_dir / kRenderedCsv, rows};
    write_json(out.json_path, merged);
    write_text(out.csv_path, csv.str());
    return out;
}

}  // namespace riesz_ep
