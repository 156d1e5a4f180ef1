#include "riesz_ep/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace riesz_ep {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    // keep floats recognisable as floats
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const long long v = to_integer(key, text);
    if (v < -(1LL << 31) || v > (1LL << 31) - 1) throw ConfigError(key + ": integer out of range");
    return static_cast<int>(v);
}

std::uint64_t to_seed(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(key + ": expected a non-negative 64-bit integer, got '" + text + "'");
    return v;
}

std::string to_string_value(const std::string& key, const std::string& text) {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"')
        throw ConfigError(key + ": expected a quoted string, got '" + text + "'");
    return text.substr(1, text.size() - 2);
}

std::vector<std::string> to_items(const std::string& key, const std::string& text) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ConfigError(key + ": expected an array [a, b, ...], got '" + text + "'");
    std::vector<std::string> out;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw ConfigError(key + ": array must not be empty");
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& s : to_items(key, text)) out.push_back(to_double(key, s));
    return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& s : to_items(key, text)) out.push_back(to_int(key, s));
    return out;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + f(xs[i]);
    return out + "]";
}

struct KeyDef {
    std::string name;  // "section.key" or "key"
    std::string doc;
    std::function<void(VerifyConfig&, const std::string&)> set;
    std::function<std::string(const VerifyConfig&)> get;
};

#define RE_DOUBLE(NAME, FIELD, DOC)                                                             \
    KeyDef {                                                                                    \
        NAME, DOC, [](VerifyConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
            [](const VerifyConfig& c) { return shortest(c.FIELD); }                             \
    }
#define RE_INT(NAME, FIELD, DOC)                                                             \
    KeyDef {                                                                                 \
        NAME, DOC, [](VerifyConfig& c, const std::string& v) { c.FIELD = to_int(NAME, v); }, \
            [](const VerifyConfig& c) { return std::to_string(c.FIELD); }                    \
    }
#define RE_DOUBLES(NAME, FIELD, DOC)                                                             \
    KeyDef {                                                                                     \
        NAME, DOC, [](VerifyConfig& c, const std::string& v) { c.FIELD = to_doubles(NAME, v); }, \
            [](const VerifyConfig& c) { return join(c.FIELD, shortest); }                        \
    }
#define RE_INTS(NAME, FIELD, DOC)                                                             \
    KeyDef {                                                                                  \
        NAME, DOC, [](VerifyConfig& c, const std::string& v) { c.FIELD = to_ints(NAME, v); }, \
            [](const VerifyConfig& c) { return join(c.FIELD, [](int i) { return std::to_string(i); }); } \
    }
#define RE_PERT(NAME, FIELD, DOC)                                                                            \
    KeyDef {                                                                                                 \
        NAME, DOC,                                                                                           \
            [](VerifyConfig& c, const std::string& v) { c.FIELD = parse_perturbation(to_string_value(NAME, v)); }, \
            [](const VerifyConfig& c) { return quote(to_string(c.FIELD)); }                                  \
    }

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = {
        {"d", "spatial dimension (>= 3)",
         [](VerifyConfig& c, const std::string& v) { c.scenario.grid.d = to_int("d", v); },
         [](const VerifyConfig& c) { return std::to_string(c.scenario.grid.d); }},
        {"n", "cells per axis of a plain simulate run",
         [](VerifyConfig& c, const std::string& v) { c.scenario.grid.n = to_int("n", v); },
         [](const VerifyConfig& c) { return std::to_string(c.scenario.grid.n); }},
        {"L", "box half-width; the domain is [-L, L]^d",
         [](VerifyConfig& c, const std::string& v) { c.scenario.grid.half_width = to_double("L", v); },
         [](const VerifyConfig& c) { return shortest(c.scenario.grid.half_width); }},
        {"gamma", "adiabatic exponent, p = rho^gamma",
         [](VerifyConfig& c, const std::string& v) { c.scenario.law.gamma = to_double("gamma", v); },
         [](const VerifyConfig& c) { return shortest(c.scenario.law.gamma); }},
        RE_DOUBLE("T", scenario.T, "final time"),
        RE_DOUBLE("cfl", scenario.cfl, "CFL number in ]0, 0.9]"),
        {"preset", "initial data preset (\"gaussian\")",
         [](VerifyConfig& c, const std::string& v) { c.scenario.initial.preset = to_string_value("preset", v); },
         [](const VerifyConfig& c) { return quote(c.scenario.initial.preset); }},
        RE_DOUBLE("delta", scenario.delta, "perturbation size for role = \"weak\""),
        RE_INT("cadence", scenario.cadence, "number of equal output intervals on [0, T]"),
        {"role", "\"reference\" (smooth positive data) or \"weak\"",
         [](VerifyConfig& c, const std::string& v) { c.scenario.role = parse_role(to_string_value("role", v)); },
         [](const VerifyConfig& c) { return quote(to_string(c.scenario.role)); }},
        RE_PERT("perturbation", scenario.perturbation, "\"none\", \"bump\", \"shear\" or \"coarsen\""),
        {"seed", "single 64-bit seed for every random corpus",
         [](VerifyConfig& c, const std::string& v) { c.scenario.seed = to_seed("seed", v); },
         [](const VerifyConfig& c) { return std::to_string(c.scenario.seed); }},
        RE_DOUBLE("initial.amplitude", scenario.initial.amplitude, "Gaussian amplitude of rho0"),
        RE_DOUBLE("initial.sigma", scenario.initial.sigma, "Gaussian width of rho0"),
        RE_DOUBLE("initial.floor", scenario.initial.floor, "constant added under the cut-off"),
        RE_DOUBLE("initial.support_radius", scenario.initial.support_radius,
                  "cut-off radius R of rho0 (0 means L/2; at most L/2)"),
        RE_INT("verify.hls_n", hls.n, "grid cells per axis for the Riesz-bound corpus"),
        RE_DOUBLE("verify.hls_half_width", hls.half_width, "box half-width for the Riesz-bound corpus"),
        RE_INT("verify.hls_trials", hls.trials, "corpus size"),
        RE_DOUBLES("verify.hls_alphas", hls_alphas, "Riesz degrees checked"),
        RE_DOUBLE("verify.hls_p", hls_p, "source exponent p"),
        RE_DOUBLE("verify.hls_dilation_tolerance", hls.dilation_tolerance, "max relative two-scale ratio drift"),
        RE_DOUBLE("verify.hls_spread_limit", hls.spread_limit, "max/median bound on dilate ratios"),
        RE_INTS("verify.ibp_ladder", ibp.ladder, "resolutions for the integration-by-parts checks"),
        RE_DOUBLE("verify.ibp_half_width", ibp.half_width, "box half-width for the integration-by-parts corpus"),
        RE_INT("verify.ibp_corpus", ibp.corpus, "integration-by-parts corpus size"),
        RE_DOUBLE("verify.ibp_symmetry_tolerance", ibp.symmetry_tolerance, "kernel symmetry tolerance"),
        RE_DOUBLE("verify.ibp_bilinear_tolerance", ibp.bilinear_tolerance, "field-form deviation at the finest rung"),
        RE_DOUBLE("verify.ibp_stress_tolerance", ibp.stress_tolerance, "stress-form deviation at the finest rung"),
        RE_INTS("verify.re_ladder", re_ladder, "resolutions for the relative-energy inequality"),
        RE_INT("verify.re_cadence", re_cadence, "output intervals for relative-energy runs"),
        RE_DOUBLE("verify.re_slack", re_slack, "inequality slack as a fraction of H(0)"),
        RE_PERT("verify.re_perturbation", re_perturbation, "perturbation of the relative-energy run"),
        RE_DOUBLE("verify.re_delta", re_delta, "its size"),
        RE_DOUBLE("verify.re_residual_ratio", re_residual_ratio, "min residual reduction per rung"),
        RE_INT("verify.gronwall_n", gronwall_n, "resolution of the Gronwall run"),
        RE_PERT("verify.gronwall_perturbation", gronwall_perturbation, "perturbation of the Gronwall run"),
        RE_DOUBLE("verify.gronwall_delta", gronwall_delta, "its size"),
        RE_INT("verify.ws_reference_n", ws_reference_n, "reference resolution for weak-strong"),
        RE_INTS("verify.ws_ladder", ws_ladder, "weak-run resolutions"),
        RE_DOUBLE("verify.ws_ratio", ws_ratio, "min max-Psi reduction per rung"),
        RE_DOUBLE("verify.ws_same_grid_tolerance", ws_same_grid_tolerance, "same-grid max Psi bound / H(0)"),
        RE_INT("verify.dissipativity_n", dissipativity_n, "resolution of the energy-budget reference run"),
        RE_DOUBLE("verify.dissipativity_slack", dissipativity_slack, "window slack as a fraction of H(0)"),
        RE_DOUBLES("verify.dissipativity_kappas", dissipativity_kappas, "window lengths (multiples of T/cadence)"),
        RE_DOUBLE("verify.mass_tolerance", mass_tolerance, "relative mass drift bound"),
        RE_DOUBLE("verify.energy_drift_tolerance", energy_drift_tolerance, "relative reference energy drift bound"),
    };
    return table;
}

#undef RE_DOUBLE
#undef RE_INT
#undef RE_DOUBLES
#undef RE_INTS
#undef RE_PERT

const KeyDef* find_key(const std::string& name) {
    for (const auto& k : key_table())
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = "line " + std::to_string(number) + ": ";
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + "expected key = value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (!raw.emplace(full, value).second) throw ConfigError(where + "duplicate key '" + full + "'");
    }
    return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

VerifyConfig verify_config_from(const RawConfig& raw) {
    VerifyConfig c;
    for (const auto& [key, value] : raw) {
        const KeyDef* def = find_key(key);
        if (!def) throw ConfigError("unknown config key '" + key + "' (see --help for the accepted keys)");
        try {
            def->set(c, value);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(key + ": " + e.what());
        }
    }
    c.hls.seed = c.scenario.seed;
    c.ibp.seed = c.scenario.seed;
    return c;
}

ScenarioConfig scenario_config_from(const RawConfig& raw) {
    for (const auto& entry : raw)
        if (entry.first.rfind("verify.", 0) == 0)
            throw ConfigError("key '" + entry.first + "' belongs to verify configs, not scenarios");
    return verify_config_from(raw).scenario;
}

VerifyConfig load_verify_config(const std::filesystem::path& path) {
    return verify_config_from(read_config_file(path));
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    return scenario_config_from(read_config_file(path));
}

std::vector<std::string> validate(const VerifyConfig& c) {
    auto warnings = c.scenario.validate();
    auto ladder = [](const std::string& key, const std::vector<int>& rungs, std::size_t min_len) {
        if (rungs.size() < min_len)
            throw ConfigError(key + " needs at least " + std::to_string(min_len) + " resolutions");
        for (std::size_t i = 0; i < rungs.size(); ++i) {
            if (rungs[i] < 4) throw ConfigError(key + ": resolutions must be >= 4");
            if (i && rungs[i] <= rungs[i - 1]) throw ConfigError(key + " must be strictly increasing");
        }
    };
    ladder("verify.ibp_ladder", c.ibp.ladder, 2);
    ladder("verify.re_ladder", c.re_ladder, 2);
    ladder("verify.ws_ladder", c.ws_ladder, 2);
    if (c.ws_ladder.back() >= c.ws_reference_n)
        throw ConfigError("verify.ws_ladder must stay below verify.ws_reference_n");
    for (int n : {c.gronwall_n, c.dissipativity_n, c.ws_reference_n, c.hls.n})
        if (n < 4) throw ConfigError("verify resolutions must be >= 4");
    if (c.hls.trials < 1) throw ConfigError("verify.hls_trials must be >= 1");
    if (c.re_cadence < 1) throw ConfigError("verify.re_cadence must be >= 1");
    for (double k : c.dissipativity_kappas)
        if (!(k > 0.0 && k <= c.scenario.T)) throw ConfigError("verify.dissipativity_kappas must lie in ]0, T]");
    for (double t : {c.re_slack, c.ws_same_grid_tolerance, c.dissipativity_slack, c.mass_tolerance,
                     c.energy_drift_tolerance, c.hls.dilation_tolerance, c.ibp.symmetry_tolerance,
                     c.ibp.bilinear_tolerance, c.ibp.stress_tolerance})
        if (!(t >= 0.0)) throw ConfigError("verify tolerances must be non-negative");
    return warnings;
}

std::string config_key_help() {
    const VerifyConfig defaults;
    std::ostringstream os;
    for (const auto& k : key_table())
        os << "  " << k.name << " = " << k.get(defaults) << "    " << k.doc << '\n';
    return os.str();
}

std::string render_config(const VerifyConfig& config) {
    std::ostringstream os;
    std::string section;
    for (const auto& k : key_table()) {
        const auto dot = k.name.find('.');
        const std::string s = dot == std::string::npos ? "" : k.name.substr(0, dot);
        if (s != section) {
            os << "\n[" << s << "]\n";
            section = s;
        }
        os << (dot == std::string::npos ? k.name : k.name.substr(dot + 1)) << " = " << k.get(config) << '\n';
    }
    return os.str();
}

}  // namespace riesz_ep
