#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "riesz_ep/config.hpp"
#include "riesz_ep/reporting.hpp"

using namespace riesz_ep;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("riesz_ep_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("config-reporting") {

TEST_CASE("config text parsing") {
    const RawConfig raw = parse_config_text(
        "# comment\nn = 32   # trailing\nrole = \"reference\"\n\n[initial]\nsigma = 1.5\n[verify]\nws_ladder = [16, 24]\n");
    CHECK(raw.at("n") == "32");
    CHECK(raw.at("initial.sigma") == "1.5");
    CHECK(raw.at("verify.ws_ladder") == "[16, 24]");
    const VerifyConfig c = verify_config_from(raw);
    CHECK(c.scenario.grid.n == 32);
    CHECK(c.scenario.role == Role::reference);
    CHECK(c.scenario.initial.sigma == 1.5);
    CHECK(c.ws_ladder == std::vector<int>{16, 24});

    CHECK_THROWS_AS(parse_config_text("n = 3\nn = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[verify\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
    CHECK_THROWS_AS(verify_config_from(parse_config_text("bogus = 1\n")), ConfigError);
    CHECK_THROWS_AS(verify_config_from(parse_config_text("n = 3.5\n")), ConfigError);
    CHECK_THROWS_AS(verify_config_from(parse_config_text("role = reference\n")), ConfigError);
    CHECK_THROWS_AS(verify_config_from(parse_config_text("perturbation = \"wobble\"\n")), ConfigError);
    CHECK_THROWS_AS(scenario_config_from(parse_config_text("[verify]\nws_ratio = 2\n")), ConfigError);
}

TEST_CASE("rendered config parses back to the same values") {
    VerifyConfig c;
    c.scenario.seed = 123456789012345ULL;
    c.scenario.T = 0.1;
    c.re_ladder = {16, 32, 48};
    c.hls_alphas = {0.5, 1.75};
    c.re_perturbation = Perturbation::coarsen;
    const std::string text = render_config(c);
    const VerifyConfig back = verify_config_from(parse_config_text(text));
    CHECK(render_config(back) == text);
    CHECK(back.hls.seed == c.scenario.seed);
    CHECK(config_key_help().find("verify.ws_reference_n") != std::string::npos);
}

TEST_CASE("shipped default.toml matches the built-in defaults") {
    const VerifyConfig shipped = load_verify_config(fs::path(RIESZ_EP_SOURCE_DIR) / "configs" / "default.toml");
    CHECK(render_config(shipped) == render_config(VerifyConfig{}));
    CHECK(validate(shipped).empty());
}

TEST_CASE("verify config validation") {
    VerifyConfig c;
    c.ws_ladder = {32, 96};
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = VerifyConfig{};
    c.re_ladder = {64, 32};
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("report schema") {
    InequalityReport r;
    r.name = "demo";
    r.seed = 7;
    r.cases.push_back({"a", 1.0, 2.0, 0.5, 0.0, true});
    r.cases.push_back({"b", std::nan(""), 2.0, 0.5, 0.0, false});
    r.summary["x"] = 3.0;
    r.series["t"] = {0.0, 0.1};
    r.finalize();
    const Json j = report_json(r);
    CHECK(j["suite"] == "demo");
    CHECK(j["seed"] == 7);
    REQUIRE(j["cases"].size() == 2);
    for (const char* key : {"name", "lhs", "rhs", "ratio", "slack", "pass"}) CHECK(j["cases"][0].contains(key));
    CHECK(j["cases"][1]["lhs"].is_null());
    CHECK(j["summary"]["x"] == 3.0);
    CHECK(j["summary"]["pass"] == false);
    const Json all = combined_report_json("all", {r, r});
    CHECK(all["cases"][0]["name"] == "demo/a");
    CHECK(all["summary"]["pass"] == false);
}

TEST_CASE("manifest hashes verify on re-read") {
    const fs::path dir = fresh_dir("manifest");
    write_text(dir / "a.txt", "alpha");
    RunManifest m;
    m.command = "test";
    m.seed = 42;
    const RunManifest w = write_manifest(dir, m, {"a.txt"});
    CHECK(w.hashes.at("a.txt") == sha256_hex("alpha"));
    CHECK(verify_manifest(dir).empty());
    const RunManifest back = RunManifest::from_json(read_json(dir / kManifestName));
    CHECK(back.seed == 42);
    CHECK(back.version == version_string());
    write_text(dir / "a.txt", "tampered");
    CHECK(verify_manifest(dir) == std::vector<std::string>{"a.txt"});
}

TEST_CASE("render: missing artifacts, envelope column, idempotence") {
    const fs::path empty = fresh_dir("render_empty");
    try {
        report_render(empty);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("manifest.json") != std::string::npos);
    }

    const fs::path dir = fresh_dir("render");
    InequalityReport r;
    r.name = "gronwall";
    const std::vector<double> t{0.0, 0.1, 0.2}, psi{1e-6, 0.9e-6, 0.8e-6};
    std::vector<double> env;
    for (double x : t) env.push_back(std::exp(2.0 * x) * psi[0]);
    r.series = {{"t", t}, {"psi", psi}, {"envelope", env}, {"H", {1.0, 0.99, 0.98}}, {"Hbar", {1.0, 1.0, 1.0}}};
    r.cases.push_back({"envelope", 0.0, 1.0, 0.0, 0.0, true});
    r.finalize();
    write_json(dir / "report.json", combined_report_json("all", {r}));
    write_manifest(dir, RunManifest{}, {"report.json"});
    const RenderResult out = report_render(dir);
    CHECK(out.rows == 3);
    const std::string csv1 = slurp(out.csv_path), json1 = slurp(out.json_path);
    std::istringstream lines(csv1);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,Psi,exp(C_ap t)*Psi0,H,Hbar");
    while (std::getline(lines, line)) {
        std::stringstream ss(line);
        std::string c0, c1, c2;
        std::getline(ss, c0, ',');
        std::getline(ss, c1, ',');
        std::getline(ss, c2, ',');
        CHECK(std::stod(c2) >= std::stod(c1));
    }
    report_render(dir);
    CHECK(slurp(out.csv_path) == csv1);
    CHECK(slurp(out.json_path) == json1);
    CHECK(verify_manifest(dir).empty());
}

}
