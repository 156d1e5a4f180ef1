#include <doctest.h>

#include <cmath>
#include <numbers>

#include "riesz_ep/harness.hpp"

using namespace riesz_ep;

namespace {

// Exterior of the cube as (exterior of the inscribed ball) - (cube minus ball), the second part
// integrated radially along each direction of the sphere.
double exterior_oracle(double L, double s) {
    const double ball = 4.0 * std::numbers::pi * std::pow(L, 3.0 - s) / (s - 3.0);
    const int m = 1200;
    double shell = 0.0;
    for (int i = 0; i < m; ++i) {
        const double mu = -1.0 + (i + 0.5) * 2.0 / m;
        const double st = std::sqrt(1.0 - mu * mu);
        for (int j = 0; j < m; ++j) {
            const double ph = (j + 0.5) * 2.0 * std::numbers::pi / m;
            const double w = std::max({std::abs(st * std::cos(ph)), std::abs(st * std::sin(ph)), std::abs(mu)});
            const double rho = L / w;
            shell += (std::pow(rho, 3.0 - s) - std::pow(L, 3.0 - s)) / (3.0 - s);
        }
    }
    shell *= (2.0 / m) * (2.0 * std::numbers::pi / m);
    return ball - shell;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("cube exterior integral against a spherical oracle") {
    for (double s : {4.0, 5.0, 7.5})
        for (double L : {1.0, 2.0}) {
            INFO("s=" << s << " L=" << L);
            CHECK(cube_exterior_power_integral(3, L, s) == doctest::Approx(exterior_oracle(L, s)).epsilon(1e-5));
        }
    CHECK_THROWS(cube_exterior_power_integral(3, 1.0, 3.0));
}

TEST_CASE("Riesz bound gates and a small corpus") {
    HlsOptions o;
    o.n = 16;
    o.trials = 4;
    CHECK_THROWS_AS(check_hls_family(3, 2.0, 1.5, o), ConfigError);
    CHECK_THROWS_AS(check_hls_family(3, 1.0, 1.0, o), ConfigError);
    const InequalityReport r = check_hls_family(3, 1.0, 1.2, o);
    CHECK(!r.cases.empty());
    for (const auto& c : r.cases)
        if (c.name.find("/ratio/") != std::string::npos) CHECK(std::isfinite(c.lhs));
    CHECK(r.empirical_constant > 0.0);
    const InequalityReport r2 = check_hls_family(3, 2.0, 1.2, o);
    CHECK(r2.notes.size() == 1);  // L2 pairing needs alpha < d/2
    const auto corpus_a = hls_corpus(3, 3, 9), corpus_b = hls_corpus(3, 3, 9);
    const double x[3] = {0.1, -0.2, 0.05};
    CHECK(corpus_a[2].f(x) == corpus_b[2].f(x));
}

TEST_CASE("kernel symmetry and the double sum") {
    const GridSpec g = GridSpec::make(3, 16, 1.5);
    auto bump = [](double cx, double r) {
        return [=](std::span<const double> x) {
            const double q = ((x[0] - cx) * (x[0] - cx) + x[1] * x[1] + x[2] * x[2]) / (r * r);
            return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
        };
    };
    const GridFunction rho = GridFunction::sample(g, bump(0.2, 0.7)), eta = GridFunction::sample(g, bump(-0.3, 0.5));
    const BilinearForms b = check_ibp_bilinear(rho, eta);
    CHECK(std::abs(b.rho_psi - b.eta_phi) <= 1e-10 * std::abs(b.rho_psi));
    REQUIRE(b.double_sum.has_value());
    CHECK(*b.double_sum == doctest::Approx(b.rho_psi).epsilon(1e-12));
    CHECK(b.field_form == doctest::Approx(b.rho_psi).epsilon(0.15));
}

TEST_CASE("dissipativity windows") {
    std::vector<double> t, flat, down, up;
    for (int k = 0; k <= 10; ++k) {
        t.push_back(0.02 * k);
        flat.push_back(1.0);
        down.push_back(1.0 - 0.01 * k);
        up.push_back(1.0 + 0.01 * k);
    }
    const std::vector<double> kappas{0.02, 0.04, 0.1};
    const DissipativityReport f = dissipativity_check(t, flat, 1e-3, kappas);
    CHECK(f.pass);
    CHECK(std::abs(f.worst_window) < 1e-14);
    const DissipativityReport d = dissipativity_check(t, down, 1e-3, kappas);
    CHECK(d.pass);
    CHECK(d.worst_window < 0.0);
    CHECK(!dissipativity_check(t, up, 1e-3, kappas).pass);
    CHECK_THROWS_AS(dissipativity_check(t, flat, 1e-3, {0.05}), std::invalid_argument);
}

TEST_CASE("Gronwall envelope on synthetic series") {
    std::vector<double> t, flat, growth;
    for (int k = 0; k <= 20; ++k) {
        t.push_back(0.01 * k);
        flat.push_back(2e-6);
        growth.push_back(2e-6 * std::exp(3.0 * 0.01 * k));
    }
    const GronwallReport f = gronwall_envelope(t, flat, 1.0, 0.0);
    CHECK(f.envelope_pass);
    CHECK(f.c_star == doctest::Approx(0.0).scale(1.0));
    CHECK(gronwall_envelope(t, growth, 3.5, 0.0).envelope_pass);
    CHECK(!gronwall_envelope(t, growth, 1.0, 0.0).envelope_pass);
}

}
