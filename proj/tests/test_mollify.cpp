#include <doctest.h>

#include <cmath>

#include "riesz_ep/mollify.hpp"

using namespace riesz_ep;

namespace {

GridFunction ball(int n, double L, double R) {
    return GridFunction::sample(GridSpec::make(3, n, L), [=](auto x) {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < R * R ? 1.0 : 0.0;
    });
}

}  // namespace

TEST_SUITE("mollify") {

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(MollifierSpec::make(0.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(MollifierSpec::make(1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(MollifierSpec::make(0.5, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(MollifierSpec::make(0.5, 1.0, 0.0), std::invalid_argument);
    CHECK(MollifierSpec::make(0.5, 1.0, 0.1).delta == 0.5);
}

TEST_CASE("discrete mollifier has unit mass") {
    for (double delta : {0.1, 0.23, 0.5})
        CHECK(std::abs(mollifier_mass(GridSpec::make(3, 32, 1.0), delta) - 1.0) <= 1e-12);
}

TEST_CASE("support stays within supp f + B_delta, cell by cell") {
    const GridFunction f = ball(16, 1.0, 0.3);
    const double delta = 0.3;
    const GridFunction phi = mollify(f, delta);
    const GridSpec& s = f.spec();
    const double h = s.spacing();
    std::vector<int> a(3), b(3);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        s.unflatten(i, a);
        bool near = false;
        for (std::size_t j = 0; j < f.size() && !near; ++j) {
            if (f[j] == 0.0) continue;
            s.unflatten(j, b);
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]) * h * h;
            near = d2 < delta * delta;
        }
        if (!near) CHECK(phi[i] == 0.0);
    }
    CHECK(integrate(phi) == doctest::Approx(integrate(f)).epsilon(1e-12));
}

TEST_CASE("smooth input and a loose target: first rung suffices") {
    const GridSpec s = GridSpec::make(3, 32, 1.0);
    const GridFunction f = GridFunction::sample(s, [](auto x) {
        const double q = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 0.36;
        return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
    });
    const MollifyResult r = mollify_approximate(f, 2.0, 0.5);
    CHECK(r.attained);
    CHECK(r.ladder.size() == 1);
    CHECK(r.combined() < 0.5);
    CHECK(std::abs(integrate(r.phi) - integrate(f)) <= r.l1_error);
}

TEST_CASE("ball indicator: ladder decreases, unreachable targets are reported") {
    const GridFunction f = ball(32, 1.0, 0.5);
    const MollifyResult r = mollify_ladder(f, 2.0, 1e-3);
    CHECK(!r.attained);
    REQUIRE(r.ladder.size() >= 4);
    CHECK(r.ladder.back().delta >= 2.0 * f.spec().spacing() * (1 - 1e-12));
    for (std::size_t k = 1; k < r.ladder.size(); ++k) CHECK(r.ladder[k].combined() < r.ladder[k - 1].combined());
    CHECK(std::abs(integrate(r.phi) - integrate(f)) <= r.l1_error);
    CHECK_THROWS_AS(mollify_approximate(f, 2.0, 1e-3), MollifyUnattainable);
    // a reachable target stops the ladder early
    const MollifyResult easy = mollify_approximate(f, 2.0, 0.5);
    CHECK(easy.combined() < 0.5);
    CHECK(easy.ladder.size() < r.ladder.size());
}

TEST_CASE("truncation budgets") {
    // a tall narrow spike gets clipped in range, a faint far tail gets cut in support
    GridFunction f = ball(32, 1.0, 0.4);
    f[f.size() / 2 + 16 * 32 + 16] = 400.0;
    f[5] = 1e-6;
    const MollifyResult r = mollify_ladder(f, 2.0, 0.8);
    CHECK(r.range_level < 400.0);
    CHECK(r.support_radius < 0.41);
    CHECK(r.support_radius > 0.3);
}

}
