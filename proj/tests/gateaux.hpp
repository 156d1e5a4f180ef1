#pragma once
// Central-difference directional derivative checks of the energy functionals, shared by the unit
// and acceptance suites.

#include <cmath>
#include <string>
#include <vector>

#include "riesz_ep/energy.hpp"
#include "riesz_ep/riesz.hpp"

namespace gateaux {

using namespace riesz_ep;

struct Result {
    std::string name;
    double rel_error = 0.0;       ///< at eps
    double rel_error_half = 0.0;  ///< at eps / 2
    double order = 0.0;           ///< log2 of their ratio
    bool quadratic = false;       ///< the functional is quadratic along this direction: exact up to rounding
};

/// Positive smooth state on [-1, 1]^3 with a swirl, plus smooth perturbation directions.
struct Setup {
    GridSpec grid = GridSpec::make(3, 24, 1.0);
    GasLaw law{5.0 / 3.0};
    FluidState state;
    GridFunction eta;        ///< density direction
    VectorGridFunction xi;   ///< momentum direction

    Setup() {
        auto bump = [](std::span<const double> x, double cx, double r) {
            const double q = ((x[0] - cx) * (x[0] - cx) + x[1] * x[1] + x[2] * x[2]) / (r * r);
            return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
        };
        const GridFunction rho = GridFunction::sample(grid, [&](auto x) { return 0.3 + 2.0 * bump(x, 0.1, 0.8); });
        VectorGridFunction u(grid);
        u[0] = GridFunction::sample(grid, [&](auto x) { return -0.7 * x[1] * bump(x, 0.0, 0.9); });
        u[1] = GridFunction::sample(grid, [&](auto x) { return 0.7 * x[0] * bump(x, 0.0, 0.9); });
        u[2] = GridFunction::sample(grid, [&](auto x) { return 0.2 * bump(x, -0.2, 0.7); });
        state = FluidState::from_velocity(rho, u);
        // direction amplitudes put the eps^2 term well above double rounding at eps = 1e-4
        eta = GridFunction::sample(grid, [&](auto x) { return 10.0 * bump(x, -0.25, 0.6) - 6.0 * bump(x, 0.3, 0.5); });
        xi = VectorGridFunction(grid);
        for (int k = 0; k < 3; ++k)
            xi[k] = GridFunction::sample(grid, [&, k](auto x) { return (4.0 + 2.0 * k) * bump(x, 0.05 * k, 0.7); });
    }
};

template <class F>
Result check(const std::string& name, F&& functional, double exact, double eps, bool quadratic) {
    auto diff = [&](double e) { return (functional(e) - functional(-e)) / (2.0 * e); };
    Result r;
    r.name = name;
    r.quadratic = quadratic;
    r.rel_error = std::abs(diff(eps) - exact) / std::abs(exact);
    r.rel_error_half = std::abs(diff(0.5 * eps) - exact) / std::abs(exact);
    r.order = std::log2(r.rel_error / r.rel_error_half);
    return r;
}

/// dE/drho = h'(rho) + phi, dK/drho = -|u|^2/2, dK/d(rho u) = u, and the joint (rho, rho u) direction.
inline std::vector<Result> run_all(double eps) {
    const Setup s;
    const double vac = 0.0;
    const GridFunction& rho = s.state.rho;
    std::vector<Result> out;

    {
        const GridFunction phi = potential_of(rho);
        GridFunction deriv(s.grid);
        for (std::size_t i = 0; i < rho.size(); ++i) deriv[i] = h_prime(rho[i], s.law) + phi[i];
        out.push_back(check(
            "dE/drho = h' + phi",
            [&](double e) { return potential_energy_kernel_form(rho + s.eta * e, s.law); },
            inner_product(deriv, s.eta), eps, false));
    }
    const VectorGridFunction u = velocity(s.state, vac);
    {
        const GridFunction deriv = u.squared_norm() * -0.5;
        out.push_back(check(
            "dK/drho = -|u|^2/2",
            [&](double e) { return kinetic_energy(FluidState(rho + s.eta * e, s.state.m), vac); },
            inner_product(deriv, s.eta), eps, false));
    }
    {
        double exact = 0.0;
        for (int k = 0; k < 3; ++k) exact += inner_product(u[k], s.xi[k]);
        auto moved = [&](double e) {
            VectorGridFunction m = s.state.m;
            for (int k = 0; k < 3; ++k) m[k] += s.xi[k] * e;
            return m;
        };
        out.push_back(check(
            "dK/d(rho u) = u", [&](double e) { return kinetic_energy(FluidState(rho, moved(e)), vac); }, exact, eps,
            true));
        out.push_back(check(
            "dK along (eta, xi)",
            [&](double e) { return kinetic_energy(FluidState(rho + s.eta * e, moved(e)), vac); },
            exact + inner_product(u.squared_norm() * -0.5, s.eta), eps, false));
    }
    return out;
}

}  // namespace gateaux
