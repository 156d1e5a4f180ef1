#pragma once

namespace riesz_ep {

/// gamma-law gas: p = rho^gamma, h = rho^gamma / (gamma - 1).
struct GasLaw {
    double gamma = 2.0;

    /// Throws std::domain_error unless gamma > 1.
    static GasLaw make(double gamma);
    /// Lower bound 2d/(d+1) on gamma under which rho grad(phi) is integrable for weak states.
    static double weak_solution_gamma_floor(int d) { return 2.0 * d / (d + 1.0); }
};

double pressure(double rho, const GasLaw& law);
double pressure_prime(double rho, const GasLaw& law);
double internal_energy(double rho, const GasLaw& law);
double h_prime(double rho, const GasLaw& law);
double h_second(double rho, const GasLaw& law);
double sound_speed(double rho, const GasLaw& law);

/// rho^gamma - rho_bar^gamma - gamma rho_bar^(gamma-1) (rho - rho_bar) for rho, rho_bar >= 0,
/// summed as a binomial series near rho = rho_bar to avoid cancellation. No argument checks.
double relative_power(double rho, double rho_bar, double gamma);

/// Bregman divergence h(rho) - h(rho_bar) - h'(rho_bar)(rho - rho_bar). Needs rho_bar > 0.
double h_relative(double rho, double rho_bar, const GasLaw& law);
/// Same construction for the pressure.
double p_relative(double rho, double rho_bar, const GasLaw& law);

}  // namespace riesz_ep
