#include "riesz_ep/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace riesz_ep {

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0)) throw std::domain_error("density must be non-negative, got " + std::to_string(rho));
}

void check_rho_bar(double rho_bar) {
    if (!(rho_bar > 0.0))
        throw std::domain_error("reference density must be positive, got " + std::to_string(rho_bar));
}

// rho^e through exp(e log rho); exact zero at vacuum for e > 0
double power(double rho, double e) {
    if (rho == 0.0) return 0.0;
    return std::exp(e * std::log(rho));
}

}  // namespace

double relative_power(double rho, double rho_bar, double gamma) {
    if (rho_bar == 0.0) return power(rho, gamma);
    const double t = (rho - rho_bar) / rho_bar;
    if (!(std::abs(t) < 0.125))
        return power(rho, gamma) - power(rho_bar, gamma) - gamma * power(rho_bar, gamma - 1.0) * (rho - rho_bar);
    // sum_{k >= 2} binom(gamma, k) t^k
    double term = 0.5 * gamma * (gamma - 1.0) * t * t;
    double b = term;
    for (int k = 3; k < 64 && std::abs(term) > 1e-18 * std::abs(b); ++k) {
        term *= (gamma - k + 1.0) / k * t;
        b += term;
    }
    return power(rho_bar, gamma) * b;
}

GasLaw GasLaw::make(double gamma) {
    if (!(gamma > 1.0)) throw std::domain_error("adiabatic exponent must satisfy gamma > 1");
    return GasLaw{gamma};
}

double pressure(double rho, const GasLaw& law) {
    check_rho(rho);
    return power(rho, law.gamma);
}

double pressure_prime(double rho, const GasLaw& law) {
    check_rho(rho);
    return law.gamma * power(rho, law.gamma - 1.0);
}

double internal_energy(double rho, const GasLaw& law) {
    check_rho(rho);
    return power(rho, law.gamma) / (law.gamma - 1.0);
}

double h_prime(double rho, const GasLaw& law) {
    check_rho(rho);
    return law.gamma * power(rho, law.gamma - 1.0) / (law.gamma - 1.0);
}

double h_second(double rho, const GasLaw& law) {
    if (!(rho > 0.0)) throw std::domain_error("h'' needs rho > 0");
    return law.gamma * power(rho, law.gamma - 2.0);
}

double sound_speed(double rho, const GasLaw& law) {
    return std::sqrt(pressure_prime(std::max(rho, 0.0), law));
}

double h_relative(double rho, double rho_bar, const GasLaw& law) {
    check_rho(rho);
    check_rho_bar(rho_bar);
    return relative_power(rho, rho_bar, law.gamma) / (law.gamma - 1.0);
}

double p_relative(double rho, double rho_bar, const GasLaw& law) {
    check_rho(rho);
    check_rho_bar(rho_bar);
    return relative_power(rho, rho_bar, law.gamma);
}

}  // namespace riesz_ep
