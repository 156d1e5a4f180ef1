#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riesz_ep/grid.hpp"
#include "riesz_ep/thermo.hpp"

namespace riesz_ep {

/// Conserved pair (rho, m = rho u) at one instant.
struct FluidState {
    GridFunction rho;
    VectorGridFunction m;

    FluidState() = default;
    /// Throws std::invalid_argument when rho and m live on different grids.
    FluidState(GridFunction rho, VectorGridFunction m);
    static FluidState vacuum(const GridSpec& spec);
    /// Builds m = rho u.
    static FluidState from_velocity(const GridFunction& rho, const VectorGridFunction& u);

    const GridSpec& spec() const { return rho.spec(); }
    bool operator==(const FluidState& other) const;
};

/// Vacuum cut-off 1e-12 max(rho0); kinetic integrands vanish below it.
double vacuum_threshold(const GridFunction& rho0);

/// u = m / rho where rho > eps_vac, zero elsewhere.
VectorGridFunction velocity(const FluidState& s, double eps_vac);

double kinetic_energy(const FluidState& s, double eps_vac);

/// Internal plus electrostatic energy, with the electrostatic part in both of its forms.
struct PotentialEnergy {
    double internal = 0.0;
    double electrostatic_kernel = 0.0;  ///< (1/2) int rho phi
    double electrostatic_field = 0.0;   ///< (1/2) int |grad phi|^2

    double kernel_form() const { return internal + electrostatic_kernel; }
    double field_form() const { return internal + electrostatic_field; }
};

PotentialEnergy potential_energy(const GridFunction& rho, const GasLaw& law);
/// int h(rho) + (1/2) rho phi only; one convolution, no field evaluation.
double potential_energy_kernel_form(const GridFunction& rho, const GasLaw& law);
/// K + int h + (1/2)|grad phi|^2.
double total_energy(const FluidState& s, const GasLaw& law, double eps_vac);

/// One row of the energy record. Psi and J columns are empty without a reference state.
struct EnergyLedger {
    double t = 0.0;
    double mass = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
    std::optional<double> psi;
    std::optional<double> j1;
    std::optional<double> j2;
    std::optional<double> j3;
};

/// Mass and energies of s; Psi as well when ref is given (J columns are filled by the harness).
EnergyLedger energy_ledger(const FluidState& s, double t, const GasLaw& law, double eps_vac,
                           const FluidState* ref = nullptr);
/// CSV with header t,mass,K,E,H,Psi,J1,J2,J3.
std::string ledger_csv(std::span<const EnergyLedger> rows);

/// Pointwise ingredients of the relative energy, already integrated.
struct RelativeEnergyParts {
    double kinetic = 0.0;        ///< int (1/2) rho |u - u_bar|^2
    double internal = 0.0;       ///< int h(rho | rho_bar)
    double electrostatic = 0.0;  ///< int (1/2) |grad(phi - phi_bar)|^2

    double total() const { return kinetic + internal + electrostatic; }
};

/// Relative energy Psi of s with respect to the reference state. Throws std::domain_error when
/// the reference density is negative.
RelativeEnergyParts relative_energy_parts(const FluidState& s, const FluidState& ref, const GasLaw& law,
                                          double eps_vac);
double relative_energy(const FluidState& s, const FluidState& ref, const GasLaw& law, double eps_vac);

/// h(rho | rho_bar) field with the vacuum extension h'(0) = 0 where rho_bar = 0.
GridFunction h_relative_field(const GridFunction& rho, const GridFunction& rho_bar, const GasLaw& law);
GridFunction p_relative_field(const GridFunction& rho, const GridFunction& rho_bar, const GasLaw& law);

/// int h(rho | rho_bar) + (1/2) int (rho - rho_bar)(phi - phi_bar): the relative potential energy
/// with the electrostatic part in kernel form.
double relative_potential_energy_kernel(const GridFunction& rho, const GridFunction& rho_bar,
                                        const GasLaw& law);

/// (dH/drho, dH/d(rho u)) at the reference: (-|u|^2/2 + h'(rho) + phi, u).
struct DerivativeFields {
    GridFunction scalar;
    VectorGridFunction vector;
};
DerivativeFields functional_derivative_fields(const FluidState& ref, const GasLaw& law, double eps_vac);

/// Discrete divergence of the electrostatic stress -(1/2)|grad phi|^2 I + grad phi (x) grad phi.
/// In the continuum this equals -rho grad phi.
VectorGridFunction stress_tensor_divergence(const GridFunction& rho);

}  // namespace riesz_ep
