#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riesz_ep/energy.hpp"
#include "riesz_ep/grid.hpp"
#include "riesz_ep/thermo.hpp"

namespace riesz_ep {

enum class Role { reference, weak };
enum class Perturbation { none, bump, shear, coarsen };

std::string to_string(Role r);
std::string to_string(Perturbation p);
Role parse_role(const std::string& s);
Perturbation parse_perturbation(const std::string& s);

/// Smooth compactly supported initial density
///   rho0 = (amplitude exp(-|x|^2 / sigma^2) + floor) chi(|x|),  chi(r) = exp(-r^2 / (R^2 - r^2)),
/// with R = support_radius, at rest. chi is C-infinity and vanishes with all derivatives at R.
struct InitialData {
    std::string preset = "gaussian";
    double amplitude = 0.1;
    double sigma = 2.0;
    double floor = 1e-3;
    double support_radius = 0.0;  ///< 0 means L/2
};

/// Thrown for scenario constraint violations; the CLI maps it to exit code 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
    GridSpec grid = GridSpec{3, 64, 2.0};
    GasLaw law{2.0};
    double T = 0.2;
    double cfl = 0.4;
    InitialData initial;
    Role role = Role::weak;
    Perturbation perturbation = Perturbation::none;
    double delta = 0.0;
    int cadence = 10;  ///< number of equal output intervals on [0, T]
    std::uint64_t seed = 20240611;

    double support_radius() const;
    /// Throws ConfigError naming the violated rule. Warnings (gamma below the weak-solution floor
    /// on a reference run) are returned.
    std::vector<std::string> validate() const;
};

struct Rhs {
    GridFunction drho;
    VectorGridFunction dm;
};

/// Semi-discrete right-hand side: MUSCL (minmod on rho, u) + Rusanov flux per axis, vacuum
/// outside the box, plus the self-force -rho grad(phi) through the gradient kernel.
Rhs rhs(const FluidState& s, const GasLaw& law, double eps_vac);

/// Largest stable step cfl h / max(|u_k| + c).
double stable_dt(const FluidState& s, const GasLaw& law, double cfl, double eps_vac);

struct StepResult {
    FluidState state;
    double clipped_mass = 0.0;  ///< mass added by clipping negative densities to zero
};

/// One SSP-RK3 step; negative densities are clipped after every stage.
StepResult step(const FluidState& s, double dt, const GasLaw& law, double eps_vac);

struct Trajectory {
    std::vector<double> times;
    std::vector<FluidState> states;
    std::vector<EnergyLedger> ledger;
    std::vector<double> dts;
    double clipped_mass = 0.0;
    std::vector<double> clipped_history;  ///< cumulative clipped mass at each output time
    double eps_vac = 0.0;
    GasLaw law;
    Role role = Role::weak;
    std::optional<std::string> abort_reason;
    std::optional<FluidState> abort_state;

    bool completed() const { return !abort_reason.has_value(); }
    const GridSpec& spec() const { return states.front().spec(); }
};

/// Preset initial data on config.grid (no perturbation).
FluidState preset_state(const ScenarioConfig& config);
/// Applies the configured perturbation to a base state (weak runs only).
FluidState perturb(const FluidState& base, const ScenarioConfig& config);
/// Initial state of a run: preset data, perturbed when role = weak.
FluidState initial_state(const ScenarioConfig& config);

/// Evolves initial to config.T, recording states and ledger rows at the output cadence.
Trajectory run_from(const ScenarioConfig& config, const FluidState& initial);
Trajectory run(const ScenarioConfig& config);

/// Reference ("strong") run: positive smooth data, positivity of rho_bar on its initial
/// support enforced at every output.
Trajectory make_reference(const ScenarioConfig& config);
/// Weak run from the reference initial state (remapped to config.grid when the grids
/// differ) plus the configured perturbation.
Trajectory make_weak(const ScenarioConfig& config, const Trajectory& ref);

/// Conservative remap between two grids on the same box: separable overlap integration of a
/// piecewise-linear (MC-limited) reconstruction. Identity when the grids match.
GridFunction remap_conservative(const GridFunction& f, const GridSpec& target);
FluidState remap_conservative(const FluidState& s, const GridSpec& target);

}  // namespace riesz_ep
