#include "riesz_ep/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "riesz_ep/riesz.hpp"

namespace riesz_ep {

namespace {

void check_reference(const GridFunction& rho_bar) {
    const double floor = -1e-12 * std::max(rho_bar.max(), 0.0);
    if (rho_bar.min() < floor)
        throw std::domain_error("reference density is negative; the strong-solution contract needs rho_bar >= 0");
}

// Bregman divergences with rho_bar allowed to touch vacuum (h'(0) = p'(0) = 0 for gamma > 1).
double bregman_h(double rho, double rho_bar, const GasLaw& law) {
    return relative_power(std::max(rho, 0.0), std::max(rho_bar, 0.0), law.gamma) / (law.gamma - 1.0);
}

double bregman_p(double rho, double rho_bar, const GasLaw& law) {
    return relative_power(std::max(rho, 0.0), std::max(rho_bar, 0.0), law.gamma);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

FluidState::FluidState(GridFunction rho_, VectorGridFunction m_) : rho(std::move(rho_)), m(std::move(m_)) {
    if (!(m.spec == rho.spec()) || m.dim() != rho.spec().d)
        throw std::invalid_argument("density and momentum must share one grid");
}

FluidState FluidState::vacuum(const GridSpec& spec) { return FluidState(GridFunction(spec), VectorGridFunction(spec)); }

FluidState FluidState::from_velocity(const GridFunction& rho, const VectorGridFunction& u) {
    VectorGridFunction m(rho.spec());
    for (int k = 0; k < rho.spec().d; ++k) m[k] = hadamard(rho, u[k]);
    return FluidState(rho, std::move(m));
}

bool FluidState::operator==(const FluidState& other) const {
    if (!(spec() == other.spec())) return false;
    auto same = [](const GridFunction& a, const GridFunction& b) {
        return std::equal(a.values().begin(), a.values().end(), b.values().begin());
    };
    if (!same(rho, other.rho)) return false;
    for (int k = 0; k < m.dim(); ++k)
        if (!same(m[k], other.m[k])) return false;
    return true;
}

double vacuum_threshold(const GridFunction& rho0) { return 1e-12 * std::max(rho0.max(), 0.0); }

VectorGridFunction velocity(const FluidState& s, double eps_vac) {
    VectorGridFunction u(s.spec());
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] <= eps_vac) continue;
        for (int k = 0; k < s.m.dim(); ++k) u[k][i] = s.m[k][i] / s.rho[i];
    }
    return u;
}

double kinetic_energy(const FluidState& s, double eps_vac) {
    GridFunction density(s.spec());
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] <= eps_vac) continue;
        double m2 = 0.0;
        for (int k = 0; k < s.m.dim(); ++k) m2 += s.m[k][i] * s.m[k][i];
        density[i] = 0.5 * m2 / s.rho[i];
    }
    return integrate(density);
}

PotentialEnergy potential_energy(const GridFunction& rho, const GasLaw& law) {
    PotentialEnergy e;
    GridFunction h(rho.spec());
    for (std::size_t i = 0; i < rho.size(); ++i) h[i] = internal_energy(std::max(rho[i], 0.0), law);
    e.internal = integrate(h);
    e.electrostatic_kernel = 0.5 * inner_product(rho, electric_potential(rho));
    e.electrostatic_field = 0.5 * integrate(electric_field(rho).squared_norm());
    return e;
}

double potential_energy_kernel_form(const GridFunction& rho, const GasLaw& law) {
    GridFunction h(rho.spec());
    for (std::size_t i = 0; i < rho.size(); ++i) h[i] = internal_energy(std::max(rho[i], 0.0), law);
    return integrate(h) + 0.5 * inner_product(rho, potential_of(rho));
}

double total_energy(const FluidState& s, const GasLaw& law, double eps_vac) {
    GridFunction h(s.spec());
    for (std::size_t i = 0; i < s.rho.size(); ++i) h[i] = internal_energy(std::max(s.rho[i], 0.0), law);
    const double field = 0.5 * integrate(electric_field(s.rho).squared_norm());
    return kinetic_energy(s, eps_vac) + integrate(h) + field;
}

EnergyLedger energy_ledger(const FluidState& s, double t, const GasLaw& law, double eps_vac,
                           const FluidState* ref) {
    EnergyLedger row;
    row.t = t;
    row.mass = integrate(s.rho);
    row.kinetic = kinetic_energy(s, eps_vac);
    GridFunction h(s.spec());
    for (std::size_t i = 0; i < s.rho.size(); ++i) h[i] = internal_energy(std::max(s.rho[i], 0.0), law);
    row.potential = integrate(h) + 0.5 * integrate(electric_field(s.rho).squared_norm());
    row.total = row.kinetic + row.potential;
    if (ref) row.psi = relative_energy(s, *ref, law, eps_vac);
    return row;
}

std::string ledger_csv(std::span<const EnergyLedger> rows) {
    std::ostringstream os;
    os << "t,mass,K,E,H,Psi,J1,J2,J3\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (const auto& r : rows) {
        os << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.kinetic) << ',' << fmt(r.potential) << ','
           << fmt(r.total) << ',' << opt(r.psi) << ',' << opt(r.j1) << ',' << opt(r.j2) << ',' << opt(r.j3)
           << '\n';
    }
    return os.str();
}

GridFunction h_relative_field(const GridFunction& rho, const GridFunction& rho_bar, const GasLaw& law) {
    GridFunction out(rho.spec());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = bregman_h(rho[i], rho_bar[i], law);
    return out;
}

GridFunction p_relative_field(const GridFunction& rho, const GridFunction& rho_bar, const GasLaw& law) {
    GridFunction out(rho.spec());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = bregman_p(rho[i], rho_bar[i], law);
    return out;
}

RelativeEnergyParts relative_energy_parts(const FluidState& s, const FluidState& ref, const GasLaw& law,
                                          double eps_vac) {
    if (!(s.spec() == ref.spec())) throw std::invalid_argument("relative energy needs states on one grid");
    check_reference(ref.rho);
    const VectorGridFunction u_bar = velocity(ref, eps_vac);
    GridFunction kin(s.spec());
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] <= eps_vac) continue;
        // rho |u - u_bar|^2 = |m - rho u_bar|^2 / rho
        double w2 = 0.0;
        for (int k = 0; k < s.m.dim(); ++k) {
            const double w = s.m[k][i] - s.rho[i] * u_bar[k][i];
            w2 += w * w;
        }
        kin[i] = 0.5 * w2 / s.rho[i];
    }
    RelativeEnergyParts parts;
    parts.kinetic = integrate(kin);
    parts.internal = integrate(h_relative_field(s.rho, ref.rho, law));
    parts.electrostatic = 0.5 * integrate(field_of(s.rho - ref.rho).squared_norm());
    return parts;
}

double relative_energy(const FluidState& s, const FluidState& ref, const GasLaw& law, double eps_vac) {
    return relative_energy_parts(s, ref, law, eps_vac).total();
}

double relative_potential_energy_kernel(const GridFunction& rho, const GridFunction& rho_bar,
                                        const GasLaw& law) {
    const GridFunction diff = rho - rho_bar;
    return integrate(h_relative_field(rho, rho_bar, law)) + 0.5 * inner_product(diff, potential_of(diff));
}

DerivativeFields functional_derivative_fields(const FluidState& ref, const GasLaw& law, double eps_vac) {
    check_reference(ref.rho);
    DerivativeFields out{GridFunction(ref.spec()), velocity(ref, eps_vac)};
    const GridFunction phi = electric_potential(ref.rho);
    const GridFunction u2 = out.vector.squared_norm();
    for (std::size_t i = 0; i < ref.rho.size(); ++i)
        out.scalar[i] = -0.5 * u2[i] + h_prime(std::max(ref.rho[i], 0.0), law) + phi[i];
    return out;
}

VectorGridFunction stress_tensor_divergence(const GridFunction& rho) {
    const VectorGridFunction e = electric_field(rho);
    const GridFunction half_e2 = 0.5 * e.squared_norm();
    const int d = rho.spec().d;
    VectorGridFunction out(rho.spec());
    for (int i = 0; i < d; ++i) {
        GridFunction acc = -1.0 * partial(half_e2, i);
        for (int j = 0; j < d; ++j) acc += partial(hadamard(e[i], e[j]), j);
        out[i] = std::move(acc);
    }
    return out;
}

}  // namespace riesz_ep
