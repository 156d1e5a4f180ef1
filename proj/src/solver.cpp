#include "riesz_ep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "riesz_ep/parallel.hpp"
#include "riesz_ep/riesz.hpp"

namespace riesz_ep {

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

double mc_slope(double left, double right) {
    if (left * right <= 0.0) return 0.0;
    const double c = 0.5 * (left + right);
    const double lim = 2.0 * std::min(std::abs(left), std::abs(right));
    return std::copysign(std::min(std::abs(c), lim), c);
}

double cutoff(double r, double R) {
    if (r >= R) return 0.0;
    return std::exp(-r * r / (R * R - r * r));
}

/// Flux of one axis sweep into drho, dm; lines of cells along `axis` are independent.
void sweep_axis(const FluidState& s, const GasLaw& law, double eps_vac, int axis, Rhs& out) {
    const GridSpec& g = s.spec();
    const int d = g.d;
    const std::size_t n = static_cast<std::size_t>(g.n);
    const std::size_t stride = g.stride(axis);
    const std::size_t block = n * stride;
    const std::size_t lines = g.cell_count() / n;
    const double inv_h = 1.0 / g.spacing();
    const std::size_t width = n + 4;  // two vacuum ghosts per side
    const std::size_t nv = static_cast<std::size_t>(d) + 1;  // primitives: rho, u_0..u_{d-1}

    parallel_for(lines, [&](std::size_t begin, std::size_t end) {
        std::vector<double> w(nv * width), slope(nv * width), flux(nv * (n + 1));
        std::vector<double> left(nv), right(nv), fl(nv), fr(nv);
        for (std::size_t line = begin; line < end; ++line) {
            const std::size_t base = (line / stride) * block + line % stride;
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t c = base + j * stride;
                const double rho = std::max(s.rho[c], 0.0);
                w[j + 2] = rho;
                if (rho > eps_vac)
                    for (int k = 0; k < d; ++k) w[(k + 1) * width + j + 2] = s.m[k][c] / rho;
            }
            for (std::size_t v = 0; v < nv; ++v) {
                const double* row = &w[v * width];
                double* srow = &slope[v * width];
                srow[0] = srow[width - 1] = 0.0;
                for (std::size_t j = 1; j + 1 < width; ++j)
                    srow[j] = minmod(row[j] - row[j - 1], row[j + 1] - row[j]);
            }
            // interface between padded cells q and q+1, q = 1 .. n+1
            for (std::size_t f = 0; f <= n; ++f) {
                const std::size_t q = f + 1;
                for (std::size_t v = 0; v < nv; ++v) {
                    left[v] = w[v * width + q] + 0.5 * slope[v * width + q];
                    right[v] = w[v * width + q + 1] - 0.5 * slope[v * width + q + 1];
                }
                left[0] = std::max(left[0], 0.0);
                right[0] = std::max(right[0], 0.0);
                const double pl = pressure(left[0], law), pr = pressure(right[0], law);
                const double ul = left[static_cast<std::size_t>(axis) + 1];
                const double ur = right[static_cast<std::size_t>(axis) + 1];
                const double a = std::max(std::abs(ul) + sound_speed(left[0], law),
                                          std::abs(ur) + sound_speed(right[0], law));
                fl[0] = left[0] * ul;
                fr[0] = right[0] * ur;
                for (int k = 0; k < d; ++k) {
                    const std::size_t v = static_cast<std::size_t>(k) + 1;
                    fl[v] = left[0] * left[v] * ul + (k == axis ? pl : 0.0);
                    fr[v] = right[0] * right[v] * ur + (k == axis ? pr : 0.0);
                }
                flux[f] = 0.5 * (fl[0] + fr[0]) - 0.5 * a * (right[0] - left[0]);
                for (std::size_t v = 1; v < nv; ++v)
                    flux[v * (n + 1) + f] =
                        0.5 * (fl[v] + fr[v]) - 0.5 * a * (right[0] * right[v] - left[0] * left[v]);
            }
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t c = base + j * stride;
                out.drho[c] -= (flux[j + 1] - flux[j]) * inv_h;
                for (int k = 0; k < d; ++k) {
                    const std::size_t off = (static_cast<std::size_t>(k) + 1) * (n + 1);
                    out.dm[k][c] -= (flux[off + j + 1] - flux[off + j]) * inv_h;
                }
            }
        }
    });
}

double clip_negative(FluidState& s) {
    double added = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] < 0.0) {
            added -= s.rho[i];
            s.rho[i] = 0.0;
            for (int k = 0; k < s.m.dim(); ++k) s.m[k][i] = 0.0;
        }
    }
    return added * s.spec().cell_volume();
}

/// u + dt * L(u) combined as a * base + b * (u + dt L(u)).
FluidState combine(const FluidState& base, double a, const FluidState& u, const Rhs& l, double dt, double b) {
    FluidState out = u;
    for (std::size_t i = 0; i < out.rho.size(); ++i) {
        out.rho[i] = a * base.rho[i] + b * (u.rho[i] + dt * l.drho[i]);
        for (int k = 0; k < out.m.dim(); ++k)
            out.m[k][i] = a * base.m[k][i] + b * (u.m[k][i] + dt * l.dm[k][i]);
    }
    return out;
}

bool finite_state(const FluidState& s) {
    if (!s.rho.all_finite()) return false;
    for (const auto& c : s.m.components)
        if (!c.all_finite()) return false;
    return true;
}

/// First cell with significant density inside the boundary margin, if any.
std::optional<std::string> support_violation(const FluidState& s, double threshold) {
    const GridSpec& g = s.spec();
    const double limit = g.half_width - g.half_width / 8.0;
    std::vector<double> x(static_cast<std::size_t>(g.d));
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        if (s.rho[i] <= threshold) continue;
        g.cell_center(i, x);
        for (double xk : x) {
            if (std::abs(xk) > limit) {
                std::ostringstream os;
                os << "support reached the boundary margin L/8 (density " << s.rho[i] << " at |x_k| = "
                   << std::abs(xk) << " > " << limit << ")";
                return os.str();
            }
        }
    }
    return std::nullopt;
}

// --- conservative remap ----------------------------------------------------

struct Block {
    std::vector<int> dims;
    std::vector<double> data;
};

Block remap_axis(const Block& in, int axis, int target_n, double L) {
    const int src_n = in.dims[static_cast<std::size_t>(axis)];
    Block out{in.dims, {}};
    out.dims[static_cast<std::size_t>(axis)] = target_n;
    std::size_t inner = 1, outer = 1;
    for (std::size_t k = static_cast<std::size_t>(axis) + 1; k < in.dims.size(); ++k) inner *= in.dims[k];
    for (std::size_t k = 0; k < static_cast<std::size_t>(axis); ++k) outer *= in.dims[k];
    out.data.assign(outer * inner * static_cast<std::size_t>(target_n), 0.0);

    const double hs = 2.0 * L / src_n, ht = 2.0 * L / target_n;
    struct Piece {
        int src;
        double w0;  // overlap / ht
        double w1;  // overlap * (overlap midpoint - source centre) / ht
    };
    std::vector<std::vector<Piece>> pieces(static_cast<std::size_t>(target_n));
    for (int t = 0; t < target_n; ++t) {
        const double a = -L + t * ht, b = a + ht;
        const int first = std::max(0, static_cast<int>(std::floor((a + L) / hs)) - 1);
        const int last = std::min(src_n - 1, static_cast<int>(std::floor((b + L) / hs)) + 1);
        for (int j = first; j <= last; ++j) {
            const double sa = -L + j * hs, sb = sa + hs;
            const double lo = std::max(a, sa), hi = std::min(b, sb);
            if (hi <= lo) continue;
            const double len = hi - lo, mid = 0.5 * (lo + hi), centre = 0.5 * (sa + sb);
            pieces[static_cast<std::size_t>(t)].push_back({j, len / ht, len * (mid - centre) / ht});
        }
    }
    std::vector<double> line(static_cast<std::size_t>(src_n)), slope(static_cast<std::size_t>(src_n));
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in_i = 0; in_i < inner; ++in_i) {
            for (int j = 0; j < src_n; ++j)
                line[static_cast<std::size_t>(j)] =
                    in.data[(o * static_cast<std::size_t>(src_n) + static_cast<std::size_t>(j)) * inner + in_i];
            for (int j = 0; j < src_n; ++j) {
                const double l = j > 0 ? line[static_cast<std::size_t>(j - 1)] : 0.0;
                const double r = j + 1 < src_n ? line[static_cast<std::size_t>(j + 1)] : 0.0;
                const double c = line[static_cast<std::size_t>(j)];
                slope[static_cast<std::size_t>(j)] = mc_slope(c - l, r - c) / hs;
            }
            for (int t = 0; t < target_n; ++t) {
                double acc = 0.0;
                for (const Piece& p : pieces[static_cast<std::size_t>(t)])
                    acc += p.w0 * line[static_cast<std::size_t>(p.src)] + p.w1 * slope[static_cast<std::size_t>(p.src)];
                out.data[(o * static_cast<std::size_t>(target_n) + static_cast<std::size_t>(t)) * inner + in_i] = acc;
            }
        }
    }
    return out;
}

}  // namespace

std::string to_string(Role r) { return r == Role::reference ? "reference" : "weak"; }

std::string to_string(Perturbation p) {
    switch (p) {
        case Perturbation::none: return "none";
        case Perturbation::bump: return "bump";
        case Perturbation::shear: return "shear";
        case Perturbation::coarsen: return "coarsen";
    }
    return "none";
}

Role parse_role(const std::string& s) {
    if (s == "reference") return Role::reference;
    if (s == "weak") return Role::weak;
    throw ConfigError("role must be 'reference' or 'weak', got '" + s + "'");
}

Perturbation parse_perturbation(const std::string& s) {
    if (s == "none") return Perturbation::none;
    if (s == "bump") return Perturbation::bump;
    if (s == "shear") return Perturbation::shear;
    if (s == "coarsen") return Perturbation::coarsen;
    throw ConfigError("perturbation must be one of none|bump|shear|coarsen, got '" + s + "'");
}

double ScenarioConfig::support_radius() const {
    return initial.support_radius > 0.0 ? initial.support_radius : 0.5 * grid.half_width;
}

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> warnings;
    if (grid.d < 3) throw ConfigError("d must be >= 3: the potential representation needs c(d) > 0");
    if (grid.n < 4) throw ConfigError("n must be >= 4");
    if (!(grid.half_width > 0.0)) throw ConfigError("L must be positive");
    if (!(law.gamma > 1.0)) throw ConfigError("gamma must exceed 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive and finite (finite time horizon)");
    if (!(cfl > 0.0 && cfl <= 0.9)) throw ConfigError("cfl must lie in ]0, 0.9]");
    if (cadence < 1) throw ConfigError("cadence must be >= 1 output interval");
    if (initial.preset != "gaussian") throw ConfigError("unknown preset '" + initial.preset + "' (available: gaussian)");
    if (!(initial.amplitude >= 0.0) || !(initial.floor >= 0.0) || !(initial.sigma > 0.0))
        throw ConfigError("preset needs amplitude >= 0, floor >= 0, sigma > 0");
    if (support_radius() > 0.5 * grid.half_width + 1e-12)
        throw ConfigError("initial support radius " + std::to_string(support_radius()) +
                          " exceeds L/2 (support-margin rule: data must sit inside half the box)");
    const double floor_gamma = GasLaw::weak_solution_gamma_floor(grid.d);
    if (law.gamma < floor_gamma) {
        const std::string msg = "gamma = " + std::to_string(law.gamma) + " is below 2d/(d+1) = " +
                                std::to_string(floor_gamma) +
                                " required for finite-energy weak solutions";
        if (role == Role::weak) throw ConfigError(msg);
        warnings.push_back(msg);
    }
    if (role == Role::reference && !(initial.floor > 0.0))
        throw ConfigError("reference runs need floor > 0 (strong solutions have positive density)");
    if (role == Role::weak && perturbation != Perturbation::none && perturbation != Perturbation::coarsen &&
        !(std::abs(delta) < 1.0))
        throw ConfigError("perturbation amplitude delta must satisfy |delta| < 1");
    if (perturbation == Perturbation::coarsen && grid.n % 2 != 0)
        throw ConfigError("coarsen perturbation needs an even n");
    return warnings;
}

// ---------------------------------------------------------------------------

Rhs rhs(const FluidState& s, const GasLaw& law, double eps_vac) {
    Rhs out{GridFunction(s.spec()), VectorGridFunction(s.spec())};
    for (int axis = 0; axis < s.spec().d; ++axis) sweep_axis(s, law, eps_vac, axis, out);
    GridFunction rho = s.rho;
    for (auto& v : rho.values()) v = std::max(v, 0.0);
    const VectorGridFunction field = field_of(rho);
    for (int k = 0; k < s.spec().d; ++k)
        for (std::size_t i = 0; i < rho.size(); ++i) out.dm[k][i] -= rho[i] * field[k][i];
    return out;
}

double stable_dt(const FluidState& s, const GasLaw& law, double cfl, double eps_vac) {
    double speed = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        const double rho = s.rho[i];
        if (rho <= eps_vac) continue;
        double umax = 0.0;
        for (int k = 0; k < s.m.dim(); ++k) umax = std::max(umax, std::abs(s.m[k][i] / rho));
        speed = std::max(speed, umax + sound_speed(rho, law));
    }
    if (speed == 0.0) return std::numeric_limits<double>::infinity();
    return cfl * s.spec().spacing() / speed;
}

StepResult step(const FluidState& s, double dt, const GasLaw& law, double eps_vac) {
    StepResult r;
    FluidState u1 = combine(s, 0.0, s, rhs(s, law, eps_vac), dt, 1.0);
    r.clipped_mass += clip_negative(u1);
    FluidState u2 = combine(s, 0.75, u1, rhs(u1, law, eps_vac), dt, 0.25);
    r.clipped_mass += clip_negative(u2);
    r.state = combine(s, 1.0 / 3.0, u2, rhs(u2, law, eps_vac), dt, 2.0 / 3.0);
    r.clipped_mass += clip_negative(r.state);
    return r;
}

// ---------------------------------------------------------------------------

FluidState preset_state(const ScenarioConfig& config) {
    const GridSpec& g = config.grid;
    const InitialData& p = config.initial;
    const double R = config.support_radius();
    const GridFunction rho = GridFunction::sample(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double xk : x) r2 += xk * xk;
        const double r = std::sqrt(r2);
        return (p.amplitude * std::exp(-r2 / (p.sigma * p.sigma)) + p.floor) * cutoff(r, R);
    });
    return FluidState(rho, VectorGridFunction(g));
}

FluidState perturb(const FluidState& base, const ScenarioConfig& config) {
    const GridSpec& g = base.spec();
    const double R = config.support_radius();
    switch (config.perturbation) {
        case Perturbation::none: return base;
        case Perturbation::bump: {
            // localized density bump off-centre, velocity unchanged
            const double w = 0.25 * R;
            const GridFunction bump = GridFunction::sample(g, [&](std::span<const double> x) {
                double r2 = (x[0] - 0.25 * R) * (x[0] - 0.25 * R);
                for (std::size_t k = 1; k < x.size(); ++k) r2 += x[k] * x[k];
                return std::exp(-r2 / (w * w));
            });
            FluidState out = base;
            for (std::size_t i = 0; i < out.rho.size(); ++i) {
                const double f = 1.0 + config.delta * bump[i];
                out.rho[i] *= f;
                for (int k = 0; k < g.d; ++k) out.m[k][i] *= f;
            }
            return out;
        }
        case Perturbation::shear: {
            // u_0 += delta (x_1 / w) exp(-|x|^2 / w^2)
            const double w = 0.5 * R;
            const GridFunction shear = GridFunction::sample(g, [&](std::span<const double> x) {
                double r2 = 0.0;
                for (double xk : x) r2 += xk * xk;
                return x[1] / w * std::exp(-r2 / (w * w));
            });
            FluidState out = base;
            for (std::size_t i = 0; i < out.rho.size(); ++i) out.m[0][i] += config.delta * out.rho[i] * shear[i];
            return out;
        }
        case Perturbation::coarsen: {
            const GridSpec coarse{g.d, g.n / 2, g.half_width};
            return remap_conservative(remap_conservative(base, coarse), g);
        }
    }
    return base;
}

FluidState initial_state(const ScenarioConfig& config) {
    FluidState s = preset_state(config);
    if (config.role == Role::weak) s = perturb(s, config);
    return s;
}

Trajectory run_from(const ScenarioConfig& config, const FluidState& initial) {
    if (!(initial.spec() == config.grid)) throw std::invalid_argument("initial state is not on the configured grid");
    Trajectory traj;
    traj.law = config.law;
    traj.role = config.role;
    traj.eps_vac = vacuum_threshold(initial.rho);
    const double support_threshold = 1e-8 * std::max(initial.rho.max(), 0.0);

    FluidState state = initial;
    double t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    traj.clipped_history.push_back(0.0);
    traj.ledger.push_back(energy_ledger(state, 0.0, config.law, traj.eps_vac));

    for (int k = 1; k <= config.cadence; ++k) {
        const double t_out = config.T * k / config.cadence;
        while (t < t_out) {
            double dt = std::min(stable_dt(state, config.law, config.cfl, traj.eps_vac), t_out - t);
            const bool last = t + dt >= t_out * (1.0 - 1e-14);
            if (last) dt = t_out - t;
            StepResult r = step(state, dt, config.law, traj.eps_vac);
            if (!finite_state(r.state)) {
                traj.abort_reason = "non-finite values after step at t = " + std::to_string(t + dt);
                traj.abort_state = std::move(r.state);
                return traj;
            }
            state = std::move(r.state);
            traj.clipped_mass += r.clipped_mass;
            traj.dts.push_back(dt);
            t = last ? t_out : t + dt;
            if (auto v = support_violation(state, support_threshold)) {
                traj.abort_reason = *v + " at t = " + std::to_string(t);
                traj.abort_state = state;
                return traj;
            }
        }
        traj.times.push_back(t_out);
        traj.states.push_back(state);
        traj.clipped_history.push_back(traj.clipped_mass);
        traj.ledger.push_back(energy_ledger(state, t_out, config.law, traj.eps_vac));
    }
    return traj;
}

Trajectory run(const ScenarioConfig& config) {
    config.validate();
    return run_from(config, initial_state(config));
}

Trajectory make_reference(const ScenarioConfig& config) {
    ScenarioConfig c = config;
    c.role = Role::reference;
    c.validate();
    const FluidState initial = preset_state(c);
    Trajectory traj = run_from(c, initial);
    if (!traj.completed()) return traj;
    // positivity on the initial support: the strong-solution contract
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const GridFunction& rho = traj.states[k].rho;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (initial.rho[i] > 0.0 && !(rho[i] > 0.0)) {
                traj.abort_reason = "reference density lost positivity at t = " + std::to_string(traj.times[k]) +
                                    " (strong-solution contract)";
                return traj;
            }
        }
    }
    return traj;
}

Trajectory make_weak(const ScenarioConfig& config, const Trajectory& ref) {
    ScenarioConfig c = config;
    c.role = Role::weak;
    c.validate();
    if (ref.states.empty()) throw std::invalid_argument("reference trajectory is empty");
    FluidState base = ref.states.front();
    if (!(base.spec() == c.grid)) base = remap_conservative(base, c.grid);
    return run_from(c, perturb(base, c));
}

GridFunction remap_conservative(const GridFunction& f, const GridSpec& target) {
    const GridSpec& src = f.spec();
    if (src == target) return f;
    if (src.d != target.d || src.half_width != target.half_width)
        throw std::invalid_argument("remap needs grids on the same box");
    Block b{std::vector<int>(static_cast<std::size_t>(src.d), src.n), {f.values().begin(), f.values().end()}};
    for (int axis = 0; axis < src.d; ++axis) b = remap_axis(b, axis, target.n, src.half_width);
    return GridFunction(target, std::move(b.data));
}

FluidState remap_conservative(const FluidState& s, const GridSpec& target) {
    if (s.spec() == target) return s;
    GridFunction rho = remap_conservative(s.rho, target);
    VectorGridFunction m(target);
    for (int k = 0; k < s.m.dim(); ++k) m[k] = remap_conservative(s.m[k], target);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho[i] <= 0.0) {
            rho[i] = 0.0;
            for (int k = 0; k < m.dim(); ++k) m[k][i] = 0.0;
        }
    }
    return FluidState(std::move(rho), std::move(m));
}

}  // namespace riesz_ep
