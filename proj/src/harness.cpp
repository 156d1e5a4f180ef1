#include "riesz_ep/harness.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "riesz_ep/riesz.hpp"

namespace riesz_ep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform draws from a fixed 64-bit engine; the mapping to [0, 1) is spelled out so the
/// corpus does not depend on the standard library's distributions.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::mt19937_64 engine_;
};

double bump(double s) {
    if (s >= 1.0) return 0.0;
    return std::exp(-s * s / (1.0 - s * s));
}

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double norm2(std::span<const double> x, std::span<const double> c) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - c[k]) * (x[k] - c[k]);
    return std::sqrt(r2);
}

using Profile = std::function<double(std::span<const double>)>;

Profile draw_profile(const std::string& kind, int d, Uniform& u) {
    auto centre = [&](double spread) {
        std::vector<double> c(static_cast<std::size_t>(d));
        for (auto& v : c) v = u(-spread, spread);
        return c;
    };
    if (kind == "radial") {
        auto c = centre(0.25);
        const double r = u(0.45, 0.7), a = u(0.5, 2.0);
        return [c, r, a](std::span<const double> x) { return a * bump(norm2(x, c) / r); };
    }
    if (kind == "anisotropic") {
        auto c = centre(0.25);
        std::vector<double> radii(static_cast<std::size_t>(d));
        for (auto& r : radii) r = u(0.35, 0.75);
        const double a = u(0.5, 2.0);
        return [c, radii, a](std::span<const double> x) {
            double s2 = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s2 += std::pow((x[k] - c[k]) / radii[k], 2);
            return a * bump(std::sqrt(s2));
        };
    }
    if (kind == "two-bump") {
        auto c1 = centre(0.3), c2 = centre(0.3);
        const double r1 = u(0.3, 0.5), r2 = u(0.3, 0.5), a1 = u(0.5, 2.0), a2 = u(0.5, 2.0);
        return [=](std::span<const double> x) { return a1 * bump(norm2(x, c1) / r1) + a2 * bump(norm2(x, c2) / r2); };
    }
    // indicator-like: flat top with a steep smooth edge
    auto c = centre(0.25);
    const double r = u(0.45, 0.7), a = u(0.5, 2.0);
    return [c, r, a](std::span<const double> x) { return a * bump(std::pow(norm2(x, c) / r, 3)); };
}

Profile dilate(const Profile& f, double lambda) {
    return [f, lambda](std::span<const double> x) {
        std::vector<double> y(x.begin(), x.end());
        for (auto& v : y) v *= lambda;
        return f(y);
    };
}

/// L^q norm of a potential of a compact non-negative source, adding the monopole tail
/// mass^q |x|^((alpha - d) q) outside the box.
double potential_norm(const GridFunction& pot, double q, double tail_coefficient, double decay) {
    double sum = std::pow(lp_norm(pot, q), q);
    sum += std::pow(tail_coefficient, q) *
           cube_exterior_power_integral(pot.spec().d, pot.spec().half_width, decay * q);
    return std::pow(sum, 1.0 / q);
}

double l1_of_product(const GridFunction& a, const GridFunction& b) {
    GridFunction p = hadamard(a, b);
    return lp_norm(p, 1.0);
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// Cumulative trapezoid of samples on the output times.
std::vector<double> cumulative(const std::vector<double>& t, const std::vector<double>& f) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t k = 1; k < t.size(); ++k) out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k - 1] + f[k]);
    return out;
}

}  // namespace

void InequalityReport::finalize() {
    pass = !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const CheckCase& c) { return c.pass; });
}

double cube_exterior_power_integral(int d, double half_width, double s) {
    if (!(s > d)) throw std::domain_error("exterior integral of |x|^-s needs s > d");
    // By symmetry: 2d faces, each contributing int_1^inf t^(d-1-s) dt * int_[-1,1]^(d-1) (1+|w|^2)^(-s/2) dw.
    std::function<double(int, double)> face = [&](int remaining, double acc) -> double {
        if (remaining == 0) return std::pow(1.0 + acc, -0.5 * s);
        return boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double w) { return face(remaining - 1, acc + w * w); }, -1.0, 1.0);
    };
    const double unit = 2.0 * d / (s - d) * face(d - 1, 0.0);
    return unit * std::pow(half_width, d - s);
}

std::vector<CorpusElement> hls_corpus(int d, int count, std::uint64_t seed) {
    static const char* kinds[] = {"radial", "anisotropic", "two-bump", "plateau"};
    Uniform u(seed);
    std::vector<CorpusElement> out;
    for (int k = 0; k < count; ++k) {
        const std::string kind = kinds[k % 4];
        Profile f = draw_profile(kind, d, u);
        Profile g = draw_profile(kind, d, u);
        out.push_back({kind, std::move(f), std::move(g)});
    }
    return out;
}

InequalityReport check_hls_family(int d, double alpha, double p, const HlsOptions& options) {
    double q;
    try {
        q = hls_exponents(d, alpha, p);
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("Riesz potential bound |I_alpha f|_q <= C |f|_p: ") + e.what());
    }
    const double beta = 0.5 * (d / p - alpha);
    const double r1 = 1.0 / (1.0 + alpha / d - 1.0 / p);           // pairing with one potential
    const double r2 = 1.0 / (1.0 + (alpha + beta) / d - 1.0 / p);  // pairing of two potentials
    const bool l2_pairing = alpha < 0.5 * d;
    const double p0 = 2.0 * d / (d + 2.0 * alpha);
    const double g0 = 2.0 * d / (d + alpha);

    InequalityReport rep;
    rep.name = "hls alpha=" + fmt(alpha) + " p=" + fmt(p);
    rep.seed = options.seed;
    rep.corpus = std::to_string(options.trials) + " seeded profiles (radial, anisotropic, two-bump, plateau) and their 2x dilates, n=" +
                 std::to_string(options.n) + ", L=" + fmt(options.half_width);
    rep.summary["alpha"] = alpha;
    rep.summary["p"] = p;
    rep.summary["q"] = q;
    rep.summary["beta"] = beta;
    if (!l2_pairing) rep.notes.push_back("L2 pairing of two potentials skipped: needs alpha < d/2");

    const GridSpec grid = GridSpec::make(d, options.n, options.half_width);
    const double decay_a = d - alpha, decay_b = d - beta;
    std::map<std::string, std::vector<double>> ratios[2];

    const auto corpus = hls_corpus(d, options.trials, options.seed);
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        for (int scale = 0; scale < 2; ++scale) {
            const double lambda = scale == 0 ? 1.0 : 2.0;
            const GridFunction f = GridFunction::sample(grid, dilate(corpus[k].f, lambda));
            const GridFunction g = GridFunction::sample(grid, dilate(corpus[k].g, lambda));
            const double mf = integrate(f), mg = integrate(g);
            const GridFunction if_a = riesz_apply_fast(f, alpha);
            const GridFunction ig_a = riesz_apply_fast(g, alpha);
            const GridFunction ig_b = riesz_apply_fast(g, beta);

            auto& r = ratios[scale];
            r["stein"].push_back(potential_norm(if_a, q, mf, decay_a) / lp_norm(f, p));
            r["pairing"].push_back(l1_of_product(if_a, g) / (lp_norm(f, p) * lp_norm(g, r1)));
            {
                double lhs = l1_of_product(if_a, ig_b);
                lhs += mf * mg * cube_exterior_power_integral(d, grid.half_width, decay_a + decay_b);
                r["two-potentials"].push_back(lhs / (lp_norm(f, p) * lp_norm(g, r2)));
            }
            if (l2_pairing) {
                double lhs = l1_of_product(if_a, ig_a);
                lhs += mf * mg * cube_exterior_power_integral(d, grid.half_width, 2.0 * decay_a);
                r["l2-pairing"].push_back(lhs / (lp_norm(g, p0) * lp_norm(f, p0)));
            }
            r["self-pairing"].push_back(l1_of_product(g, if_a) / (lp_norm(g, g0) * lp_norm(f, g0)));
        }
    }

    double worst = 0.0;
    for (const auto& [member, base] : ratios[0]) {
        const auto& dilated = ratios[1][member];
        double family_max = 0.0;
        for (std::size_t k = 0; k < base.size(); ++k) {
            const bool finite = std::isfinite(base[k]) && std::isfinite(dilated[k]) && base[k] > 0.0;
            rep.cases.push_back({member + "/ratio/" + std::to_string(k), base[k], 1.0, base[k], 0.0, finite});
            const double drift = std::abs(dilated[k] / base[k] - 1.0);
            rep.cases.push_back({member + "/dilate/" + std::to_string(k), dilated[k], base[k], drift,
                                 options.dilation_tolerance, finite && drift <= options.dilation_tolerance});
            worst = std::max(worst, drift);
            family_max = std::max({family_max, base[k], dilated[k]});
        }
        const double spread = family_max / median(dilated);
        rep.cases.push_back({member + "/spread", family_max, median(dilated), spread, options.spread_limit,
                             std::isfinite(spread) && spread <= options.spread_limit});
        rep.summary["max_ratio/" + member] = family_max;
        rep.empirical_constant = std::max(rep.empirical_constant, family_max);
    }
    rep.summary["max_dilation_drift"] = worst;
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------------------------

BilinearForms check_ibp_bilinear(const GridFunction& rho, const GridFunction& eta) {
    const GridSpec& s = rho.spec();
    BilinearForms out;
    const GridFunction phi = potential_of(rho);
    const GridFunction psi = potential_of(eta);
    out.rho_psi = inner_product(rho, psi);
    out.eta_phi = inner_product(eta, phi);
    const VectorGridFunction e_rho = field_of(rho), e_eta = field_of(eta);
    GridFunction dot(s);
    for (int k = 0; k < s.d; ++k) dot += hadamard(e_rho[k], e_eta[k]);
    const double c = newton_constant(s.d);
    const double coeff = (s.d - 2.0) / c;
    out.field_form = integrate(dot) + coeff * coeff * integrate(rho) * integrate(eta) *
                                          cube_exterior_power_integral(s.d, s.half_width, 2.0 * (s.d - 1));
    if (s.cell_count() <= kDirectOracleMaxCells) {
        const GridFunction psi_direct = riesz_apply_direct(eta, 2.0);
        out.double_sum = inner_product(rho, psi_direct) / c;
    }
    return out;
}

StressForms check_ibp_stress(const GridFunction& rho, const VectorGridFunction& u_bar) {
    const GridSpec& s = rho.spec();
    const int d = s.d;
    const VectorGridFunction e = field_of(rho);
    std::vector<VectorGridFunction> grads;
    for (int i = 0; i < d; ++i) grads.push_back(gradient(u_bar[i]));
    GridFunction lhs(s), rhs(s), scale(s);
    for (std::size_t c = 0; c < rho.size(); ++c) {
        double eu = 0.0, e2 = 0.0, u2 = 0.0, quad = 0.0, div = 0.0;
        for (int i = 0; i < d; ++i) {
            eu += e[i][c] * u_bar[i][c];
            e2 += e[i][c] * e[i][c];
            u2 += u_bar[i][c] * u_bar[i][c];
            div += grads[static_cast<std::size_t>(i)][i][c];
            for (int j = 0; j < d; ++j) quad += grads[static_cast<std::size_t>(i)][j][c] * e[i][c] * e[j][c];
        }
        lhs[c] = rho[c] * eu;
        rhs[c] = quad - 0.5 * div * e2;
        scale[c] = std::abs(rho[c]) * std::sqrt(e2 * u2);
    }
    return {integrate(lhs), integrate(rhs), integrate(scale)};
}

InequalityReport ibp_suite(const IbpOptions& options) {
    InequalityReport rep;
    rep.name = "ibp";
    rep.seed = options.seed;
    rep.corpus = std::to_string(options.corpus) + " seeded (rho, eta, u_bar) triples of smooth compact bumps";
    const int d = 3;
    Uniform u(options.seed);
    struct Triple {
        Profile rho, eta;
        std::vector<Profile> u_bar;
    };
    std::vector<Triple> corpus;
    for (int k = 0; k < options.corpus; ++k) {
        Triple t;
        t.rho = draw_profile("radial", d, u);
        t.eta = draw_profile(k % 2 ? "anisotropic" : "radial", d, u);
        std::vector<double> c(static_cast<std::size_t>(d));
        for (auto& v : c) v = u(-0.2, 0.2);
        const double r = u(0.9, 1.3);
        for (int i = 0; i < d; ++i) {
            const double a = u(-1.0, 1.0), w = u(-1.0, 1.0);
            const int j = (i + 1) % d;
            // translation plus a rotation-like shear component
            t.u_bar.push_back([=](std::span<const double> x) {
                return (a + w * x[static_cast<std::size_t>(j)]) * bump(norm2(x, c) / r);
            });
        }
        corpus.push_back(std::move(t));
    }

    std::vector<std::vector<double>> bilinear_dev(corpus.size()), stress_dev(corpus.size());
    for (int n : options.ladder) {
        const GridSpec grid = GridSpec::make(d, n, options.half_width);
        for (std::size_t k = 0; k < corpus.size(); ++k) {
            const GridFunction rho = GridFunction::sample(grid, corpus[k].rho);
            const GridFunction eta = GridFunction::sample(grid, corpus[k].eta);
            VectorGridFunction ub(grid);
            for (int i = 0; i < d; ++i) ub[i] = GridFunction::sample(grid, corpus[k].u_bar[static_cast<std::size_t>(i)]);
            const std::string tag = std::to_string(k) + "/n=" + std::to_string(n);

            const BilinearForms b = check_ibp_bilinear(rho, eta);
            const double sym = relative_gap(b.rho_psi, b.eta_phi);
            rep.cases.push_back({"bilinear/symmetry/" + tag, b.rho_psi, b.eta_phi, sym, options.symmetry_tolerance,
                                 sym <= options.symmetry_tolerance});
            const double dev = relative_gap(b.field_form, b.rho_psi);
            bilinear_dev[k].push_back(dev);

            const StressForms st = check_ibp_stress(rho, ub);
            const double sdev = std::abs(st.lhs - st.rhs) / st.scale;
            stress_dev[k].push_back(sdev);
            rep.cases.push_back({"stress/deviation/" + tag, st.lhs, st.rhs, sdev, options.stress_tolerance,
                                 n != options.ladder.back() || sdev <= options.stress_tolerance});
            rep.cases.push_back({"bilinear/field-form/" + tag, b.field_form, b.rho_psi, dev, options.bilinear_tolerance,
                                 n != options.ladder.back() || dev <= options.bilinear_tolerance});
        }
    }
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        for (std::size_t r = 1; r < options.ladder.size(); ++r) {
            const std::string tag = std::to_string(k) + "/n=" + std::to_string(options.ladder[r]);
            rep.cases.push_back({"bilinear/refinement/" + tag, bilinear_dev[k][r], bilinear_dev[k][r - 1],
                                 bilinear_dev[k][r - 1] / bilinear_dev[k][r], 0.0,
                                 bilinear_dev[k][r] < bilinear_dev[k][r - 1]});
            rep.cases.push_back({"stress/refinement/" + tag, stress_dev[k][r], stress_dev[k][r - 1],
                                 stress_dev[k][r - 1] / stress_dev[k][r], 0.0, stress_dev[k][r] < stress_dev[k][r - 1]});
        }
    }

    // double-sum form on the oracle-sized grid
    {
        const GridSpec grid = GridSpec::make(d, 16, options.half_width);
        for (std::size_t k = 0; k < corpus.size(); ++k) {
            const BilinearForms b = check_ibp_bilinear(GridFunction::sample(grid, corpus[k].rho),
                                                       GridFunction::sample(grid, corpus[k].eta));
            const double gap = relative_gap(*b.double_sum, b.rho_psi);
            rep.cases.push_back({"bilinear/double-sum/" + std::to_string(k), *b.double_sum, b.rho_psi, gap,
                                 options.symmetry_tolerance, gap <= options.symmetry_tolerance});
        }
    }

    // constant u_bar around a centred radial density: both sides vanish by symmetry
    {
        const GridSpec grid = GridSpec::make(d, options.ladder.back(), options.half_width);
        const GridFunction rho = GridFunction::sample(grid, [](std::span<const double> x) {
            return bump(norm2(x, std::vector<double>(x.size(), 0.0)) / 0.6);
        });
        const double cvec[3] = {1.0, 0.5, -0.25};
        VectorGridFunction ub(grid);
        for (int i = 0; i < d; ++i)
            ub[i] = GridFunction::sample(grid, [&](std::span<const double> x) {
                const double r = norm2(x, std::vector<double>(x.size(), 0.0));
                return cvec[i] * (1.0 - smooth_step((r - 0.8) / 0.8));
            });
        const StressForms st = check_ibp_stress(rho, ub);
        const double tol = 1e-6 * st.scale;
        rep.cases.push_back({"stress/constant-field", st.lhs, st.rhs, std::max(std::abs(st.lhs), std::abs(st.rhs)) / st.scale,
                             tol, std::abs(st.lhs) <= tol && std::abs(st.rhs) <= tol});
    }

    double worst_b = 0.0, worst_s = 0.0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        worst_b = std::max(worst_b, bilinear_dev[k].back());
        worst_s = std::max(worst_s, stress_dev[k].back());
    }
    rep.summary["bilinear_deviation_finest"] = worst_b;
    rep.summary["stress_deviation_finest"] = worst_s;
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------------------------

JIntegrands j_integrands(const FluidState& weak, const FluidState& ref, const GasLaw& law, double eps_vac) {
    if (!(weak.spec() == ref.spec())) throw std::invalid_argument("J integrands need states on one grid");
    const GridSpec& s = ref.spec();
    const int d = s.d;
    if (ref.rho.min() < -1e-12 * std::max(ref.rho.max(), 0.0))
        throw std::domain_error("reference density is negative; the strong-solution contract needs rho_bar >= 0");

    const VectorGridFunction u_bar = velocity(ref, eps_vac);
    std::vector<VectorGridFunction> grads;
    for (int i = 0; i < d; ++i) grads.push_back(gradient(u_bar[i]));
    const GridFunction diff = weak.rho - ref.rho;
    const VectorGridFunction e = field_of(diff);
    const GridFunction p_rel = p_relative_field(weak.rho, ref.rho, law);
    const GridFunction h_rel = h_relative_field(weak.rho, ref.rho, law);

    GridFunction kin(s), j1(s), j2p(s), j2h(s), j3d(s), j3s(s), e2(s);
    JIntegrands out;
    std::vector<double> a(static_cast<std::size_t>(d));
    for (std::size_t c = 0; c < s.cell_count(); ++c) {
        double div = 0.0, frob = 0.0, quad_e = 0.0, ee = 0.0, ue = 0.0;
        for (int i = 0; i < d; ++i) {
            div += grads[static_cast<std::size_t>(i)][i][c];
            ee += e[i][c] * e[i][c];
            ue += u_bar[i][c] * e[i][c];
            for (int j = 0; j < d; ++j) {
                const double g = grads[static_cast<std::size_t>(i)][j][c];
                frob += g * g;
                quad_e += g * e[i][c] * e[j][c];
            }
        }
        out.grad_norm = std::max(out.grad_norm, std::sqrt(frob));
        out.div_norm = std::max(out.div_norm, std::abs(div));
        const double rho = weak.rho[c];
        if (rho > eps_vac) {
            // rho (u - u_bar) = m - rho u_bar
            double w2 = 0.0, quad_w = 0.0;
            for (int i = 0; i < d; ++i) {
                a[static_cast<std::size_t>(i)] = weak.m[i][c] - rho * u_bar[i][c];
                w2 += a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    quad_w += grads[static_cast<std::size_t>(i)][j][c] * a[static_cast<std::size_t>(i)] *
                              a[static_cast<std::size_t>(j)];
            kin[c] = 0.5 * w2 / rho;
            j1[c] = -quad_w / rho;
        }
        j2p[c] = -div * p_rel[c];
        j2h[c] = -div * (law.gamma - 1.0) * h_rel[c];
        j3d[c] = diff[c] * ue;
        j3s[c] = quad_e - 0.5 * div * ee;
        e2[c] = 0.5 * ee;
    }
    out.psi.kinetic = integrate(kin);
    out.psi.internal = integrate(h_rel);
    out.psi.electrostatic = integrate(e2);
    out.j1 = integrate(j1);
    out.j2_pressure = integrate(j2p);
    out.j2_internal = integrate(j2h);
    out.j3_direct = integrate(j3d);
    out.j3_stress = integrate(j3s);
    return out;
}

RelativeEnergyReport relative_energy_inequality(const Trajectory& weak, const Trajectory& ref, double slack) {
    if (weak.times.size() != ref.times.size())
        throw std::invalid_argument("trajectories have different output cadences (" + std::to_string(weak.times.size()) +
                                    " vs " + std::to_string(ref.times.size()) + " outputs)");
    for (std::size_t k = 0; k < ref.times.size(); ++k)
        if (std::abs(weak.times[k] - ref.times[k]) > 1e-12 * std::max(1.0, ref.times.back()))
            throw std::invalid_argument("trajectories have different output times");
    if (weak.spec().d != ref.spec().d || weak.spec().n > ref.spec().n)
        throw std::invalid_argument("the weak trajectory must live on the reference grid or a coarser one");

    RelativeEnergyReport rep;
    rep.slack = slack;
    rep.times = ref.times;
    for (std::size_t k = 0; k < ref.times.size(); ++k) {
        const FluidState w = remap_conservative(weak.states[k], ref.spec());
        JIntegrands ji = j_integrands(w, ref.states[k], ref.law, ref.eps_vac);
        for (double v : {ji.psi.total(), ji.j1, ji.j2_pressure, ji.j2_internal, ji.j3_direct, ji.j3_stress})
            if (!std::isfinite(v))
                throw std::runtime_error("non-finite relative-energy integrand at t = " + fmt(ref.times[k]));
        rep.psi.push_back(ji.psi.total());
        rep.h_weak.push_back(weak.ledger[k].total);
        rep.h_ref.push_back(ref.ledger[k].total);
        rep.j2_agreement = std::max(rep.j2_agreement, relative_gap(ji.j2_pressure, ji.j2_internal));
        rep.integrands.push_back(ji);
    }
    auto column = [&](auto pick) {
        std::vector<double> v;
        for (const auto& ji : rep.integrands) v.push_back(pick(ji));
        return cumulative(rep.times, v);
    };
    rep.j1 = column([](const JIntegrands& j) { return j.j1; });
    rep.j2 = column([](const JIntegrands& j) { return j.j2_pressure; });
    rep.j3 = column([](const JIntegrands& j) { return j.j3_direct; });
    rep.j3_stress = column([](const JIntegrands& j) { return j.j3_stress; });
    rep.max_residual = -kInf;
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        rep.residual.push_back(rep.psi[k] - rep.psi[0] - (rep.j1[k] + rep.j2[k] + rep.j3[k]));
        rep.residual_stress.push_back(rep.psi[k] - rep.psi[0] - (rep.j1[k] + rep.j2[k] + rep.j3_stress[k]));
        rep.max_residual = std::max(rep.max_residual, rep.residual.back());
    }
    rep.pass = rep.max_residual <= slack;
    return rep;
}

GronwallReport gronwall_envelope(const std::vector<double>& times, const std::vector<double>& psi, double c_ap,
                                 double slack) {
    GronwallReport g;
    g.times = times;
    g.psi = psi;
    g.c_ap = c_ap;
    g.slack = slack;
    g.max_violation = -kInf;
    g.c_star = times.size() > 1 ? -kInf : 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double env = std::exp(c_ap * times[k]) * (psi[0] + slack);
        g.max_violation = std::max(g.max_violation, psi[k] - env);
        if (k > 0 && psi[0] > 0.0) g.c_star = std::max(g.c_star, std::log(psi[k] / psi[0]) / times[k]);
    }
    g.envelope_pass = g.max_violation <= 0.0;
    g.pass = g.envelope_pass && g.c_star <= g.c_ap;
    return g;
}

GronwallReport gronwall_check(const RelativeEnergyReport& re, const GasLaw& law) {
    if (re.psi.empty() || !(re.psi[0] > 0.0))
        throw std::invalid_argument("Gronwall check needs Psi(0) > 0; use the weak-strong check for identical data");
    double g_norm = 0.0, d_norm = 0.0;
    for (const auto& ji : re.integrands) {
        g_norm = std::max(g_norm, ji.grad_norm);
        d_norm = std::max(d_norm, ji.div_norm);
    }
    const double c_ap = 3.0 * (g_norm + d_norm * std::max(1.0, law.gamma - 1.0));
    // slack: measured residual of the inequality with J3 in the form the bound uses
    double slack = 0.0;
    for (double r : re.residual_stress) slack = std::max(slack, r);

    GronwallReport g = gronwall_envelope(re.times, re.psi, c_ap, slack);
    g.grad_norm = g_norm;
    g.div_norm = d_norm;

    const std::vector<double> int_psi = cumulative(re.times, re.psi);
    bool bounds = true;
    for (std::size_t k = 0; k < re.times.size(); ++k) {
        const double tol = 1e-12 * (std::abs(int_psi[k]) * c_ap + 1e-300);
        bounds = bounds && re.j1[k] <= 2.0 * g_norm * int_psi[k] + tol;
        bounds = bounds && re.j2[k] <= (law.gamma - 1.0) * d_norm * int_psi[k] + tol;
        bounds = bounds && re.j3_stress[k] <= (2.0 * g_norm + d_norm) * int_psi[k] + tol;
    }
    g.j_bounds_pass = bounds;

    // Discrete Gronwall by induction with the trapezoid weights.
    bool discrete = true;
    double env = re.psi[0] + slack;
    for (std::size_t k = 1; k < re.times.size(); ++k) {
        const double x = 0.5 * c_ap * (re.times[k] - re.times[k - 1]);
        if (x >= 1.0) {
            discrete = false;
            break;
        }
        env *= (1.0 + x) / (1.0 - x);
        discrete = discrete && re.psi[k] <= env * (1.0 + 1e-12);
    }
    g.implication_holds = discrete || !bounds;
    if (!g.implication_holds)
        throw std::logic_error("J bounds hold but the discrete Gronwall envelope fails; inconsistent ledger");
    g.pass = g.pass && bounds;
    return g;
}

DissipativityReport dissipativity_check(const std::vector<double>& times, const std::vector<double>& energy,
                                        double slack_fraction, const std::vector<double>& kappas) {
    if (times.size() < 2 || times.size() != energy.size()) throw std::invalid_argument("ledger too short");
    const double dt = times[1] - times[0];
    DissipativityReport rep;
    rep.h0 = energy[0];
    rep.slack = slack_fraction * std::abs(energy[0]);
    rep.worst_window = -kInf;
    rep.worst_pointwise = -kInf;
    for (double e : energy) rep.worst_pointwise = std::max(rep.worst_pointwise, e - rep.h0);
    for (double kappa : kappas) {
        const double m = kappa / dt;
        const long steps = std::lround(m);
        if (steps < 1 || std::abs(m - static_cast<double>(steps)) > 1e-6)
            throw std::invalid_argument("output cadence too coarse for kappa = " + fmt(kappa) + " (output interval " +
                                        fmt(dt) + "); use a denser cadence");
        for (std::size_t start = 0; start + static_cast<std::size_t>(steps) < times.size(); ++start) {
            double integral = 0.0;
            for (std::size_t k = start; k < start + static_cast<std::size_t>(steps); ++k)
                integral += 0.5 * (times[k + 1] - times[k]) * (energy[k] + energy[k + 1]);
            const double width = times[start + static_cast<std::size_t>(steps)] - times[start];
            rep.worst_window = std::max(rep.worst_window, integral / width - rep.h0);
            ++rep.windows;
        }
    }
    rep.pass = rep.worst_window <= rep.slack && rep.worst_pointwise <= rep.slack;
    return rep;
}

// ---------------------------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"hls", "ibp", "re-inequality", "gronwall", "weak-strong", "dissipativity"};
    return names;
}

namespace {

std::string config_key(const ScenarioConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << c.grid.d << '|' << c.grid.n << '|' << c.grid.half_width << '|' << c.law.gamma << '|' << c.T << '|' << c.cfl
       << '|' << c.initial.preset << '|' << c.initial.amplitude << '|' << c.initial.sigma << '|' << c.initial.floor
       << '|' << c.initial.support_radius << '|' << to_string(c.role) << '|' << to_string(c.perturbation) << '|'
       << c.delta << '|' << c.cadence;
    return os.str();
}

ScenarioConfig with(const ScenarioConfig& base, int n, int cadence, Role role, Perturbation p, double delta) {
    ScenarioConfig c = base;
    c.grid.n = n;
    c.cadence = cadence;
    c.role = role;
    c.perturbation = p;
    c.delta = delta;
    return c;
}

void require_completed(const Trajectory& t, const std::string& what) {
    if (!t.completed()) throw std::runtime_error(what + " run aborted: " + *t.abort_reason);
}

double finite_or_throw(double v, const std::string& what) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite " + what);
    return v;
}

void add_series(InequalityReport& rep, const std::string& key, const std::vector<double>& v) { rep.series[key] = v; }

}  // namespace

std::shared_ptr<const Trajectory> TrajectoryCache::reference(const ScenarioConfig& config) {
    ScenarioConfig c = config;
    c.role = Role::reference;
    c.perturbation = Perturbation::none;
    c.delta = 0.0;
    const std::string key = "ref:" + config_key(c);
    auto& slot = runs_[key];
    if (!slot) {
        slot = std::make_shared<const Trajectory>(make_reference(c));
        require_completed(*slot, "reference");
    }
    return slot;
}

std::shared_ptr<const Trajectory> TrajectoryCache::weak(const ScenarioConfig& config, const ScenarioConfig& ref_config) {
    auto ref = reference(ref_config);
    ScenarioConfig c = config;
    c.role = Role::weak;
    const std::string key = "weak:" + config_key(c) + "<-" + config_key(ref_config);
    auto& slot = runs_[key];
    if (!slot) {
        slot = std::make_shared<const Trajectory>(make_weak(c, *ref));
        require_completed(*slot, "weak");
    }
    return slot;
}

InequalityReport run_suite(const std::string& suite, const VerifyConfig& config, TrajectoryCache& cache) {
    const ScenarioConfig& base = config.scenario;
    InequalityReport rep;
    rep.name = suite;
    rep.seed = base.seed;

    if (suite == "hls") {
        HlsOptions opts = config.hls;
        opts.seed = base.seed;
        rep.corpus = "seeded Riesz corpus, see per-alpha summaries";
        for (double alpha : config.hls_alphas) {
            InequalityReport fam = check_hls_family(base.grid.d, alpha, config.hls_p, opts);
            const std::string prefix = "alpha=" + fmt(alpha) + "/";
            for (auto c : fam.cases) {
                c.name = prefix + c.name;
                rep.cases.push_back(c);
            }
            for (const auto& [k, v] : fam.summary) rep.summary[prefix + k] = v;
            for (const auto& note : fam.notes) rep.notes.push_back(prefix + note);
            rep.empirical_constant = std::max(rep.empirical_constant, fam.empirical_constant);
        }
        // exponent gates
        const struct {
            double alpha, p;
        } gates[] = {{2.0, 2.0}, {2.0, 1.5}, {1.0, 1.0}, {1.0, 3.0}};
        for (const auto& g : gates) {
            bool rejected = false;
            try {
                HlsOptions tiny = opts;
                tiny.trials = 0;
                check_hls_family(base.grid.d, g.alpha, g.p, tiny);
            } catch (const ConfigError&) {
                rejected = true;
            }
            rep.cases.push_back({"gate/alpha=" + fmt(g.alpha) + ",p=" + fmt(g.p), g.p, base.grid.d / g.alpha, 0.0, 0.0,
                                 rejected});
        }
    } else if (suite == "ibp") {
        IbpOptions opts = config.ibp;
        opts.seed = base.seed;
        rep = ibp_suite(opts);
        rep.name = suite;
    } else if (suite == "re-inequality") {
        std::vector<double> residuals;
        for (int n : config.re_ladder) {
            const ScenarioConfig rc = with(base, n, config.re_cadence, Role::reference, Perturbation::none, 0.0);
            const ScenarioConfig wc = with(base, n, config.re_cadence, Role::weak, config.re_perturbation, config.re_delta);
            auto ref = cache.reference(rc);
            auto weak = cache.weak(wc, rc);
            const double slack = config.re_slack * weak->ledger.front().total;
            const RelativeEnergyReport re = relative_energy_inequality(*weak, *ref, slack);
            const std::string tag = "n=" + std::to_string(n);
            double worst_abs = 0.0;
            for (double r : re.residual) worst_abs = std::max(worst_abs, std::abs(r));
            residuals.push_back(worst_abs);
            rep.cases.push_back({"inequality/" + tag, re.max_residual, slack, re.max_residual / slack, slack, re.pass});
            rep.cases.push_back({"j2-agreement/" + tag, re.j2_agreement, 1e-12, re.j2_agreement, 0.0,
                                 re.j2_agreement <= 1e-12});
            rep.summary["psi0/" + tag] = re.psi.front();
            rep.summary["max_abs_residual/" + tag] = worst_abs;
            rep.summary["slack/" + tag] = slack;
            if (n == config.re_ladder.back()) {
                add_series(rep, "t", re.times);
                add_series(rep, "psi", re.psi);
                add_series(rep, "J1", re.j1);
                add_series(rep, "J2", re.j2);
                add_series(rep, "J3", re.j3);
                add_series(rep, "J3_stress", re.j3_stress);
                add_series(rep, "residual", re.residual);
            }
        }
        for (std::size_t r = 1; r < residuals.size(); ++r) {
            const double ratio = residuals[r - 1] / residuals[r];
            rep.cases.push_back({"residual-refinement/n=" + std::to_string(config.re_ladder[r]), residuals[r],
                                 residuals[r - 1], ratio, config.re_residual_ratio, ratio >= config.re_residual_ratio});
        }
    } else if (suite == "gronwall") {
        const ScenarioConfig rc =
            with(base, config.gronwall_n, config.re_cadence, Role::reference, Perturbation::none, 0.0);
        const ScenarioConfig wc = with(base, config.gronwall_n, config.re_cadence, Role::weak,
                                       config.gronwall_perturbation, config.gronwall_delta);
        auto ref = cache.reference(rc);
        auto weak = cache.weak(wc, rc);
        const double slack = config.re_slack * weak->ledger.front().total;
        const RelativeEnergyReport re = relative_energy_inequality(*weak, *ref, slack);
        const GronwallReport g = gronwall_check(re, base.law);
        std::vector<double> env;
        for (std::size_t k = 0; k < g.times.size(); ++k) {
            const double e = std::exp(g.c_ap * g.times[k]) * (g.psi[0] + g.slack);
            env.push_back(e);
            rep.cases.push_back({"envelope/t=" + fmt(g.times[k]), g.psi[k], e, g.psi[k] / e, g.slack, g.psi[k] <= e});
        }
        rep.cases.push_back({"j-bounds", g.j_bounds_pass ? 1.0 : 0.0, 1.0, 0.0, 0.0, g.j_bounds_pass});
        rep.cases.push_back({"c-star", g.c_star, g.c_ap, g.c_ap > 0 ? g.c_star / g.c_ap : 0.0, 0.0, g.c_star <= g.c_ap});
        rep.cases.push_back({"relative-energy-inequality", re.max_residual, slack, 0.0, slack, re.pass});
        rep.cases.push_back({"implication", g.implication_holds ? 1.0 : 0.0, 1.0, 0.0, 0.0, g.implication_holds});
        rep.summary["C_ap"] = g.c_ap;
        rep.summary["C_star"] = g.c_star;
        rep.summary["grad_u_bar_inf"] = g.grad_norm;
        rep.summary["div_u_bar_inf"] = g.div_norm;
        rep.summary["slack"] = g.slack;
        rep.summary["psi0"] = g.psi[0];
        rep.summary["max_violation"] = g.max_violation;
        add_series(rep, "t", g.times);
        add_series(rep, "psi", g.psi);
        add_series(rep, "envelope", env);
        add_series(rep, "H", re.h_weak);
        add_series(rep, "Hbar", re.h_ref);
    } else if (suite == "weak-strong") {
        const ScenarioConfig rc =
            with(base, config.ws_reference_n, base.cadence, Role::reference, Perturbation::none, 0.0);
        auto ref = cache.reference(rc);
        const double h0 = ref->ledger.front().total;
        std::vector<double> maxima;
        for (int n : config.ws_ladder) {
            const ScenarioConfig wc = with(base, n, base.cadence, Role::weak, Perturbation::none, 0.0);
            auto weak = cache.weak(wc, rc);
            double worst = 0.0, early = 0.0;
            for (std::size_t k = 0; k < ref->times.size(); ++k) {
                const FluidState w = remap_conservative(weak->states[k], ref->spec());
                const double psi =
                finite_or_throw(relative_energy(w, ref->states[k], ref->law, ref->eps_vac), "relative energy");
                worst = std::max(worst, psi);
                if (ref->times[k] <= 0.1 * base.T * (1.0 + 1e-12)) early = std::max(early, psi);
            }
            maxima.push_back(worst);
            rep.summary["max_psi/n=" + std::to_string(n)] = worst;
            rep.cases.push_back({"window/n=" + std::to_string(n), early, worst, 0.0, 0.0, early <= worst});
        }
        for (std::size_t r = 1; r < maxima.size(); ++r) {
            const double ratio = maxima[r - 1] / maxima[r];
            rep.cases.push_back({"ladder/n=" + std::to_string(config.ws_ladder[r - 1]) + "->" +
                                     std::to_string(config.ws_ladder[r]),
                                 maxima[r], maxima[r - 1], ratio, config.ws_ratio,
                                 maxima[r] < maxima[r - 1] && ratio >= config.ws_ratio});
        }
        {
            const ScenarioConfig wc =
                with(base, config.ws_reference_n, base.cadence, Role::weak, Perturbation::none, 0.0);
            auto same = cache.weak(wc, rc);
            double worst = 0.0;
            bool identical = true;
            for (std::size_t k = 0; k < ref->times.size(); ++k) {
                worst = std::max(worst, finite_or_throw(relative_energy(same->states[k], ref->states[k], ref->law,
                                                                        ref->eps_vac),
                                                        "relative energy"));
                identical = identical && same->states[k] == ref->states[k];
            }
            const double tol = config.ws_same_grid_tolerance * h0;
            rep.cases.push_back({"same-grid", worst, tol, 0.0, 0.0, worst <= tol});
            rep.cases.push_back({"same-grid/bitwise", identical ? 1.0 : 0.0, 1.0, 0.0, 0.0, identical});
        }
        rep.summary["H0"] = h0;
    } else if (suite == "dissipativity") {
        const ScenarioConfig rc =
            with(base, config.dissipativity_n, base.cadence, Role::reference, Perturbation::none, 0.0);
        auto ref = cache.reference(rc);
        std::vector<double> t, h;
        for (const auto& row : ref->ledger) {
            t.push_back(row.t);
            h.push_back(row.total);
        }
        const double m0 = ref->ledger.front().mass;
        double mass_drift = 0.0;
        for (std::size_t k = 0; k < ref->ledger.size(); ++k)
            mass_drift = std::max(mass_drift, std::abs(ref->ledger[k].mass - ref->clipped_history[k] - m0) / m0);
        rep.cases.push_back({"reference/mass-drift", mass_drift, config.mass_tolerance, mass_drift, 0.0,
                             mass_drift <= config.mass_tolerance});
        const double drift = std::abs(h.back() - h.front()) / h.front();
        rep.cases.push_back({"reference/energy-drift", drift, config.energy_drift_tolerance, drift, 0.0,
                             drift <= config.energy_drift_tolerance});
        const DissipativityReport dr = dissipativity_check(t, h, config.dissipativity_slack, config.dissipativity_kappas);
        rep.cases.push_back({"reference/theta-windows", dr.worst_window, dr.slack, 0.0, dr.slack,
                             dr.worst_window <= dr.slack});
        rep.cases.push_back({"reference/pointwise", dr.worst_pointwise, dr.slack, 0.0, dr.slack,
                             dr.worst_pointwise <= dr.slack});
        rep.summary["reference/H0"] = h.front();
        rep.summary["reference/energy_drift"] = drift;
        rep.summary["reference/clipped_mass"] = ref->clipped_mass;

        // dense-cadence weak run
        const ScenarioConfig wrc =
            with(base, config.gronwall_n, config.re_cadence, Role::reference, Perturbation::none, 0.0);
        const ScenarioConfig wc = with(base, config.gronwall_n, config.re_cadence, Role::weak,
                                       config.gronwall_perturbation, config.gronwall_delta);
        auto weak = cache.weak(wc, wrc);
        t.clear();
        h.clear();
        for (const auto& row : weak->ledger) {
            t.push_back(row.t);
            h.push_back(row.total);
        }
        const DissipativityReport dw = dissipativity_check(t, h, config.dissipativity_slack, config.dissipativity_kappas);
        rep.cases.push_back({"weak/theta-windows", dw.worst_window, dw.slack, 0.0, dw.slack, dw.worst_window <= dw.slack});
        rep.cases.push_back({"weak/pointwise", dw.worst_pointwise, dw.slack, 0.0, dw.slack, dw.worst_pointwise <= dw.slack});
        rep.summary["weak/windows"] = dw.windows;
    } else {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    rep.seed = base.seed;
    rep.finalize();
    return rep;
}

}  // namespace riesz_ep
