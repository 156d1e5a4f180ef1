#include "riesz_ep/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "riesz_ep/riesz.hpp"

namespace riesz_ep {

namespace {

double eta(double s2) { return s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0; }

double offset_radius2(std::span<const int> offset, double h) {
    double r2 = 0.0;
    for (int o : offset) r2 += static_cast<double>(o) * o;
    return r2 * h * h;
}

/// Plain sum of eta over cell offsets inside the ball of radius delta.
double eta_sum(const GridSpec& spec, double delta) {
    const double h = spec.spacing();
    const int reach = static_cast<int>(std::ceil(delta / h));
    const int width = 2 * reach + 1;
    std::vector<int> offset(static_cast<std::size_t>(spec.d));
    std::size_t total = 1;
    for (int k = 0; k < spec.d; ++k) total *= static_cast<std::size_t>(width);
    std::vector<double> terms;
    terms.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rest = i;
        for (int k = 0; k < spec.d; ++k) {
            offset[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(width)) - reach;
            rest /= static_cast<std::size_t>(width);
        }
        terms.push_back(eta(offset_radius2(offset, h) / (delta * delta)));
    }
    return pairwise_sum(terms);
}

struct Errors {
    double l1, lg;
};

Errors errors(const GridFunction& a, const GridFunction& b, double gamma) {
    const GridFunction diff = a - b;
    return {lp_norm(diff, 1.0), lp_norm(diff, gamma)};
}

/// Truncation error of the tail sum of |f| and |f|^gamma, from precomputed pieces.
double combined(double l1_sum, double lg_sum, double cell, double gamma) {
    return l1_sum * cell + std::pow(lg_sum * cell, 1.0 / gamma);
}

GridFunction truncate_range(const GridFunction& f, double gamma, double budget, double& level) {
    const double top = std::max(std::abs(f.max()), std::abs(f.min()));
    const double cell = f.spec().cell_volume();
    auto error_at = [&](double m) {
        double a = 0.0, b = 0.0;
        for (double v : f.values()) {
            const double excess = std::max(std::abs(v) - m, 0.0);
            a += excess;
            b += std::pow(excess, gamma);
        }
        return combined(a, b, cell, gamma);
    };
    double lo = 0.0, hi = top;
    if (error_at(0.0) <= budget) hi = 0.0;
    for (int it = 0; it < 60 && hi - lo > 1e-14 * top; ++it) {
        const double mid = 0.5 * (lo + hi);
        (error_at(mid) <= budget ? hi : lo) = mid;
    }
    level = hi;
    GridFunction out = f;
    for (auto& v : out.values()) v = std::clamp(v, -level, level);
    return out;
}

GridFunction truncate_support(const GridFunction& f, double gamma, double budget, double& radius) {
    const GridSpec& s = f.spec();
    const double cell = s.cell_volume();
    std::vector<double> r(f.size());
    std::vector<double> x(static_cast<std::size_t>(s.d));
    for (std::size_t i = 0; i < f.size(); ++i) {
        s.cell_center(i, x);
        r[i] = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    }
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    // drop cells from the outside in while the accumulated error stays within budget
    double a = 0.0, b = 0.0;
    radius = r[order.front()] + s.spacing();
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t j = k;
        double a2 = a, b2 = b;
        while (j < order.size() && r[order[j]] == r[order[k]]) {
            a2 += std::abs(f[order[j]]);
            b2 += std::pow(std::abs(f[order[j]]), gamma);
            ++j;
        }
        if (combined(a2, b2, cell, gamma) > budget) break;
        a = a2;
        b = b2;
        radius = r[order[k]];
        k = j;
    }
    GridFunction out = f;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (r[i] >= radius) out[i] = 0.0;
    return out;
}

}  // namespace

MollifierSpec MollifierSpec::make(double delta, double truncation_radius, double epsilon) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mollification radius must satisfy 0 < delta < 1");
    if (!(truncation_radius > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("target epsilon must be positive");
    return MollifierSpec{delta, truncation_radius, epsilon};
}

double mollifier_mass(const GridSpec& spec, double delta) {
    const double h = spec.spacing();
    const int reach = static_cast<int>(std::ceil(delta / h));
    const int width = 2 * reach + 1;
    const double norm = eta_sum(spec, delta);
    std::vector<double> w;
    std::vector<int> offset(static_cast<std::size_t>(spec.d));
    std::size_t total = 1;
    for (int k = 0; k < spec.d; ++k) total *= static_cast<std::size_t>(width);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rest = i;
        for (int k = 0; k < spec.d; ++k) {
            offset[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(width)) - reach;
            rest /= static_cast<std::size_t>(width);
        }
        w.push_back(eta(offset_radius2(offset, h) / (delta * delta)) / (norm * spec.cell_volume()));
    }
    return pairwise_sum(w) * spec.cell_volume();
}

GridFunction mollify(const GridFunction& f, double delta) {
    MollifierSpec::make(delta, 1.0, 1.0);
    const GridSpec& s = f.spec();
    const double h = s.spacing();
    const double scale = 1.0 / (eta_sum(s, delta) * s.cell_volume());
    GridFunction phi = convolve_free_space(f, [&](std::span<const int> offset) {
        return eta(offset_radius2(offset, h) / (delta * delta)) * scale;
    });
    // cells farther than delta from supp(f) get exact zeros instead of transform rounding
    GridFunction support(s);
    for (std::size_t i = 0; i < f.size(); ++i) support[i] = f[i] != 0.0 ? 1.0 : 0.0;
    const double count_scale = 1.0 / s.cell_volume();
    const GridFunction reach = convolve_free_space(support, [&](std::span<const int> offset) {
        return offset_radius2(offset, h) < delta * delta ? count_scale : 0.0;
    });
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (reach[i] < 0.5) phi[i] = 0.0;
    return phi;
}

MollifyResult mollify_ladder(const GridFunction& f, double gamma, double epsilon) {
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!f.all_finite()) throw std::invalid_argument("input grid function has non-finite values");
    MollifyResult res;
    const GridFunction ranged = truncate_range(f, gamma, epsilon / 8.0, res.range_level);
    const GridFunction cut = truncate_support(ranged, gamma, epsilon / 8.0, res.support_radius);
    const double floor_delta = 2.0 * f.spec().spacing();

    bool have_best = false;
    for (double delta = 0.5; delta >= floor_delta * (1.0 - 1e-12); delta /= std::sqrt(2.0)) {
        GridFunction phi = mollify(cut, delta);
        const Errors e = errors(f, phi, gamma);
        res.ladder.push_back({delta, e.l1, e.lg});
        if (!have_best || e.l1 + e.lg < res.combined()) {
            res.phi = std::move(phi);
            res.delta = delta;
            res.l1_error = e.l1;
            res.lgamma_error = e.lg;
            have_best = true;
        }
        if (e.l1 + e.lg < epsilon) {
            res.attained = true;
            break;
        }
    }
    if (!have_best) {
        // grid too coarse for even the first rung
        res.phi = cut;
        const Errors e = errors(f, cut, gamma);
        res.l1_error = e.l1;
        res.lgamma_error = e.lg;
    }
    return res;
}

MollifyResult mollify_approximate(const GridFunction& f, double gamma, double epsilon) {
    MollifyResult res = mollify_ladder(f, gamma, epsilon);
    if (!res.attained) {
        std::ostringstream os;
        os << "epsilon = " << epsilon << " is unattainable on this grid: the best combined error "
           << res.combined() << " (delta = " << res.delta << ") would need delta < 2h = "
           << 2.0 * f.spec().spacing() << "; refine the grid";
        throw MollifyUnattainable(os.str(), std::move(res));
    }
    return res;
}

}  // namespace riesz_ep
