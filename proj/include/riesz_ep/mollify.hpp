#pragma once

#include <stdexcept>
#include <vector>

#include "riesz_ep/grid.hpp"

namespace riesz_ep {

struct MollifierSpec {
    double delta = 0.5;
    double truncation_radius = 1.0;
    double epsilon = 0.05;

    /// Throws std::invalid_argument unless 0 < delta < 1, r > 0, epsilon > 0.
    static MollifierSpec make(double delta, double truncation_radius, double epsilon);
};

/// Sum of the discrete weights of eta_delta times h^d; 1 up to rounding.
double mollifier_mass(const GridSpec& spec, double delta);

/// eta_delta * f with eta(x) proportional to exp(-1/(1 - |x|^2)) on |x| < 1, normalised on the grid.
/// Values outside supp(f) + B_delta are exactly zero.
GridFunction mollify(const GridFunction& f, double delta);

struct MollifyStep {
    double delta = 0.0;
    double l1 = 0.0;
    double lgamma = 0.0;
    double combined() const { return l1 + lgamma; }
};

struct MollifyResult {
    GridFunction phi;
    double range_level = 0.0;     ///< |f| clipped at this level
    double support_radius = 0.0;  ///< f zeroed outside this ball
    double delta = 0.0;
    double l1_error = 0.0;        ///< |f - phi|_1
    double lgamma_error = 0.0;    ///< |f - phi|_gamma
    std::vector<MollifyStep> ladder;
    bool attained = false;

    double combined() const { return l1_error + lgamma_error; }
};

/// Range truncation, support truncation (each within epsilon/8), then mollification with delta
/// shrinking by 1/sqrt(2) from 1/2 until |f - phi|_1 + |f - phi|_gamma < epsilon or delta < 2h.
/// Never throws for an unreachable epsilon; check attained.
MollifyResult mollify_ladder(const GridFunction& f, double gamma, double epsilon);

struct MollifyUnattainable : std::runtime_error {
    MollifyResult best;
    MollifyUnattainable(const std::string& what, MollifyResult result)
        : std::runtime_error(what), best(std::move(result)) {}
};

/// mollify_ladder, throwing MollifyUnattainable (with the ladder attached) when epsilon would need
/// delta < 2h.
MollifyResult mollify_approximate(const GridFunction& f, double gamma, double epsilon);

}  // namespace riesz_ep
