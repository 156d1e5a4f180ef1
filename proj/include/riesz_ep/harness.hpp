#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riesz_ep/energy.hpp"
#include "riesz_ep/grid.hpp"
#include "riesz_ep/solver.hpp"

namespace riesz_ep {

/// One checked instance: lhs <= rhs (+ slack), or a measured quantity against a tolerance.
struct CheckCase {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double slack = 0.0;
    bool pass = false;
};

struct InequalityReport {
    std::string name;
    std::string corpus;
    std::uint64_t seed = 0;
    std::vector<CheckCase> cases;
    double empirical_constant = 0.0;  ///< max ratio over the corpus, when meaningful
    std::map<std::string, double> summary;
    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> notes;
    bool pass = false;

    /// pass = every case passes (and there is at least one).
    void finalize();
};

/// Integral of |x|^-s over the complement of the cube [-L, L]^d (s > d).
double cube_exterior_power_integral(int d, double half_width, double s);

// --- Riesz bounds --------------------------------------------------------------------------

/// Seeded corpus element: a pair (f, g) of non-negative compactly supported profiles, each
/// available at scale 1 and dilated as f(lambda x).
struct CorpusElement {
    std::string kind;
    std::function<double(std::span<const double>)> f;
    std::function<double(std::span<const double>)> g;
};
std::vector<CorpusElement> hls_corpus(int d, int count, std::uint64_t seed);

struct HlsOptions {
    int n = 64;
    double half_width = 1.5;
    int trials = 50;
    std::uint64_t seed = 20240611;
    double dilation_tolerance = 0.05;
    double spread_limit = 10.0;  ///< max/median bound on the dilate ratio family
};

/// Both sides of every Riesz-potential bound in the family on each corpus element and its
/// 2x dilate. Throws ConfigError naming the bound when (d, alpha, p) violates 1 < p < d/alpha.
/// Members whose own hypotheses fail for this alpha are skipped with a note.
InequalityReport check_hls_family(int d, double alpha, double p, const HlsOptions& options);

// --- integration by parts ------------------------------------------------------------------

struct BilinearForms {
    double field_form = 0.0;     ///< int grad(phi) . grad(psi), with the far-field tail
    double rho_psi = 0.0;        ///< int rho psi
    double eta_phi = 0.0;        ///< int eta phi
    std::optional<double> double_sum;  ///< (1/c) sum_i sum_j rho_i K(x_i - x_j) eta_j h^2d, n^d <= 16^3 only
};
BilinearForms check_ibp_bilinear(const GridFunction& rho, const GridFunction& eta);

struct StressForms {
    double lhs = 0.0;    ///< int rho grad(phi) . u_bar
    double rhs = 0.0;    ///< int grad(u_bar) : grad(phi) (x) grad(phi) - (div u_bar) |grad(phi)|^2 / 2
    double scale = 0.0;  ///< int rho |grad(phi)| |u_bar|, the deviation denominator
};
StressForms check_ibp_stress(const GridFunction& rho, const VectorGridFunction& u_bar);

struct IbpOptions {
    std::vector<int> ladder{32, 64};
    double half_width = 2.0;
    int corpus = 4;
    std::uint64_t seed = 20240611;
    double symmetry_tolerance = 1e-8;
    double bilinear_tolerance = 3e-2;
    double stress_tolerance = 5e-2;
};
InequalityReport ibp_suite(const IbpOptions& options);

// --- relative energy -----------------------------------------------------------------------

/// Space integrals at one output time.
struct JIntegrands {
    RelativeEnergyParts psi;
    double j1 = 0.0;
    double j2_pressure = 0.0;  ///< -int (div u_bar) p(rho | rho_bar)
    double j2_internal = 0.0;  ///< same through (gamma - 1) h(rho | rho_bar)
    double j3_direct = 0.0;    ///< int (rho - rho_bar) u_bar . grad(phi - phi_bar)
    double j3_stress = 0.0;    ///< the stress-tensor rewriting of j3
    double grad_norm = 0.0;    ///< max over cells of the Frobenius norm of grad(u_bar)
    double div_norm = 0.0;     ///< max over cells of |div u_bar|
};
JIntegrands j_integrands(const FluidState& weak, const FluidState& ref, const GasLaw& law, double eps_vac);

struct RelativeEnergyReport {
    std::vector<double> times;
    std::vector<double> psi;
    std::vector<JIntegrands> integrands;
    std::vector<double> j1, j2, j3, j3_stress;  ///< cumulative trapezoid integrals
    std::vector<double> residual;               ///< psi - psi(0) - (j1 + j2 + j3)
    std::vector<double> residual_stress;        ///< same with j3 in its stress form
    std::vector<double> h_weak, h_ref;
    double slack = 0.0;
    double max_residual = 0.0;
    double j2_agreement = 0.0;  ///< max relative gap between the two J2 evaluations
    bool pass = false;
};

/// Psi(t) - Psi(0) <= J1 + J2 + J3 + slack at every output time. The weak trajectory is remapped
/// to the reference grid when coarser. Throws std::invalid_argument on an output-time mismatch.
RelativeEnergyReport relative_energy_inequality(const Trajectory& weak, const Trajectory& ref, double slack);

struct GronwallReport {
    std::vector<double> times;
    std::vector<double> psi;
    double c_ap = 0.0;           ///< 3 (|grad u_bar|_inf + |div u_bar|_inf max(1, gamma - 1))
    double c_star = 0.0;         ///< max_t log(Psi(t) / Psi(0)) / t
    double grad_norm = 0.0;
    double div_norm = 0.0;
    double slack = 0.0;
    double max_violation = 0.0;  ///< max_t Psi(t) - exp(C_ap t)(Psi(0) + slack)
    bool envelope_pass = false;
    bool j_bounds_pass = false;
    bool implication_holds = false;  ///< inequality + J bounds => discrete Gronwall envelope
    bool pass = false;
};
GronwallReport gronwall_check(const RelativeEnergyReport& re, const GasLaw& law);
/// Envelope test alone on a bare Psi series with a given rate.
GronwallReport gronwall_envelope(const std::vector<double>& times, const std::vector<double>& psi, double c_ap,
                                 double slack);

struct DissipativityReport {
    double h0 = 0.0;
    double slack = 0.0;
    double worst_window = 0.0;  ///< max over (t, kappa) of (1/kappa) int_t^{t+kappa} H - H(0)
    double worst_pointwise = 0.0;
    int windows = 0;
    bool pass = false;
};
/// theta-test: (1/kappa) int_t^{t+kappa} H <= H(0) + slack for every output time t with t + kappa <= T,
/// and H(t) <= H(0) + slack. Each kappa must be a whole number (>= 1) of output intervals; throws
/// std::invalid_argument otherwise.
DissipativityReport dissipativity_check(const std::vector<double>& times, const std::vector<double>& energy,
                                        double slack_fraction, const std::vector<double>& kappas);

// --- suites -----------------------------------------------------------------------------------

struct VerifyConfig {
    ScenarioConfig scenario;
    HlsOptions hls;
    std::vector<double> hls_alphas{1.0, 2.0};
    double hls_p = 1.2;
    IbpOptions ibp;
    std::vector<int> re_ladder{32, 64};
    int re_cadence = 40;
    double re_slack = 5e-3;  ///< fraction of H(0)
    Perturbation re_perturbation = Perturbation::shear;
    double re_delta = 1e-2;
    double re_residual_ratio = 1.5;
    int gronwall_n = 64;
    Perturbation gronwall_perturbation = Perturbation::bump;
    double gronwall_delta = 1e-2;
    int ws_reference_n = 96;
    std::vector<int> ws_ladder{32, 48, 64};
    double ws_ratio = 1.5;
    double ws_same_grid_tolerance = 1e-12;
    int dissipativity_n = 96;
    double dissipativity_slack = 1e-3;
    std::vector<double> dissipativity_kappas{0.02, 0.04, 0.1};
    double mass_tolerance = 1e-12;
    double energy_drift_tolerance = 2e-3;
};

const std::vector<std::string>& suite_names();

/// Runs trajectories once per distinct configuration and shares them between suites.
class TrajectoryCache {
public:
    std::shared_ptr<const Trajectory> reference(const ScenarioConfig& config);
    std::shared_ptr<const Trajectory> weak(const ScenarioConfig& config, const ScenarioConfig& ref_config);

private:
    std::map<std::string, std::shared_ptr<const Trajectory>> runs_;
};

/// One named suite ("hls", "ibp", "re-inequality", "gronwall", "weak-strong", "dissipativity").
InequalityReport run_suite(const std::string& suite, const VerifyConfig& config, TrajectoryCache& cache);

}  // namespace riesz_ep
