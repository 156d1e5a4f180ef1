#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "riesz_ep/grid.hpp"

namespace riesz_ep {

/// Lebesgue measure of the unit ball in R^d.
double unit_ball_volume(int d);
/// Normalisation c(d) = d (d - 2) |B_1| that makes phi = I_2 rho / c(d) solve -Laplace(phi) = rho.
/// Equals 4 pi for d = 3. Requires d >= 3.
double newton_constant(int d);

/// Kernel |x|^(alpha - d) of the Riesz potential of degree alpha.
struct RieszKernel {
    int d = 3;
    double alpha = 2.0;
    double c_d = 0.0;  // only meaningful for d >= 3

    /// Throws std::domain_error unless 0 < alpha < d.
    static RieszKernel make(int d, double alpha);

    double operator()(double r) const;
};

/// Mean of |x|^(alpha - d) over the unit cube [-1/2, 1/2]^d. The origin-cell value of the
/// discrete kernel on spacing h is this times h^(alpha - d).
double origin_cell_average(int d, double alpha);

/// Which convolution kernel a table holds.
enum class KernelKind {
    scalar,  ///< |x|^(alpha - d), origin cell replaced by its cell average
    field,   ///< (2 - d) x_k / (c(d) |x|^d) for one component k, zero at the origin
};

/// Transformed kernel on the zero-padded (2n)^d grid. Immutable once built.
class KernelTable {
public:
    KernelTable(const GridSpec& spec, double alpha, KernelKind kind, int component);

    const GridSpec& spec() const { return spec_; }
    double alpha() const { return alpha_; }
    KernelKind kind() const { return kind_; }
    int component() const { return component_; }
    /// Kernel value for a cell offset (in cells) on the unpadded grid.
    double value(std::span<const int> offset) const;
    const std::vector<std::complex<double>>& spectrum() const { return spectrum_; }

private:
    GridSpec spec_;
    double alpha_;
    KernelKind kind_;
    int component_;
    double origin_value_ = 0.0;
    double c_d_ = 0.0;
    std::vector<std::complex<double>> spectrum_;
};

/// Shared cached table; safe to call from several threads.
std::shared_ptr<const KernelTable> kernel_table(const GridSpec& spec, double alpha, KernelKind kind,
                                                int component = 0);
/// Drops every cached table and FFT plan.
void clear_kernel_cache();

/// Largest cell count the O(N^2) direct oracle accepts (16^3).
inline constexpr std::size_t kDirectOracleMaxCells = 4096;

/// I_alpha f by explicit double sum. Refuses grids above kDirectOracleMaxCells.
GridFunction riesz_apply_direct(const GridFunction& f, double alpha);
/// I_alpha f by zero-padded FFT convolution with the same discrete kernel.
GridFunction riesz_apply_fast(const GridFunction& f, double alpha);

/// phi = I_2 q / c(d) for a signed charge q (no sign check).
GridFunction potential_of(const GridFunction& q);
/// grad phi for a signed charge q through the gradient kernel (no sign check).
VectorGridFunction field_of(const GridFunction& q);
/// Direct double-sum counterpart of field_of; same size cap as riesz_apply_direct.
VectorGridFunction field_of_direct(const GridFunction& q);

/// phi = I_2 rho / c(d). Rejects densities with entries below -1e-12 max(rho).
GridFunction electric_potential(const GridFunction& rho);
/// grad phi via the gradient kernel. Same density check as electric_potential.
VectorGridFunction electric_field(const GridFunction& rho);

/// Aperiodic sum out_i = sum_j kernel(i - j) f_j h^d, kernel given per cell offset, by the same
/// zero-padded transform as riesz_apply_fast.
GridFunction convolve_free_space(const GridFunction& f,
                                 const std::function<double(std::span<const int>)>& kernel);

/// Target exponent dp / (d - alpha p) of the Hardy-Littlewood-Sobolev bound; needs 1 < p < d/alpha.
double hls_exponents(int d, double alpha, double p);

}  // namespace riesz_ep
