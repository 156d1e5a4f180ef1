#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace riesz_ep {

/// Uniform cell-centred grid over the box [-L, L]^d with n cells per axis.
struct GridSpec {
    int d = 3;
    int n = 16;
    double half_width = 1.0;

    /// Validating constructor; throws std::invalid_argument on n < 4, d < 1 or L <= 0.
    static GridSpec make(int d, int n, double half_width);

    double spacing() const { return 2.0 * half_width / n; }
    double cell_volume() const;
    std::size_t cell_count() const;
    std::size_t stride(int axis) const;
    /// Coordinate of the centre of cell i along any axis.
    double center(int i) const { return -half_width + (i + 0.5) * spacing(); }

    /// Multi-index of a flat (row-major, axis 0 slowest) cell index.
    void unflatten(std::size_t flat, std::span<int> index) const;
    void cell_center(std::size_t flat, std::span<double> x) const;

    bool operator==(const GridSpec&) const = default;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const GridSpec& spec);
    GridFunction(const GridSpec& spec, std::vector<double> values);

    /// Samples fn at every cell centre.
    static GridFunction sample(const GridSpec& spec,
                               const std::function<double(std::span<const double>)>& fn);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double max() const;
    double min() const;
    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double c);

private:
    GridSpec spec_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, double c);
GridFunction operator*(double c, GridFunction a);
/// Pointwise product.
GridFunction hadamard(const GridFunction& a, const GridFunction& b);

struct VectorGridFunction {
    GridSpec spec;
    std::vector<GridFunction> components;

    VectorGridFunction() = default;
    explicit VectorGridFunction(const GridSpec& s);

    GridFunction& operator[](int k) { return components[static_cast<std::size_t>(k)]; }
    const GridFunction& operator[](int k) const { return components[static_cast<std::size_t>(k)]; }
    int dim() const { return static_cast<int>(components.size()); }

    /// |v|^2 pointwise.
    GridFunction squared_norm() const;
};

VectorGridFunction operator-(const VectorGridFunction& a, const VectorGridFunction& b);

/// Fixed-tree pairwise summation; the reduction order depends only on the length.
double pairwise_sum(std::span<const double> xs);

/// Midpoint-rule L^p norm; p = +inf gives the grid maximum of |f|.
double lp_norm(const GridFunction& f, double p);
/// Signed midpoint-rule integral.
double integrate(const GridFunction& f);
/// integrate(f * g) without materialising the product.
double inner_product(const GridFunction& f, const GridFunction& g);

/// Second-order centred difference along one axis, one-sided second order at the faces.
GridFunction partial(const GridFunction& f, int axis);
VectorGridFunction gradient(const GridFunction& f);
GridFunction divergence(const VectorGridFunction& v);

/// Binary grid dump: "RIESZ-EP GRID v1\n", "d n L\n", then n^d little-endian doubles.
void write_grid(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_grid(const std::filesystem::path& path);

}  // namespace riesz_ep
