#include "riesz_ep/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace riesz_ep {

namespace {

constexpr const char* kGridMagic = "RIESZ-EP GRID v1";

void require_same_spec(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw std::invalid_argument("grid functions live on different grids");
}

double pairwise_range(const double* xs, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_range(xs, half) + pairwise_range(xs + half, n - half);
}

}  // namespace

GridSpec GridSpec::make(int d, int n, double half_width) {
    if (d < 1) throw std::invalid_argument("grid dimension must be >= 1");
    if (n < 4) throw std::invalid_argument("grid needs at least 4 cells per axis");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("grid half-width must be positive and finite");
    return GridSpec{d, n, half_width};
}

double GridSpec::cell_volume() const { return std::pow(spacing(), d); }

std::size_t GridSpec::cell_count() const {
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);
    return total;
}

std::size_t GridSpec::stride(int axis) const {
    std::size_t s = 1;
    for (int k = axis + 1; k < d; ++k) s *= static_cast<std::size_t>(n);
    return s;
}

void GridSpec::unflatten(std::size_t flat, std::span<int> index) const {
    for (int k = d - 1; k >= 0; --k) {
        index[static_cast<std::size_t>(k)] = static_cast<int>(flat % static_cast<std::size_t>(n));
        flat /= static_cast<std::size_t>(n);
    }
}

void GridSpec::cell_center(std::size_t flat, std::span<double> x) const {
    for (int k = d - 1; k >= 0; --k) {
        x[static_cast<std::size_t>(k)] = center(static_cast<int>(flat % static_cast<std::size_t>(n)));
        flat /= static_cast<std::size_t>(n);
    }
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(const GridSpec& spec) : spec_(spec), values_(spec.cell_count(), 0.0) {}

GridFunction::GridFunction(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.cell_count())
        throw std::invalid_argument("value count does not match n^d");
}

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<double(std::span<const double>)>& fn) {
    GridFunction f(spec);
    std::vector<double> x(static_cast<std::size_t>(spec.d));
    for (std::size_t i = 0; i < f.size(); ++i) {
        spec.cell_center(i, x);
        f.values_[i] = fn(x);
    }
    return f;
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_spec(spec_, other.spec_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_spec(spec_, other.spec_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (auto& v : values_) v *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, double c) { return a *= c; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
    require_same_spec(a.spec(), b.spec());
    GridFunction out(a.spec());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

VectorGridFunction::VectorGridFunction(const GridSpec& s)
    : spec(s), components(static_cast<std::size_t>(s.d), GridFunction(s)) {}

GridFunction VectorGridFunction::squared_norm() const {
    GridFunction out(spec);
    for (const auto& c : components)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * c[i];
    return out;
}

VectorGridFunction operator-(const VectorGridFunction& a, const VectorGridFunction& b) {
    VectorGridFunction out(a.spec);
    for (int k = 0; k < a.dim(); ++k) out[k] = a[k] - b[k];
    return out;
}

// ---------------------------------------------------------------------------

double pairwise_sum(std::span<const double> xs) { return pairwise_range(xs.data(), xs.size()); }

double lp_norm(const GridFunction& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("L^p exponent must satisfy p >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    std::vector<double> terms(f.size());
    if (p == 1.0) {
        for (std::size_t i = 0; i < f.size(); ++i) terms[i] = std::abs(f[i]);
    } else if (p == 2.0) {
        for (std::size_t i = 0; i < f.size(); ++i) terms[i] = f[i] * f[i];
    } else {
        for (std::size_t i = 0; i < f.size(); ++i) terms[i] = std::pow(std::abs(f[i]), p);
    }
    const double s = pairwise_sum(terms) * f.spec().cell_volume();
    if (p == 1.0) return s;
    if (p == 2.0) return std::sqrt(s);
    return std::pow(s, 1.0 / p);
}

double integrate(const GridFunction& f) { return pairwise_sum(f.values()) * f.spec().cell_volume(); }

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_spec(f.spec(), g.spec());
    std::vector<double> terms(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) terms[i] = f[i] * g[i];
    return pairwise_sum(terms) * f.spec().cell_volume();
}

GridFunction partial(const GridFunction& f, int axis) {
    const GridSpec& s = f.spec();
    if (axis < 0 || axis >= s.d) throw std::invalid_argument("axis out of range");
    const std::size_t stride = s.stride(axis);
    const std::size_t n = static_cast<std::size_t>(s.n);
    const double inv2h = 1.0 / (2.0 * s.spacing());
    GridFunction out(s);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t pos = (i / stride) % n;
        double v;
        if (pos == 0) {
            v = (-3.0 * f[i] + 4.0 * f[i + stride] - f[i + 2 * stride]) * inv2h;
        } else if (pos == n - 1) {
            v = (3.0 * f[i] - 4.0 * f[i - stride] + f[i - 2 * stride]) * inv2h;
        } else {
            v = (f[i + stride] - f[i - stride]) * inv2h;
        }
        out[i] = v;
    }
    return out;
}

VectorGridFunction gradient(const GridFunction& f) {
    VectorGridFunction g(f.spec());
    for (int k = 0; k < f.spec().d; ++k) g[k] = partial(f, k);
    return g;
}

GridFunction divergence(const VectorGridFunction& v) {
    GridFunction out(v.spec);
    for (int k = 0; k < v.dim(); ++k) out += partial(v[k], k);
    return out;
}

// ---------------------------------------------------------------------------

void write_grid(const std::filesystem::path& path, const GridFunction& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const GridSpec& s = f.spec();
    std::ostringstream header;
    header.precision(17);
    header << kGridMagic << '\n' << s.d << ' ' << s.n << ' ' << s.half_width << '\n';
    const std::string h = header.str();
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (double v : f.values()) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
        os.write(reinterpret_cast<const char*>(bytes), 8);
    }
    if (!os) throw std::runtime_error("short write to " + path.string());
}

GridFunction read_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string magic;
    std::getline(is, magic);
    if (magic != kGridMagic) throw std::runtime_error(path.string() + ": not a RIESZ-EP grid file");
    std::string dims;
    std::getline(is, dims);
    std::istringstream ds(dims);
    int d = 0, n = 0;
    double L = 0.0;
    if (!(ds >> d >> n >> L)) throw std::runtime_error(path.string() + ": malformed grid header");
    const GridSpec spec = GridSpec::make(d, n, L);
    std::vector<double> values(spec.cell_count());
    for (auto& v : values) {
        unsigned char bytes[8];
        if (!is.read(reinterpret_cast<char*>(bytes), 8))
            throw std::runtime_error(path.string() + ": truncated grid payload");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        v = std::bit_cast<double>(bits);
    }
    return GridFunction(spec, std::move(values));
}

}  // namespace riesz_ep
