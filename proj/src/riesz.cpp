#include "riesz_ep/riesz.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include "riesz_ep/parallel.hpp"

namespace riesz_ep {

namespace {

// FFTW's planner is not re-entrant; plan execution on new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t count) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

/// r2c / c2r plans on the (2n)^d padded grid plus the unpadded -> padded index map.
struct PaddedFft {
    int d;
    int n;
    std::size_t real_size = 1;
    std::size_t complex_size = 1;
    std::vector<std::size_t> embed;  // unpadded flat index -> padded flat index
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    PaddedFft(int d_, int n_) : d(d_), n(n_) {
        const int big = 2 * n;
        std::vector<int> dims(static_cast<std::size_t>(d), big);
        for (int k = 0; k < d; ++k) real_size *= static_cast<std::size_t>(big);
        complex_size = real_size / static_cast<std::size_t>(big) * static_cast<std::size_t>(big / 2 + 1);

        std::size_t cells = 1;
        for (int k = 0; k < d; ++k) cells *= static_cast<std::size_t>(n);
        embed.resize(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            std::size_t rest = i, padded = 0, scale = 1;
            for (int k = d - 1; k >= 0; --k) {
                padded += (rest % static_cast<std::size_t>(n)) * scale;
                rest /= static_cast<std::size_t>(n);
                scale *= static_cast<std::size_t>(big);
            }
            embed[i] = padded;
        }

        auto real = fftw_alloc<double>(real_size);
        auto spec = fftw_alloc<fftw_complex>(complex_size);
        forward = fftw_plan_dft_r2c(d, dims.data(), real.get(), spec.get(), FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r(d, dims.data(), spec.get(), real.get(), FFTW_ESTIMATE);
        if (!forward || !backward) throw std::runtime_error("FFTW planning failed");
    }

    ~PaddedFft() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    PaddedFft(const PaddedFft&) = delete;
    PaddedFft& operator=(const PaddedFft&) = delete;
};

struct Caches {
    std::mutex mutex;
    std::map<std::pair<int, int>, std::shared_ptr<PaddedFft>> plans;
    std::map<std::tuple<int, int, double, double, int, int>, std::shared_ptr<const KernelTable>> tables;
};

Caches& caches() {
    static Caches c;
    return c;
}

std::shared_ptr<PaddedFft> padded_fft(int d, int n) {
    auto& c = caches();
    std::lock_guard<std::mutex> lock(c.mutex);
    auto& slot = c.plans[{d, n}];
    if (!slot) {
        std::lock_guard<std::mutex> plan_lock(planner_mutex());
        slot = std::make_shared<PaddedFft>(d, n);
    }
    return slot;
}

/// Transform of a kernel sampled at every cell offset of the (2n)^d padded grid.
std::vector<std::complex<double>> padded_spectrum(const GridSpec& spec,
                                                  const std::function<double(std::span<const int>)>& kernel) {
    auto plan = padded_fft(spec.d, spec.n);
    auto real = fftw_alloc<double>(plan->real_size);
    auto out = fftw_alloc<fftw_complex>(plan->complex_size);
    const int big = 2 * spec.n;
    std::vector<int> offset(static_cast<std::size_t>(spec.d));
    for (std::size_t i = 0; i < plan->real_size; ++i) {
        std::size_t rest = i;
        bool unused = false;
        for (int k = spec.d - 1; k >= 0; --k) {
            const int pos = static_cast<int>(rest % static_cast<std::size_t>(big));
            rest /= static_cast<std::size_t>(big);
            if (pos == spec.n) unused = true;  // offset +-n never occurs between cells
            offset[static_cast<std::size_t>(k)] = pos < spec.n ? pos : pos - big;
        }
        real[i] = unused ? 0.0 : kernel(offset);
    }
    fftw_execute_dft_r2c(plan->forward, real.get(), out.get());
    std::vector<std::complex<double>> spectrum(plan->complex_size);
    for (std::size_t i = 0; i < plan->complex_size; ++i) spectrum[i] = {out[i][0], out[i][1]};
    return spectrum;
}

/// Nested tensor Gauss-Legendre over [-1/2, 1/2]^dims.
template <int Points>
double cube_integral(int dims, const std::function<double(double)>& radial_sq) {
    std::function<double(int, double)> level = [&](int remaining, double acc) -> double {
        if (remaining == 0) return radial_sq(acc);
        return boost::math::quadrature::gauss<double, Points>::integrate(
            [&](double y) { return level(remaining - 1, acc + y * y); }, -0.5, 0.5);
    };
    return level(dims, 0.0);
}

void check_density(const GridFunction& rho) {
    const double top = std::max(rho.max(), 0.0);
    const double floor = -1e-12 * top;
    for (double v : rho.values()) {
        if (v < floor)
            throw std::domain_error("density has negative entries (" + std::to_string(v) +
                                    ") beyond -1e-12 max(rho)");
    }
}

void check_alpha(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < d))
        throw std::domain_error("Riesz degree alpha must lie in ]0, d[; got alpha = " +
                                std::to_string(alpha) + " with d = " + std::to_string(d));
}

std::vector<GridFunction> convolve_spectra(const GridFunction& f,
                                           const std::vector<const std::vector<std::complex<double>>*>& spectra) {
    const GridSpec& s = f.spec();
    auto plan = padded_fft(s.d, s.n);
    auto real = fftw_alloc<double>(plan->real_size);
    auto spec = fftw_alloc<fftw_complex>(plan->complex_size);
    auto work = fftw_alloc<fftw_complex>(plan->complex_size);

    std::fill(real.get(), real.get() + plan->real_size, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) real[plan->embed[i]] = f[i];
    fftw_execute_dft_r2c(plan->forward, real.get(), spec.get());

    const double scale = s.cell_volume() / static_cast<double>(plan->real_size);
    std::vector<GridFunction> out;
    out.reserve(spectra.size());
    for (const auto* spectrum : spectra) {
        const auto& k = *spectrum;
        for (std::size_t i = 0; i < plan->complex_size; ++i) {
            const double ar = spec[i][0], ai = spec[i][1];
            const double br = k[i].real(), bi = k[i].imag();
            work[i][0] = ar * br - ai * bi;
            work[i][1] = ar * bi + ai * br;
        }
        fftw_execute_dft_c2r(plan->backward, work.get(), real.get());
        GridFunction g(s);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = real[plan->embed[i]] * scale;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<GridFunction> convolve_fast(const GridFunction& f,
                                        const std::vector<std::shared_ptr<const KernelTable>>& tables) {
    std::vector<const std::vector<std::complex<double>>*> spectra;
    for (const auto& t : tables) spectra.push_back(&t->spectrum());
    return convolve_spectra(f, spectra);
}

void check_direct_size(const GridSpec& s) {
    const std::size_t cells = s.cell_count();
    if (cells > kDirectOracleMaxCells)
        throw std::length_error("direct Riesz oracle is O(N^2) and limited to " +
                                std::to_string(kDirectOracleMaxCells) + " cells (16^3); grid has " +
                                std::to_string(cells) + ". Use the fast method or a coarser grid.");
}

GridFunction convolve_direct(const GridFunction& f, const KernelTable& table) {
    const GridSpec& s = f.spec();
    const std::size_t cells = s.cell_count();
    check_direct_size(s);
    const std::size_t d = static_cast<std::size_t>(s.d);
    std::vector<int> index(cells * d);
    for (std::size_t i = 0; i < cells; ++i) s.unflatten(i, std::span<int>(index.data() + i * d, d));
    GridFunction out(s);
    const double vol = s.cell_volume();
    parallel_for(cells, [&](std::size_t begin, std::size_t end) {
        std::vector<int> offset(d);
        std::vector<double> terms(cells);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < cells; ++j) {
                for (std::size_t k = 0; k < d; ++k) offset[k] = index[i * d + k] - index[j * d + k];
                terms[j] = table.value(offset) * f[j];
            }
            out[i] = pairwise_sum(terms) * vol;
        }
    });
    return out;
}

}  // namespace

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double newton_constant(int d) {
    if (d < 3) throw std::domain_error("the Newtonian normalisation c(d) needs d >= 3");
    return d * (d - 2.0) * unit_ball_volume(d);
}

RieszKernel RieszKernel::make(int d, double alpha) {
    check_alpha(d, alpha);
    return RieszKernel{d, alpha, d >= 3 ? newton_constant(d) : 0.0};
}

double RieszKernel::operator()(double r) const { return std::pow(r, alpha - d); }

double origin_cell_average(int d, double alpha) {
    check_alpha(d, alpha);
    // Split the cube into 2d pyramids with apex at the origin; the radial factor
    // s^(alpha-1) integrates to 1/alpha, leaving a smooth integral over one face.
    const double e = 0.5 * (alpha - d);
    auto face = [e](double y2) { return std::pow(0.25 + y2, e); };
    if (d == 1) return face(0.0) / alpha;
    const double coarse = cube_integral<30>(d - 1, face);
    const double fine = cube_integral<40>(d - 1, face);
    if (std::abs(coarse - fine) > 1e-13 * std::abs(fine))
        throw std::runtime_error("origin-cell quadrature did not converge");
    return d / alpha * fine;
}

KernelTable::KernelTable(const GridSpec& spec, double alpha, KernelKind kind, int component)
    : spec_(spec), alpha_(alpha), kind_(kind), component_(component) {
    const double h = spec.spacing();
    if (kind == KernelKind::scalar) {
        check_alpha(spec.d, alpha);
        origin_value_ = origin_cell_average(spec.d, alpha) * std::pow(h, alpha - spec.d);
    } else {
        if (component < 0 || component >= spec.d) throw std::invalid_argument("field component out of range");
        c_d_ = newton_constant(spec.d);
    }

    spectrum_ = padded_spectrum(spec, [this](std::span<const int> offset) { return value(offset); });
}

double KernelTable::value(std::span<const int> offset) const {
    const double h = spec_.spacing();
    double r2 = 0.0;
    for (int o : offset) r2 += static_cast<double>(o) * o;
    if (r2 == 0.0) return kind_ == KernelKind::scalar ? origin_value_ : 0.0;
    const double r = std::sqrt(r2) * h;
    if (kind_ == KernelKind::scalar) return std::pow(r, alpha_ - spec_.d);
    const double xk = offset[static_cast<std::size_t>(component_)] * h;
    return (2.0 - spec_.d) * xk / (c_d_ * std::pow(r, spec_.d));
}

std::shared_ptr<const KernelTable> kernel_table(const GridSpec& spec, double alpha, KernelKind kind,
                                                int component) {
    auto& c = caches();
    const auto key = std::make_tuple(spec.d, spec.n, spec.half_width, kind == KernelKind::scalar ? alpha : 0.0,
                                     static_cast<int>(kind), component);
    {
        std::lock_guard<std::mutex> lock(c.mutex);
        auto it = c.tables.find(key);
        if (it != c.tables.end()) return it->second;
    }
    auto table = std::make_shared<const KernelTable>(spec, alpha, kind, component);
    std::lock_guard<std::mutex> lock(c.mutex);
    auto [it, inserted] = c.tables.emplace(key, std::move(table));
    return it->second;
}

void clear_kernel_cache() {
    auto& c = caches();
    std::lock_guard<std::mutex> lock(c.mutex);
    c.tables.clear();
    std::lock_guard<std::mutex> plan_lock(planner_mutex());
    c.plans.clear();
}

GridFunction riesz_apply_direct(const GridFunction& f, double alpha) {
    check_alpha(f.spec().d, alpha);
    check_direct_size(f.spec());
    KernelTable table(f.spec(), alpha, KernelKind::scalar, 0);
    return convolve_direct(f, table);
}

GridFunction riesz_apply_fast(const GridFunction& f, double alpha) {
    check_alpha(f.spec().d, alpha);
    return std::move(convolve_fast(f, {kernel_table(f.spec(), alpha, KernelKind::scalar)}).front());
}

GridFunction potential_of(const GridFunction& q) {
    GridFunction phi = riesz_apply_fast(q, 2.0);
    phi *= 1.0 / newton_constant(q.spec().d);
    return phi;
}

VectorGridFunction field_of(const GridFunction& q) {
    const GridSpec& s = q.spec();
    newton_constant(s.d);
    std::vector<std::shared_ptr<const KernelTable>> tables;
    for (int k = 0; k < s.d; ++k) tables.push_back(kernel_table(s, 2.0, KernelKind::field, k));
    VectorGridFunction out;
    out.spec = s;
    out.components = convolve_fast(q, tables);
    return out;
}

VectorGridFunction field_of_direct(const GridFunction& q) {
    const GridSpec& s = q.spec();
    check_direct_size(s);
    VectorGridFunction out(s);
    for (int k = 0; k < s.d; ++k) out[k] = convolve_direct(q, KernelTable(s, 2.0, KernelKind::field, k));
    return out;
}

GridFunction electric_potential(const GridFunction& rho) {
    check_density(rho);
    return potential_of(rho);
}

VectorGridFunction electric_field(const GridFunction& rho) {
    check_density(rho);
    return field_of(rho);
}

GridFunction convolve_free_space(const GridFunction& f,
                                 const std::function<double(std::span<const int>)>& kernel) {
    const auto spectrum = padded_spectrum(f.spec(), kernel);
    return std::move(convolve_spectra(f, {&spectrum}).front());
}

double hls_exponents(int d, double alpha, double p) {
    check_alpha(d, alpha);
    if (!(p > 1.0 && p < d / alpha))
        throw std::domain_error("HLS exponent needs 1 < p < d/alpha = " + std::to_string(d / alpha) +
                                "; got p = " + std::to_string(p));
    return d * p / (d - alpha * p);
}

}  // namespace riesz_ep
