#include "dsig/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include "dsig/error.hpp"
#include "dsig/io.hpp"

namespace dsig {

std::size_t GridSpec::size() const noexcept {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(points);
    return s;
}

void GridSpec::validate() const {
    if (n < 1 || n > 3) fail(ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
    if (points < 16 || (points & (points - 1)) != 0)
        fail(ErrorCode::InvalidArgument, "points per axis must be a power of two >= 16");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        fail(ErrorCode::InvalidArgument, "half_length must be positive");
}

GridSpec GridSpec::defaults(int n, double half_length) {
    const int pts = n == 1 ? 512 : n == 2 ? 256 : 64;
    GridSpec g{n, pts, half_length};
    g.validate();
    return g;
}

FieldState FieldState::zeros(const GridSpec& g) {
    g.validate();
    return FieldState{g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0), 0.0};
}

void FieldState::check_shape() const {
    grid.validate();
    if (u.size() != grid.size() || ut.size() != grid.size())
        fail(ErrorCode::ShapeMismatch, "field samples do not match the grid shape");
}

namespace grid {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on
// caller-owned arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for(const GridSpec& g, Direction dir) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    std::lock_guard<std::mutex> lock(planner_mutex());
    const auto key = std::make_tuple(g.n, g.points, sign);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    int dims[3] = {g.points, g.points, g.points};
    std::vector<cplx> scratch(g.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft(g.n, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) fail(ErrorCode::InvalidArgument, "FFTW could not create a plan");
    cache.emplace(key, p);
    return p;
}

void check(std::size_t len, const GridSpec& g) {
    g.validate();
    if (len != g.size()) fail(ErrorCode::ShapeMismatch, "sample count does not match the grid shape");
}

}  // namespace

std::vector<cplx> transform(std::span<const cplx> samples, Direction dir, const GridSpec& g) {
    check(samples.size(), g);
    std::vector<cplx> out(samples.begin(), samples.end());
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan_for(g, dir), buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> forward(std::span<const double> samples, const GridSpec& g) {
    check(samples.size(), g);
    std::vector<cplx> c(samples.begin(), samples.end());
    return transform(c, Direction::Forward, g);
}

std::vector<double> inverse_real(std::span<const cplx> spectrum, const GridSpec& g) {
    const auto c = transform(spectrum, Direction::Inverse, g);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

double coordinate(const GridSpec& g, int j) { return -g.half_length + j * g.spacing(); }

int wavenumber(const GridSpec& g, int j) { return j < g.points / 2 ? j : j - g.points; }

namespace {

template <class F>
void for_each_index(const GridSpec& g, F&& f) {
    const int N = g.points;
    int idx[3] = {0, 0, 0};
    const std::size_t total = g.size();
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rem = lin;
        for (int d = g.n - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % N);
            rem /= N;
        }
        f(lin, idx);
    }
}

}  // namespace

std::vector<double> frequency_magnitudes(const GridSpec& g) {
    g.validate();
    std::vector<double> out(g.size());
    const double unit = std::acos(-1.0) / g.half_length;
    for_each_index(g, [&](std::size_t lin, const int* idx) {
        double s = 0.0;
        for (int d = 0; d < g.n; ++d) {
            const double xi = unit * wavenumber(g, idx[d]);
            s += xi * xi;
        }
        out[lin] = std::sqrt(s);
    });
    return out;
}

std::vector<int> max_abs_wavenumber(const GridSpec& g) {
    g.validate();
    std::vector<int> out(g.size());
    for_each_index(g, [&](std::size_t lin, const int* idx) {
        int m = 0;
        for (int d = 0; d < g.n; ++d) m = std::max(m, std::abs(wavenumber(g, idx[d])));
        out[lin] = m;
    });
    return out;
}

std::vector<double> sample(const GridSpec& g, const std::function<double(std::span<const double>)>& f) {
    g.validate();
    std::vector<double> out(g.size());
    double x[3] = {0.0, 0.0, 0.0};
    for_each_index(g, [&](std::size_t lin, const int* idx) {
        for (int d = 0; d < g.n; ++d) x[d] = coordinate(g, idx[d]);
        out[lin] = f(std::span<const double>(x, static_cast<std::size_t>(g.n)));
    });
    return out;
}

std::vector<double> apply_radial_multiplier(std::span<const double> field, const GridSpec& g,
                                            const std::function<double(double)>& m) {
    auto spec = forward(field, g);
    const auto mag = frequency_magnitudes(g);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= m(mag[i]);
    return inverse_real(spec, g);
}

std::vector<double> riesz_apply(std::span<const double> field, double s, const GridSpec& g) {
    if (!std::isfinite(s)) fail(ErrorCode::InvalidArgument, "Riesz order must be finite");
    if (s == 0.0) {
        check(field.size(), g);
        return {field.begin(), field.end()};
    }
    return apply_radial_multiplier(field, g, [s](double r) { return r == 0.0 ? 0.0 : std::pow(r, s); });
}

std::vector<double> bessel_potential_apply(std::span<const double> field, double s, const GridSpec& g) {
    if (!std::isfinite(s)) fail(ErrorCode::InvalidArgument, "Bessel potential order must be finite");
    if (s == 0.0) {
        check(field.size(), g);
        return {field.begin(), field.end()};
    }
    return apply_radial_multiplier(field, g, [s](double r) { return std::pow(1.0 + r * r, 0.5 * s); });
}

double lq_norm_grid(std::span<const double> field, double q, const GridSpec& g) {
    check(field.size(), g);
    if (!(q >= 1.0)) fail(ErrorCode::InvalidArgument, "q must be >= 1");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : field) m = std::max(m, std::abs(v));
        return m;
    }
    const double cell = std::pow(g.spacing(), g.n);
    // Scale by the maximum so large q cannot overflow.
    double peak = 0.0;
    for (double v : field) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double sum = 0.0;
    for (double v : field) sum += std::pow(std::abs(v) / peak, q);
    return peak * std::pow(sum * cell, 1.0 / q);
}

double sobolev_norm(std::span<const double> field, double s, double q, const GridSpec& g) {
    return lq_norm_grid(bessel_potential_apply(field, s, g), q, g);
}

void write_field_csv(std::ostream& os, const FieldState& state) {
    state.check_shape();
    static const char* axes[3] = {"x", "y", "z"};
    const auto& g = state.grid;
    for (int d = 0; d < g.n; ++d) os << axes[d] << ',';
    os << "u,ut\n";
    for_each_index(g, [&](std::size_t lin, const int* idx) {
        for (int d = 0; d < g.n; ++d) os << io::fmt(coordinate(g, idx[d])) << ',';
        os << io::fmt(state.u[lin]) << ',' << io::fmt(state.ut[lin]) << '\n';
    });
}

}  // namespace grid
}  // namespace dsig
