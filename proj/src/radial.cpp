#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "dsig/error.hpp"
#include "dsig/radial.hpp"

namespace dsig::radial {

namespace {

constexpr int kOrder = 16;

struct GaussLegendre {
    std::array<double, kOrder> x{};
    std::array<double, kOrder> w{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_16.
const GaussLegendre& gl16() {
    static const GaussLegendre rule = [] {
        GaussLegendre g;
        for (int i = 0; i < kOrder; ++i) {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = z;
                for (int k = 2; k <= kOrder; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            g.x[i] = z;
            g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return g;
    }();
    return rule;
}

template <class F>
auto gl_panel(const F& f, double a, double b) {
    const auto& g = gl16();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    decltype(f(a)) sum{};
    for (int i = 0; i < kOrder; ++i) sum += g.w[i] * f(mid + half * g.x[i]);
    return sum * half;
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl_panel(f, a, m);
    const double right = gl_panel(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
    return adaptive_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

struct Panel {
    double a;
    double b;
};

// Refine [a, b] until the 16-point rule agrees with its two halves.
void refine_panel(const RadialSymbol& g, double a, double b, double tol, int depth,
                  std::vector<Panel>& out) {
    const double m = 0.5 * (a + b);
    const cplx whole = gl_panel(g, a, b);
    const cplx halves = gl_panel(g, a, m) + gl_panel(g, m, b);
    if (depth <= 0 || std::abs(whole - halves) <= tol) {
        out.push_back({a, b});
        return;
    }
    refine_panel(g, a, m, 0.5 * tol, depth - 1, out);
    refine_panel(g, m, b, 0.5 * tol, depth - 1, out);
}

// J̃_{n/2-1}(z) with closed forms for n = 1 and n = 3.
double kernel_bessel(int n, double z) {
    constexpr double c = 0.79788456080286535588;  // √(2/π)
    if (n == 1) return c * std::cos(z);
    if (n == 3) {
        if (z < 1e-3) {
            const double z2 = z * z;
            return c * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0));
        }
        return c * std::sin(z) / z;
    }
    return bessel_j_tilde(0.5 * n - 1.0, z);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) fail(ErrorCode::InvalidArgument, "abs_tol must be positive");
    if (a == b) return 0.0;
    return adaptive_rec(f, a, b, gl_panel(f, a, b), abs_tol, max_depth);
}

double lemma_b1_alpha() {
    const double integral = integrate_adaptive(
        [](double tau) { return std::cos(tau - std::sin(tau)); }, 0.0, std::numbers::pi, 1e-14);
    return integral / std::numbers::pi;
}

void QuadratureConfig::validate() const {
    if (!(tolerance > 0.0 && tolerance <= 1e-3))
        fail(ErrorCode::InvalidArgument, "quadrature tolerance must lie in (0, 1e-3]");
    if (max_panels < 64) fail(ErrorCode::InvalidArgument, "max_panels must be >= 64");
}

double sphere_area(int n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

RadialProfile inverse_radial_fourier(const RadialSymbol& symbol, int n, double s_weight,
                                     std::span<const double> radii, const QuadratureConfig& cfg) {
    cfg.validate();
    if (n < 1) fail(ErrorCode::InvalidArgument, "dimension must be >= 1");
    if (!(s_weight >= 0.0)) fail(ErrorCode::InvalidArgument, "s_weight must be >= 0");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
            fail(ErrorCode::InvalidArgument, "radii must be positive and finite");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            fail(ErrorCode::InvalidArgument, "radii must be strictly increasing");
    }

    RadialProfile prof;
    prof.n = n;
    prof.radii.assign(radii.begin(), radii.end());
    prof.values.assign(radii.size(), cplx(0.0));

    const double power = n - 1.0 + s_weight;
    const RadialSymbol weighted = [&](double rho) {
        return rho == 0.0 ? (power == 0.0 ? symbol(0.0) : cplx(0.0)) : symbol(rho) * std::pow(rho, power);
    };

    // Envelope scan at 1/32 decade.
    constexpr int kPerDecade = 32;
    constexpr int kLo = -12;
    constexpr int kHi = 8;
    const int count = (kHi - kLo) * kPerDecade + 1;
    const double dlog = std::log(10.0) / kPerDecade;
    std::vector<double> rho(count);
    std::vector<double> mass(count);  // |m| ρ^{power} · ρ, the integrand per unit ln ρ
    double total = 0.0;
    for (int k = 0; k < count; ++k) {
        rho[k] = std::pow(10.0, kLo + static_cast<double>(k) / kPerDecade);
        const double v = std::abs(weighted(rho[k])) * rho[k];
        if (!std::isfinite(v)) fail(ErrorCode::TailNotConverged, "symbol is not finite on the scan");
        mass[k] = v;
        total += v * dlog;
    }
    if (total == 0.0) return prof;

    const double cut = cfg.tolerance * total;
    if (mass.back() > cut)
        fail(ErrorCode::TailNotConverged, "symbol envelope does not decay below tolerance by rho = 1e8");
    int last = count - 1;
    while (last > 0 && mass[last - 1] <= cut) --last;
    const double rho_max = rho[last];
    prof.rho_max = rho_max;
    prof.truncation_bound = cut;

    // Octave base panels down to ρ_max·1e-14, each refined adaptively.
    std::vector<Panel> base;
    const double rho_lo = rho_max * 1e-14;
    const double panel_tol = cut / 64.0;
    base.push_back({0.0, rho_lo});
    std::vector<Panel> octaves;
    for (double b = rho_max; b > rho_lo; b *= 0.5) octaves.push_back({std::max(0.5 * b, rho_lo), b});
    std::reverse(octaves.begin(), octaves.end());
    for (const auto& o : octaves) refine_panel(weighted, o.a, o.b, panel_tol, 30, base);
    if (static_cast<int>(base.size()) > cfg.max_panels)
        fail(ErrorCode::TailNotConverged, "base quadrature exceeds max_panels");

    const auto& g = gl16();
    const double mu = 0.5 * n - 1.0;
    const double j0 = 1.0 / (std::pow(2.0, mu) * std::tgamma(mu + 1.0));
    cplx origin(0.0);
    for (const auto& pnl : base) origin += gl_panel(weighted, pnl.a, pnl.b);
    prof.origin = origin * j0;

    std::vector<double> nodes;
    std::vector<cplx> vals;
    std::size_t i = 0;
    while (i < radii.size()) {
        const double cap = std::exp2(std::ceil(std::log2(radii[i])));
        std::size_t j = i;
        while (j < radii.size() && radii[j] <= cap) ++j;

        // Panels no wider than half a period of the Bessel oscillation at x = cap.
        const double width = std::numbers::pi / cap;
        long long panels = 0;
        for (const auto& pnl : base)
            panels += std::max(1LL, static_cast<long long>(std::ceil((pnl.b - pnl.a) / width)));
        if (panels > cfg.max_panels)
            fail(ErrorCode::TailNotConverged, "oscillatory quadrature exceeds max_panels");
        nodes.clear();
        vals.clear();
        nodes.reserve(panels * kOrder);
        vals.reserve(panels * kOrder);
        for (const auto& pnl : base) {
            const long long k = std::max(1LL, static_cast<long long>(std::ceil((pnl.b - pnl.a) / width)));
            const double h = (pnl.b - pnl.a) / static_cast<double>(k);
            for (long long q = 0; q < k; ++q) {
                const double a = pnl.a + h * static_cast<double>(q);
                for (int r = 0; r < kOrder; ++r) {
                    const double x = a + 0.5 * h * (1.0 + g.x[r]);
                    nodes.push_back(x);
                    vals.push_back(weighted(x) * (0.5 * h * g.w[r]));
                }
            }
        }
        for (std::size_t r = i; r < j; ++r) {
            const double x = radii[r];
            cplx sum(0.0);
            for (std::size_t q = 0; q < nodes.size(); ++q) sum += vals[q] * kernel_bessel(n, nodes[q] * x);
            prof.values[r] = sum;
        }
        i = j;
    }
    return prof;
}

double radial_lq_norm(const RadialProfile& profile, double q) {
    if (!(q >= 1.0)) fail(ErrorCode::InvalidArgument, "q must be >= 1");
    const auto& r = profile.radii;
    const std::size_t len = r.size();
    if (len != profile.values.size()) fail(ErrorCode::ShapeMismatch, "radii and values differ in length");
    if (std::isinf(q)) {
        double m = std::abs(profile.origin);
        for (const auto& v : profile.values) m = std::max(m, std::abs(v));
        return m;
    }
    if (len < 2) fail(ErrorCode::InsufficientSamples, "profile needs at least two radii");

    const double n = profile.n;
    // h(r) = |K(r)|^q r^n is the integrand with respect to ln r.
    std::vector<double> h(len);
    for (std::size_t i = 0; i < len; ++i) h[i] = std::pow(std::abs(profile.values[i]), q) * std::pow(r[i], n);

    double inner = std::pow(std::abs(profile.origin), q) * std::pow(r[0], n) / n;
    double body = 0.0;
    for (std::size_t i = 1; i < len; ++i) body += 0.5 * (h[i] + h[i - 1]) * std::log(r[i] / r[i - 1]);
    double sum = inner + body;

    // Power-law fit over the last decade of radii, skipping samples at the
    // quadrature noise floor.
    const double r_end = r.back();
    const double floor = 10.0 * profile.truncation_bound;
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < len; ++i) {
        if (r[i] >= 0.1 * r_end && h[i] > 0.0 && std::abs(profile.values[i]) > floor) {
            lx.push_back(std::log(r[i]));
            ly.push_back(std::log(h[i]));
        }
    }
    double tail = 0.0;
    if (lx.size() >= 3) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        const double beta = -sxy / sxx;
        const double h_end = std::exp(my - beta * (std::log(r_end) - mx));
        if (!(beta > 0.1))
            fail(ErrorCode::TailNotConverged, "kernel tail is not integrable on the radial grid");
        else
            tail = h_end / beta;
    }
    if (tail > 0.05 * (sum + tail))
        fail(ErrorCode::TailNotConverged, "kernel tail beyond the radial grid exceeds 5% of the norm");
    sum += tail;
    return std::pow(sphere_area(profile.n) * sum, 1.0 / q);
}

std::vector<double> kernel_radii(const ModelParams& p, double t, int per_decade) {
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "kernel radii need t > 0");
    if (per_decade < 1) fail(ErrorCode::InvalidArgument, "per_decade must be >= 1");
    std::vector<double> scales;
    if (p.sigma1 > 0.0) scales.push_back(std::pow(t, 1.0 / (2.0 * p.sigma1)));
    scales.push_back(std::pow(t, 1.0 / (2.0 * (p.sigma - p.sigma1))));
    if (p.sigma2 < p.sigma) scales.push_back(std::pow(t, 1.0 / (2.0 * (p.sigma - p.sigma2))));
    scales.push_back(std::pow(t, 1.0 / (2.0 * p.sigma2)));
    const auto [lo, hi] = std::minmax_element(scales.begin(), scales.end());
    const double a = std::log10(1e-3 * *lo);
    const double b = std::log10(300.0 * *hi);
    const int count = static_cast<int>(std::ceil((b - a) * per_decade)) + 1;
    std::vector<double> out(count);
    for (int k = 0; k < count; ++k) out[k] = std::pow(10.0, a + (b - a) * k / (count - 1));
    return out;
}

RadialProfile kernel_profile(const ModelParams& p, const KernelRequest& req, const QuadratureConfig& cfg) {
    p.validate();
    if (!(req.t > 0.0)) fail(ErrorCode::InvalidArgument, "kernel profile needs t > 0");
    if (!(req.s >= 0.0)) fail(ErrorCode::InvalidArgument, "s must be >= 0");
    symbols::CutoffSpec spec;
    if (req.zone != symbols::Zone::All) {
        spec.eps_star = req.eps_star > 0.0 ? req.eps_star : symbols::epsilon_star(p);
        spec.validate();
    }
    const auto symbol = [&](double rho) -> cplx {
        const double w = symbols::zone_weight(spec, req.zone, rho);
        if (w == 0.0) return cplx(0.0);
        return w * symbols::multiplier(p, req.kind, rho, req.t);
    };
    const auto radii = kernel_radii(p, req.t, req.per_decade);
    return inverse_radial_fourier(symbol, p.n, req.s, radii, cfg);
}

}  // namespace dsig::radial
