#include "dsig/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dsig/error.hpp"

namespace dsig {

bool ModelParams::interior() const noexcept {
    return sigma1 > 0.0 && sigma2 < sigma;
}

void ModelParams::validate() const {
    if (!(std::isfinite(sigma) && std::isfinite(sigma1) && std::isfinite(sigma2) &&
          std::isfinite(mu1) && std::isfinite(mu2)))
        fail(ErrorCode::InvalidParams, "model parameters must be finite");
    if (sigma < 1.0) fail(ErrorCode::InvalidParams, "sigma must be >= 1");
    if (!(sigma1 >= 0.0 && sigma1 < sigma / 2.0))
        fail(ErrorCode::InvalidParams, "sigma1 must lie in [0, sigma/2)");
    if (!(sigma2 > sigma / 2.0 && sigma2 <= sigma))
        fail(ErrorCode::InvalidParams, "sigma2 must lie in (sigma/2, sigma]");
    if (!(mu1 > 0.0 && mu2 > 0.0)) fail(ErrorCode::InvalidParams, "mu1 and mu2 must be positive");
    if (n < 1) fail(ErrorCode::InvalidParams, "dimension n must be >= 1");
}

namespace symbols {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::RealDistinct: return "real";
        case Regime::ComplexPair: return "complex";
        case Regime::Degenerate: return "degenerate";
    }
    return "?";
}

double damping(const ModelParams& p, double rho) {
    return p.mu1 * std::pow(rho, 2.0 * p.sigma1) + p.mu2 * std::pow(rho, 2.0 * p.sigma2);
}

double stiffness(const ModelParams& p, double rho) {
    return std::pow(rho, 2.0 * p.sigma);
}

double discriminant(const ModelParams& p, double rho) {
    const double b = damping(p, rho);
    return b * b - 4.0 * stiffness(p, rho);
}

double discriminant_log_margin(const ModelParams& p, double rho) {
    const double b = damping(p, rho);
    if (rho == 0.0) return b == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    // sign(b² − 4ρ^{2σ}) = sign(ln b − ln 2 − σ ln ρ)
    return std::log(b) - std::log(2.0) - p.sigma * std::log(rho);
}

CharRoots characteristic_roots(const ModelParams& p, double rho) {
    const double b = damping(p, rho);
    const double c = stiffness(p, rho);
    const double half_b = 0.5 * b;
    if (b == 0.0) {
        // Only reachable at ρ = 0 with σ1 > 0; then c = 0 as well.
        return {cplx(0.0), cplx(0.0), Regime::Degenerate};
    }
    // r = 4c/b² evaluated in log space so that extreme ρ cannot overflow.
    const double r = c == 0.0 ? 0.0 : std::exp(std::log(4.0) + std::log(c) - 2.0 * std::log(b));
    if (std::abs(1.0 - r) <= kDegenerateBand) {
        return {cplx(-half_b), cplx(-half_b), Regime::Degenerate};
    }
    if (r < 1.0) {
        const double root = std::sqrt(1.0 - r);
        // Larger-magnitude root directly, the other through λ1 λ2 = c.
        const double lambda2 = -half_b * (1.0 + root);
        const double lambda1 = -half_b * r / (1.0 + root);
        return {cplx(lambda1), cplx(lambda2), Regime::RealDistinct};
    }
    const double omega = half_b * std::sqrt(r - 1.0);
    return {cplx(-half_b, omega), cplx(-half_b, -omega), Regime::ComplexPair};
}

namespace {

// Bisect the sign change of the log margin in log ρ; `pos` has margin > 0,
// `neg` has margin <= 0. Returns the positive-side endpoint.
double bisect_margin(const ModelParams& p, double pos, double neg) {
    double a = std::log(pos);
    double z = std::log(neg);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + z);
        if (discriminant_log_margin(p, std::exp(mid)) > 0.0)
            a = mid;
        else
            z = mid;
        if (std::abs(std::exp(a) - std::exp(z)) <= 1e-12 * std::exp(a)) break;
    }
    return std::exp(a);
}

}  // namespace

double epsilon_star(const ModelParams& p) {
    if (!(p.mu1 > 0.0 && p.mu2 > 0.0))
        fail(ErrorCode::InvalidParams, "mu1 and mu2 must be positive");
    constexpr int kPerDecade = 512;
    constexpr int kLoDecade = -10;
    constexpr int kHiDecade = 10;
    const int count = (kHiDecade - kLoDecade) * kPerDecade + 1;

    std::vector<double> rho(count);
    std::vector<double> margin(count);
    for (int k = 0; k < count; ++k) {
        rho[k] = std::pow(10.0, kLoDecade + static_cast<double>(k) / kPerDecade);
        margin[k] = discriminant_log_margin(p, rho[k]);
    }
    if (!(margin.front() > 0.0) || !(margin.back() > 0.0))
        fail(ErrorCode::NoRealRootTail,
             "discriminant is not eventually positive as rho -> 0 or rho -> infinity");

    int first = -1;
    int last = -1;
    for (int k = 0; k < count; ++k) {
        if (!(margin[k] > 0.0)) {
            if (first < 0) first = k;
            last = k;
        }
    }
    if (first < 0) return 0.5;
    const double lo = bisect_margin(p, rho[first - 1], rho[first]);
    const double hi = bisect_margin(p, rho[last + 1], rho[last]);
    return std::min({0.5, lo, 1.0 / hi});
}

void CutoffSpec::validate() const {
    if (!(eps_star > 0.0 && eps_star <= 0.5))
        fail(ErrorCode::InvalidArgument, "eps_star must lie in (0, 1/2]");
}

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

CutoffWeights cutoff_weights(const CutoffSpec& spec, double rho) {
    const double e = spec.eps_star;
    const double low = 1.0 - smooth_step((rho - 0.5 * e) / (0.5 * e));
    const double high = smooth_step((rho - 1.0 / e) / (1.0 / e));
    // χ_L and χ_H have disjoint supports for ε ≤ 1/2, so the middle weight
    // stays in [0, 1].
    return {low, 1.0 - low - high, high};
}

double zone_weight(const CutoffSpec& spec, Zone zone, double rho) {
    if (zone == Zone::All) return 1.0;
    const auto w = cutoff_weights(spec, rho);
    switch (zone) {
        case Zone::Low: return w.low;
        case Zone::Mid: return w.mid;
        case Zone::High: return w.high;
        default: return 1.0;
    }
}

std::string to_string(MultiplierKind k) {
    switch (k) {
        case MultiplierKind::K0: return "K0";
        case MultiplierKind::K1: return "K1";
        case MultiplierKind::DtK0: return "DtK0";
        case MultiplierKind::DtK1: return "DtK1";
    }
    return "?";
}

MultiplierKind multiplier_kind_from_string(const std::string& s) {
    if (s == "K0") return MultiplierKind::K0;
    if (s == "K1") return MultiplierKind::K1;
    if (s == "DtK0") return MultiplierKind::DtK0;
    if (s == "DtK1") return MultiplierKind::DtK1;
    fail(ErrorCode::InvalidArgument, "unknown multiplier kind '" + s + "'");
}

cplx MultiplierSet::get(MultiplierKind kind) const {
    switch (kind) {
        case MultiplierKind::K0: return k0;
        case MultiplierKind::K1: return k1;
        case MultiplierKind::DtK0: return dt_k0;
        case MultiplierKind::DtK1: return dt_k1;
    }
    return k0;
}

cplx phi1(cplx z) {
    if (std::abs(z) < 0.4) {
        // Σ z^k/(k+1)!, 0.4^20/21! is far below roundoff.
        cplx term(1.0);
        cplx sum(1.0);
        for (int k = 1; k < 20; ++k) {
            term *= z / static_cast<double>(k + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

MultiplierSet multipliers(const ModelParams& p, const CharRoots& roots, double rho, double t) {
    if (t == 0.0) return {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)};
    const double b = damping(p, rho);
    const double c = stiffness(p, rho);
    const cplx l1 = roots.lambda1;
    const cplx l2 = roots.lambda2;
    const cplx d = l1 - l2;
    const double scale = std::max({std::abs(l1), std::abs(l2), 1.0});

    MultiplierSet m;
    if (std::abs(d) < kDegenerateSwitch * scale) {
        const cplx lam = 0.5 * (l1 + l2);
        const cplx e = std::exp(lam * t);
        m.k1 = t * e;
        m.k0 = e * (1.0 - lam * t);
        m.dt_k0 = -c * m.k1;
        m.dt_k1 = m.k0 - b * m.k1;
        return m;
    }
    // K̂1 = t e^{λ1 t} ∫_0^1 e^{θ t (λ2 − λ1)} dθ; Re(λ2 − λ1) ≤ 0 keeps
    // every exponential bounded.
    const cplx e1 = std::exp(l1 * t);
    m.k1 = t * e1 * phi1((l2 - l1) * t);
    m.k0 = e1 - l1 * m.k1;
    m.dt_k0 = -c * m.k1;
    if (roots.regime == Regime::RealDistinct &&
        std::abs(d) >= 0.5 * std::max(std::abs(l1), std::abs(l2))) {
        m.dt_k1 = (l1 * e1 - l2 * std::exp(l2 * t)) / d;
    } else {
        m.dt_k1 = e1 + l2 * m.k1;
    }
    return m;
}

MultiplierSet multipliers(const ModelParams& p, double rho, double t) {
    return multipliers(p, characteristic_roots(p, rho), rho, t);
}

cplx multiplier(const ModelParams& p, MultiplierKind kind, double rho, double t) {
    return multipliers(p, rho, t).get(kind);
}

}  // namespace symbols
}  // namespace dsig
