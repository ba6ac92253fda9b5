#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dsig/error.hpp"
#include "dsig/radial.hpp"

namespace dsig::radial {

namespace {

// Below this argument the power series is used; its worst cancellation
// (max term ≈ 2e5 at x = 16) stays below 1e-13 in long double, while the
// Hankel expansion above it is accurate to e^{-2x}.
constexpr double kSeriesLimit = 16.0;

void check_order(double mu) {
    if (mu < -0.5) fail(ErrorCode::UnsupportedOrder, "Bessel order below -1/2 is not supported");
    const double twice = 2.0 * mu;
    if (twice != std::floor(twice))
        fail(ErrorCode::UnsupportedOrder, "Bessel order must be an integer or half-integer");
}

// Σ_k (−1)^k (x/2)^{2k} / (k! Γ(k+μ+1)) = J_μ(x) / (x/2)^μ.
long double series_scaled(double mu, double x) {
    const long double q = 0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L / std::tgamma(static_cast<long double>(mu) + 1.0L);
    long double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<long double>(k) * (k + mu));
        sum += term;
        if (std::fabs(term) < 1e-21L * std::fabs(sum) && k > q) break;
    }
    return sum;
}

// Hankel asymptotic expansion of J_ν(x), x > kSeriesLimit.
double hankel_asymptotic(double nu, double x) {
    const double mu4 = 4.0 * nu * nu;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu4 - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(term);
        if (mag > last) break;  // asymptotic series starts diverging
        last = mag;
        // a_k/x^k alternates between Q (odd k) and P (even k) with sign (−1)^{⌊k/2⌋}
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 1)
            q += sign * term;
        else
            p += sign * term;
        if (mag < 1e-17) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// J_{ν0}(x), J_{ν0+1}(x) for the base order ν0 ∈ {0, −1/2}.
void base_pair(bool half, double x, double& j0, double& j1) {
    if (half) {
        const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
        j0 = amp * std::cos(x);
        j1 = amp * std::sin(x);
    } else {
        j0 = hankel_asymptotic(0.0, x);
        j1 = hankel_asymptotic(1.0, x);
    }
}

double large_argument(double mu, double x) {
    const bool half = std::floor(mu) != mu;
    const double nu0 = half ? -0.5 : 0.0;
    double j0 = 0.0;
    double j1 = 0.0;
    base_pair(half, x, j0, j1);
    const int steps = static_cast<int>(std::lround(mu - nu0));
    if (steps == 0) return j0;
    if (steps == 1) return j1;
    if (mu <= x) {
        // Upward recurrence is stable while the order stays below x.
        double prev = j0;
        double cur = j1;
        for (int k = 1; k < steps; ++k) {
            const double nu = nu0 + k;
            const double next = (2.0 * nu / x) * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    // Miller's downward recurrence from well above max(μ, x), normalized
    // against whichever base value is larger in magnitude.
    const int top = steps + 30 + static_cast<int>(x);
    double above = 0.0;
    double cur = 1e-300;
    double at_mu = 0.0;
    double at0 = 0.0;
    double at1 = 0.0;
    for (int k = top; k >= 1; --k) {
        const double nu = nu0 + k;
        const double below = (2.0 * nu / x) * cur - above;
        above = cur;
        cur = below;
        if (std::abs(cur) > 1e250) {
            above *= 1e-250;
            cur *= 1e-250;
            at_mu *= 1e-250;
            at1 *= 1e-250;
            at0 *= 1e-250;
        }
        if (k - 1 == steps) at_mu = cur;
        if (k - 1 == 1) at1 = cur;
        if (k - 1 == 0) at0 = cur;
    }
    return std::abs(j0) >= std::abs(j1) ? at_mu * (j0 / at0) : at_mu * (j1 / at1);
}

}  // namespace

double bessel_j(double mu, double x) {
    check_order(mu);
    if (!(x >= 0.0)) fail(ErrorCode::InvalidArgument, "Bessel argument must be non-negative");
    if (x == 0.0) {
        if (mu == 0.0) return 1.0;
        if (mu > 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();  // J_{-1/2}(0)
    }
    if (mu == -0.5) return std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x);
    if (mu == 0.5) return std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x);
    if (x <= kSeriesLimit) {
        return static_cast<double>(series_scaled(mu, x) *
                                   std::pow(0.5L * static_cast<long double>(x), mu));
    }
    return large_argument(mu, x);
}

double bessel_j_tilde(double mu, double x) {
    check_order(mu);
    if (!(x >= 0.0)) fail(ErrorCode::InvalidArgument, "Bessel argument must be non-negative");
    if (x <= kSeriesLimit) return static_cast<double>(series_scaled(mu, x) * std::pow(0.5L, mu));
    return large_argument(mu, x) / std::pow(x, mu);
}

}  // namespace dsig::radial
