#ifndef DSIG_RADIAL_HPP
#define DSIG_RADIAL_HPP

// Bessel functions and radial inverse Fourier transforms.
//
// For a radial symbol m(|ξ|) on R^n the unitary inverse transform is
//
//   F^{-1}(m)(x) = ∫_0^∞ m(ρ) ρ^{n-1} J̃_{n/2-1}(ρ|x|) dρ,   J̃_μ(s) = J_μ(s)/s^μ,
//
// so the (2π)^{-n/2} prefactor of the Cartesian form is absorbed exactly by
// the angular integral and no further constant appears here.

#include <functional>
#include <span>
#include <vector>

#include "dsig/symbols.hpp"

namespace dsig::radial {

/// J_μ(x) for integer or half-integer μ ≥ −1/2 and x ≥ 0.
double bessel_j(double mu, double x);

/// J_μ(x)/x^μ, with J̃_μ(0) = 1/(2^μ Γ(μ+1)).
double bessel_j_tilde(double mu, double x);

/// α = (1/π)∫_0^π cos(τ − sin τ) dτ, by adaptive Gauss-Legendre quadrature.
double lemma_b1_alpha();

/// Adaptive Gauss-Legendre (16-point panels, bisection refinement) on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 40);

struct QuadratureConfig {
    /// Relative truncation tolerance for the frequency tail and the
    /// per-panel refinement.
    double tolerance = 1e-10;
    /// Upper bound on Gauss-Legendre panels in any single node set.
    int max_panels = 400000;

    void validate() const;
};

enum class FourierConvention { Unitary };

struct RadialProfile {
    int n = 1;
    std::vector<double> radii;
    std::vector<cplx> values;
    /// Kernel value at x = 0 from direct (non-oscillatory) quadrature.
    cplx origin{0.0, 0.0};
    /// Largest frequency kept after tail truncation.
    double rho_max = 0.0;
    /// tolerance × ∫|m| ρ^{n-1+s} dρ; a bound on the dropped frequency tail.
    double truncation_bound = 0.0;
    FourierConvention convention = FourierConvention::Unitary;
};

using RadialSymbol = std::function<cplx(double)>;

/// Evaluates x ↦ ∫ m(ρ) ρ^{s_weight} ρ^{n-1} J̃_{n/2-1}(ρ|x|) dρ at every
/// radius. Gauss-Legendre 16-point panels no wider than half a Bessel period
/// at the largest radius of each octave. Throws TailNotConverged if the
/// symbol envelope does not drop below tolerance by ρ = 1e8 or a node set
/// would need more than cfg.max_panels panels.
RadialProfile inverse_radial_fourier(const RadialSymbol& symbol, int n, double s_weight,
                                     std::span<const double> radii, const QuadratureConfig& cfg);

/// (|S^{n-1}| ∫ |K(r)|^q r^{n-1} dr)^{1/q} on the profile's log grid, with
/// the ball inside the first radius filled from the origin value and a
/// power-law tail beyond the last radius; q = ∞ gives the maximum modulus.
/// Throws TailNotConverged if the tail is not integrable or exceeds 5% of
/// the total.
double radial_lq_norm(const RadialProfile& profile, double q);

/// Surface area of the unit sphere S^{n-1}.
double sphere_area(int n);

/// Length scales t^{1/(2σ1)}, t^{1/(2(σ−σ1))}, t^{1/(2(σ−σ2))},
/// t^{1/(2σ2)} the kernels live on; the default radial grid spans
/// [1e-3 min, 300 max] at `per_decade` log-spaced points.
std::vector<double> kernel_radii(const ModelParams& p, double t, int per_decade = 64);

struct KernelRequest {
    symbols::MultiplierKind kind = symbols::MultiplierKind::K1;
    double t = 1.0;
    double s = 0.0;
    symbols::Zone zone = symbols::Zone::All;
    /// Only consulted when zone != All; 0 means compute ε* from the params.
    double eps_star = 0.0;
    int per_decade = 64;
};

/// F^{-1}(|ξ|^s · m_kind(t, |ξ|) · χ_zone(|ξ|)) on the default radial grid.
RadialProfile kernel_profile(const ModelParams& p, const KernelRequest& req,
                             const QuadratureConfig& cfg = {});

}  // namespace dsig::radial

#endif
