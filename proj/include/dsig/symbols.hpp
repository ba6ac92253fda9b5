#ifndef DSIG_SYMBOLS_HPP
#define DSIG_SYMBOLS_HPP

// Fourier-side theory of
//   u_tt + (-Δ)^σ u + μ1 (-Δ)^σ1 u_t + μ2 (-Δ)^σ2 u_t = 0.
// At radial frequency ρ every mode solves
//   w'' + b(ρ) w' + c(ρ) w = 0,  b = μ1 ρ^{2σ1} + μ2 ρ^{2σ2},  c = ρ^{2σ},
// whose characteristic roots and fundamental solutions live here.

#include <array>
#include <complex>
#include <string>

namespace dsig {

using cplx = std::complex<double>;

struct ModelParams {
    double sigma = 2.0;
    double sigma1 = 0.5;
    double sigma2 = 1.5;
    double mu1 = 1.0;
    double mu2 = 1.0;
    int n = 1;

    /// Strict interior 0 < σ1 < σ/2 < σ2 < σ (the boundary values σ1 = 0
    /// and σ2 = σ pass validate() but are reported here).
    bool interior() const noexcept;

    /// Throws InvalidParams unless σ ≥ 1, 0 ≤ σ1 < σ/2 < σ2 ≤ σ,
    /// μ1, μ2 > 0 and n ≥ 1.
    void validate() const;

    /// Reference set used throughout the tests: σ=2, σ1=1/2, σ2=3/2, μ1=μ2=1.
    static ModelParams reference(int n = 1) { return ModelParams{2.0, 0.5, 1.5, 1.0, 1.0, n}; }
};

namespace symbols {

enum class Regime { RealDistinct, ComplexPair, Degenerate };

std::string to_string(Regime r);

/// λ1 is the "+" branch; in the real regime it is the slowly decaying mode.
struct CharRoots {
    cplx lambda1;
    cplx lambda2;
    Regime regime;
};

/// Damping coefficient b(ρ) = μ1 ρ^{2σ1} + μ2 ρ^{2σ2}.
double damping(const ModelParams& p, double rho);

/// Stiffness c(ρ) = ρ^{2σ}.
double stiffness(const ModelParams& p, double rho);

/// b(ρ)^2 − 4 ρ^{2σ}. Positive: two real roots. Negative: complex pair.
double discriminant(const ModelParams& p, double rho);

/// ln b² − ln 4c, the sign of the discriminant computed without overflow.
/// +inf at ρ = 0 when b(0) > 0, NaN when both vanish.
double discriminant_log_margin(const ModelParams& p, double rho);

/// Relative band |D| ≤ kDegenerateBand · b² tags the double-root locus.
inline constexpr double kDegenerateBand = 1e-12;

CharRoots characteristic_roots(const ModelParams& p, double rho);

/// Largest ε ≤ 1/2 such that the discriminant is positive on (0, ε] and on
/// [1/ε, ∞). Log scan at 512 points per decade over [1e-10, 1e10] with
/// bisection refinement. Throws NoRealRootTail if the discriminant is not
/// positive at both ends of the scan.
double epsilon_star(const ModelParams& p);

struct CutoffSpec {
    double eps_star = 0.5;

    void validate() const;
};

struct CutoffWeights {
    double low;
    double mid;
    double high;
};

/// C^∞ step rising from 0 at x ≤ 0 to 1 at x ≥ 1.
double smooth_step(double x);

/// χ_L, χ_M, χ_H: partition of unity with χ_L = 1 on [0, ε/2], χ_L = 0 on
/// [ε, ∞), χ_H = 1 on [2/ε, ∞), χ_H = 0 on [0, 1/ε].
CutoffWeights cutoff_weights(const CutoffSpec& spec, double rho);

enum class Zone { All, Low, Mid, High };

double zone_weight(const CutoffSpec& spec, Zone zone, double rho);

enum class MultiplierKind { K0, K1, DtK0, DtK1 };

std::string to_string(MultiplierKind k);
MultiplierKind multiplier_kind_from_string(const std::string& s);

/// |λ1 − λ2| below this fraction of max(|λ1|, |λ2|, 1) switches to the
/// repeated-root limits K̂0 = e^{λt}(1 − λt), K̂1 = t e^{λt}.
inline constexpr double kDegenerateSwitch = 1e-8;

/// All four fundamental-solution multipliers at one (ρ, t).
struct MultiplierSet {
    cplx k0;
    cplx k1;
    cplx dt_k0;
    cplx dt_k1;

    cplx get(MultiplierKind kind) const;
};

MultiplierSet multipliers(const ModelParams& p, double rho, double t);

/// Same, reusing roots computed by the caller.
MultiplierSet multipliers(const ModelParams& p, const CharRoots& roots, double rho, double t);

cplx multiplier(const ModelParams& p, MultiplierKind kind, double rho, double t);

/// (e^z − 1)/z with the removable singularity at z = 0 filled in.
cplx phi1(cplx z);

}  // namespace symbols
}  // namespace dsig

#endif
