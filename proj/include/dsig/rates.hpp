#ifndef DSIG_RATES_HPP
#define DSIG_RATES_HPP

// Closed-form decay exponents and hypothesis brackets for the semilinear
// problem with |u|^p (cases T1-T3, split by s against 2σ2) and ||D|^a u|^p
// (case T4).

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dsig/symbols.hpp"

namespace dsig::rates {

enum class TheoremCase { T1, T2, T3, T4 };

std::string to_string(TheoremCase c);
TheoremCase theorem_case_from_string(const std::string& s);

/// T1 for s < 2σ2, T2 for s = 2σ2 (to 1e-12 relative), T3 otherwise.
TheoremCase classify(const ModelParams& params, double s);

struct RateQuery {
    ModelParams params;
    double m = 1.0;
    double q = 2.0;
    double s = 0.0;
    double p = 2.0;
    double a = 0.0;
    TheoremCase theorem_case = TheoremCase::T1;

    /// Regularity index of the data and of |D|^s u: s for T1-T3, 2σ2 for T4.
    double effective_s() const;

    /// Throws InvalidQuery unless 1 ≤ m < q < ∞, p > 1, s ≥ 0, the case
    /// tag agrees with s (T1-T3), and 0 ≤ a < σ − σ2 (T4).
    void validate() const;
};

struct Interval {
    double lo = 1.0;
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;
    bool hi_closed = false;

    bool empty() const;
    bool contains(double x) const;
};

struct AdmissibleReport {
    TheoremCase theorem_case = TheoremCase::T1;
    bool feasible = false;
    /// Intersection of every p-constraint of the case.
    Interval p_interval;
    /// Interval of n for which the bracket conditions can hold.
    Interval n_window;
    /// Named failed conditions, including "p outside admissible interval"
    /// when the query's own p misses p_interval.
    std::vector<std::string> violations;
};

/// ⌈x⌉ = min{k ∈ Z : k ≥ x}, robust to x within 1e-12 of an integer.
double ceil_exact(double x);
/// [x]⁺ = max(x, 0).
double positive_part(double x);

/// Smoothness index γ entering the smoothness and bracket conditions:
/// [s−σ+σ2]⁺ (T1), 3σ2−σ (T2, T4), s−σ+σ2 (T3).
double bracket_gamma(const RateQuery& q);

/// Exponents of (1+t) per channel: u_Lq, Dsu_Lq, and per case ut_Lq and
/// Dsut_Lq (T2/T4 add ut_Lq, T3 adds both).
std::map<std::string, double> solution_decay_exponents(const RateQuery& q);

/// (small-t exponent on (0,1], large-t exponent on [1,∞)) of
/// ‖F^{-1}(|ξ|^s K̂_kind(t))‖_{L^r}.
std::pair<double, double> kernel_norm_exponents(const ModelParams& params, symbols::MultiplierKind kind,
                                                double r, double s);

AdmissibleReport admissible_exponents(const RateQuery& q);

struct GnResult {
    double theta;
    bool admissible;
};

/// θ = (1/p0 − 1/p + s/n)/(1/p0 − 1/p1 + σ/n); admissible iff s/σ ≤ θ ≤ 1.
/// Throws DegenerateDenominator when the denominator vanishes.
GnResult gn_theta(int n, double s, double sigma_gn, double p_target, double p0, double p1);

/// Which smoothness the u1 component of the data norm carries.
enum class DataVariant { ShiftedSigma, TwiceSigma2 };

std::string to_string(DataVariant v);
DataVariant data_variant_from_string(const std::string& s);

/// [s−σ+σ2]⁺ (ShiftedSigma) or [s−2σ2]⁺ (TwiceSigma2), with s = effective_s().
double u1_smoothness(const RateQuery& q, DataVariant v);

/// {feasible, theorem_case, p_min, p_max (null when unbounded),
/// p_min_closed, p_max_closed, n_min, n_max, violations[], exponents{}}.
std::string report_json(const RateQuery& q, const AdmissibleReport& r,
                        const std::map<std::string, double>& exponents);

}  // namespace dsig::rates

#endif
