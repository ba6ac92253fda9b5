#include "dsig/rates.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "dsig/error.hpp"

namespace dsig::rates {

std::string to_string(TheoremCase c) {
    switch (c) {
        case TheoremCase::T1: return "T1";
        case TheoremCase::T2: return "T2";
        case TheoremCase::T3: return "T3";
        case TheoremCase::T4: return "T4";
    }
    return "?";
}

TheoremCase theorem_case_from_string(const std::string& s) {
    if (s == "T1") return TheoremCase::T1;
    if (s == "T2") return TheoremCase::T2;
    if (s == "T3") return TheoremCase::T3;
    if (s == "T4") return TheoremCase::T4;
    fail(ErrorCode::InvalidQuery, "unknown theorem case '" + s + "'");
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TheoremCase classify(const ModelParams& params, double s) {
    const double two_s2 = 2.0 * params.sigma2;
    if (near(s, two_s2)) return TheoremCase::T2;
    return s < two_s2 ? TheoremCase::T1 : TheoremCase::T3;
}

double RateQuery::effective_s() const {
    return theorem_case == TheoremCase::T4 ? 2.0 * params.sigma2 : s;
}

void RateQuery::validate() const {
    try {
        params.validate();
    } catch (const Error& e) {
        fail(ErrorCode::InvalidQuery, e.what());
    }
    if (!(m >= 1.0)) fail(ErrorCode::InvalidQuery, "m must be >= 1");
    if (!(q > 1.0) || !std::isfinite(q)) fail(ErrorCode::InvalidQuery, "q must lie in (1, inf)");
    if (!(m < q)) fail(ErrorCode::InvalidQuery, "m must be strictly below q");
    if (!(p > 1.0)) fail(ErrorCode::InvalidQuery, "p must exceed 1");
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidQuery, "s must be >= 0");
    if (theorem_case == TheoremCase::T4) {
        if (!(a >= 0.0 && a < params.sigma - params.sigma2))
            fail(ErrorCode::InvalidQuery, "T4 requires 0 <= a < sigma - sigma2");
    } else {
        if (a != 0.0) fail(ErrorCode::InvalidQuery, "a must be 0 outside case T4");
        if (classify(params, s) != theorem_case)
            fail(ErrorCode::InvalidQuery, "theorem case " + to_string(theorem_case) + " does not match s");
    }
}

bool Interval::empty() const {
    if (lo < hi) return false;
    return !(lo == hi && lo_closed && hi_closed);
}

bool Interval::contains(double x) const {
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

double ceil_exact(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return r;
    return std::ceil(x);
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

double bracket_gamma(const RateQuery& q) {
    const auto& P = q.params;
    switch (q.theorem_case) {
        case TheoremCase::T1: return positive_part(q.s - P.sigma + P.sigma2);
        case TheoremCase::T2:
        case TheoremCase::T4: return 3.0 * P.sigma2 - P.sigma;
        case TheoremCase::T3: return q.s - P.sigma + P.sigma2;
    }
    return 0.0;
}

std::map<std::string, double> solution_decay_exponents(const RateQuery& q) {
    q.validate();
    const auto& P = q.params;
    const double d1 = 2.0 * (P.sigma - P.sigma1);
    const double s = q.effective_s();
    const double base = 1.0 - (P.n / d1) * (1.0 / q.m - 1.0 / q.q);
    std::map<std::string, double> out;
    out["u_Lq"] = base;
    out["Dsu_Lq"] = base - s / d1;
    if (q.theorem_case != TheoremCase::T1) out["ut_Lq"] = base - P.sigma1 / (P.sigma - P.sigma1);
    if (q.theorem_case == TheoremCase::T3)
        out["Dsut_Lq"] = base - s / d1 + (P.sigma2 - P.sigma1) / (P.sigma - P.sigma1);
    return out;
}

std::pair<double, double> kernel_norm_exponents(const ModelParams& params, symbols::MultiplierKind kind,
                                                double r, double s) {
    params.validate();
    if (!(r >= 1.0)) fail(ErrorCode::InvalidArgument, "r must be >= 1");
    if (!(s >= 0.0)) fail(ErrorCode::InvalidArgument, "s must be >= 0");
    const double frac = std::isinf(r) ? 1.0 : 1.0 - 1.0 / r;
    const auto exponent = [&](double sig_k) {
        const double d = 2.0 * (params.sigma - sig_k);
        const double alpha = (params.n / d) * frac;
        switch (kind) {
            case symbols::MultiplierKind::K0: return -alpha - s / d;
            case symbols::MultiplierKind::K1: return -alpha - s / d + 1.0;
            case symbols::MultiplierKind::DtK0: return -alpha - (s + 2.0 * params.sigma) / d + 1.0;
            case symbols::MultiplierKind::DtK1: return -alpha - (s + 2.0 * sig_k) / d + 1.0;
        }
        return 0.0;
    };
    return {exponent(params.sigma2), exponent(params.sigma1)};
}

namespace {

// Intersects `iv` with (x, ∞) or [x, ∞).
void raise_lower(Interval& iv, double x, bool closed) {
    if (x > iv.lo || (x == iv.lo && !closed)) {
        iv.lo_closed = x > iv.lo ? closed : false;
        iv.lo = x;
    }
}

void lower_upper(Interval& iv, double x, bool closed) {
    if (x < iv.hi || (x == iv.hi && !closed)) {
        iv.hi_closed = x < iv.hi ? closed : false;
        iv.hi = x;
    }
}

}  // namespace

AdmissibleReport admissible_exponents(const RateQuery& q) {
    q.validate();
    const auto& P = q.params;
    const double n = P.n;
    const double m = q.m;
    const double qq = q.q;
    const double d = 2.0 * m * (P.sigma - P.sigma1);
    const bool t4 = q.theorem_case == TheoremCase::T4;
    const double ma = t4 ? m * q.a : 0.0;
    // Regularity in the bracket: s, or 2σ2 − a for T4.
    const double sb = t4 ? 2.0 * P.sigma2 - q.a : q.s;
    const double gamma = bracket_gamma(q);

    AdmissibleReport rep;
    rep.theorem_case = q.theorem_case;
    Interval& iv = rep.p_interval;
    iv = Interval{1.0, std::numeric_limits<double>::infinity(), false, false};

    raise_lower(iv, 1.0 + ceil_exact(gamma), false);

    const double dim_floor = d - ma;
    const bool dim_ok = n > dim_floor;
    if (!dim_ok) rep.violations.push_back("dimension lower bound");
    const double numer = q.theorem_case == TheoremCase::T3 ? std::max(m * q.s, 2.0 * d) : 2.0 * d;
    if (dim_ok) raise_lower(iv, 1.0 + numer / (n - d + ma), false);
    else iv.hi = iv.lo;  // empty

    const double window_hi = (qq * qq * sb - qq * m * gamma) / (qq - m);
    rep.n_window = Interval{dim_floor, std::max(window_hi, qq * sb), false, true};
    raise_lower(iv, qq / m, true);
    if (n <= qq * sb) {
        // p ∈ [q/m, ∞)
    } else if (n <= window_hi) {
        lower_upper(iv, (n - qq * gamma) / (n - qq * sb), true);
    } else {
        rep.violations.push_back("dimension window");
        iv.hi = iv.lo;
        iv.hi_closed = false;
    }
    if (dim_ok && rep.violations.empty() && iv.empty()) rep.violations.push_back("empty p interval");
    if (rep.violations.empty() && !iv.contains(q.p)) rep.violations.push_back("p outside admissible interval");
    rep.feasible = rep.violations.empty();
    return rep;
}

GnResult gn_theta(int n, double s, double sigma_gn, double p_target, double p0, double p1) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "n must be >= 1");
    for (double v : {p_target, p0, p1})
        if (!(v > 1.0) || !std::isfinite(v)) fail(ErrorCode::InvalidArgument, "Lebesgue exponents must lie in (1, inf)");
    if (!(s >= 0.0 && s <= sigma_gn)) fail(ErrorCode::InvalidArgument, "s must lie in [0, sigma]");
    const double den = 1.0 / p0 - 1.0 / p1 + sigma_gn / n;
    if (den == 0.0) fail(ErrorCode::DegenerateDenominator, "1/p0 - 1/p1 + sigma/n vanishes");
    const double theta = (1.0 / p0 - 1.0 / p_target + s / n) / den;
    return {theta, s / sigma_gn <= theta && theta <= 1.0};
}

std::string to_string(DataVariant v) {
    return v == DataVariant::ShiftedSigma ? "shifted_sigma" : "twice_sigma2";
}

DataVariant data_variant_from_string(const std::string& s) {
    if (s == "shifted_sigma") return DataVariant::ShiftedSigma;
    if (s == "twice_sigma2") return DataVariant::TwiceSigma2;
    fail(ErrorCode::InvalidArgument, "unknown data variant '" + s + "'");
}

double u1_smoothness(const RateQuery& q, DataVariant v) {
    const double s = q.effective_s();
    const auto& P = q.params;
    return v == DataVariant::ShiftedSigma ? positive_part(s - P.sigma + P.sigma2)
                                          : positive_part(s - 2.0 * P.sigma2);
}

std::string report_json(const RateQuery& q, const AdmissibleReport& r,
                        const std::map<std::string, double>& exponents) {
    using json = nlohmann::ordered_json;
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["theorem_case"] = to_string(q.theorem_case);
    j["feasible"] = r.feasible;
    j["p"] = q.p;
    j["p_min"] = num(r.p_interval.lo);
    j["p_max"] = num(r.p_interval.hi);
    j["p_min_closed"] = r.p_interval.lo_closed;
    j["p_max_closed"] = r.p_interval.hi_closed;
    j["n_min"] = num(r.n_window.lo);
    j["n_max"] = num(r.n_window.hi);
    j["violations"] = r.violations;
    json e = json::object();
    for (const auto& [k, v] : exponents) e[k] = v;
    j["exponents"] = e;
    return j.dump(2);
}

}  // namespace dsig::rates
