// Acceptance checks 1-10. With no arguments every criterion runs; numeric
// arguments select a subset. One PASS/FAIL line per criterion; exit status
// is 0 iff every selected criterion passes.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "dsig/error.hpp"
#include "dsig/evolution.hpp"
#include "dsig/grid.hpp"
#include "dsig/harness.hpp"
#include "dsig/radial.hpp"
#include "dsig/rates.hpp"
#include "dsig/symbols.hpp"
#include "rate_oracle.hpp"

#ifndef DSIG_SOURCE_DIR
#define DSIG_SOURCE_DIR "."
#endif

using namespace dsig;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string ref_config(const std::string& name) {
    return std::string(DSIG_SOURCE_DIR) + "/configs/reference/" + name + ".cfg";
}

harness::ExperimentResult run_reference(const std::string& name) {
    return harness::run_experiment(harness::ExperimentConfig::from_config(harness::Config::load(ref_config(name))));
}

std::string describe(const harness::ExperimentResult& r) {
    if (!r.fit) return r.name + ": " + r.status + " (" + r.message + ")";
    return r.name + " slope " + num(r.fit->slope) + " vs " + num(r.predicted) + " R2 " + num(r.fit->r_squared);
}

double max_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

FieldState gaussian(const GridSpec& g, double amp, double width) {
    auto st = FieldState::zeros(g);
    st.u = grid::sample(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return amp * std::exp(-r2 / (2 * width * width));
    });
    return st;
}

// ---------------------------------------------------------------- criteria

void roots_algebra(Outcome& o) {
    const auto p = ModelParams::reference();
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double rho = std::pow(10.0, -6.0 + 12.0 * k / 1999.0);
        const auto r = symbols::characteristic_roots(p, rho);
        const double b = symbols::damping(p, rho);
        const double c = symbols::stiffness(p, rho);
        worst = std::max(worst, std::abs(r.lambda1 + r.lambda2 + b) / b);
        worst = std::max(worst, std::abs(r.lambda1 * r.lambda2 - c) / c);
    }
    o.require(worst <= 1e-12, "Vieta max rel " + num(worst));
    const auto lo = symbols::characteristic_roots(p, 1e-4);
    const auto hi = symbols::characteristic_roots(p, 1e4);
    const double r1 = lo.lambda1.real() / -std::pow(1e-4, 2 * (p.sigma - p.sigma1));
    const double r2 = lo.lambda2.real() / -std::pow(1e-4, 2 * p.sigma1);
    const double r3 = hi.lambda1.real() / -std::pow(1e4, 2 * (p.sigma - p.sigma2));
    const double r4 = hi.lambda2.real() / -std::pow(1e4, 2 * p.sigma2);
    double dev = 0.0;
    for (double r : {r1, r2, r3, r4}) dev = std::max(dev, std::abs(r - 1.0));
    o.require(dev <= 0.01, "asymptotic ratio max dev " + num(dev));
}

void kernel_l1(Outcome& o) {
    for (const char* name : {"kernel_k1_l1_s0_large", "kernel_k1_l1_s1_large", "kernel_k1_l1_s0_small",
                             "kernel_k1_l1_s1_small"}) {
        const auto r = run_reference(name);
        o.require(r.passed(), describe(r));
    }
}

void kernel_linf(Outcome& o) {
    const auto r = run_reference("kernel_k0_linf_large");
    o.require(r.passed(), describe(r));
}

void radial_oracle(Outcome& o) {
    double worst = 0.0;
    for (int n : {1, 3}) {
        const std::vector<double> radii{1.0, 2.0};
        const auto prof = radial::inverse_radial_fourier([](double r) { return cplx(std::exp(-0.5 * r * r)); }, n,
                                                         0.0, radii, radial::QuadratureConfig{});
        worst = std::max(worst, std::abs(prof.origin - 1.0));
        for (std::size_t i = 0; i < radii.size(); ++i)
            worst = std::max(worst, std::abs(prof.values[i] - std::exp(-0.5 * radii[i] * radii[i])));
    }
    o.require(worst <= 1e-6, "Gaussian self-transform max err " + num(worst));

    using boost::math::quadrature::gauss_kronrod;
    double rel = 0.0;
    const auto p = ModelParams::reference(1);
    for (auto kind : {symbols::MultiplierKind::K0, symbols::MultiplierKind::K1}) {
        for (double t : {0.5, 4.0, 20.0}) {
            radial::KernelRequest req;
            req.kind = kind;
            req.t = t;
            const auto prof = radial::kernel_profile(p, req);
            const auto f = [&](double r) { return symbols::multiplier(p, kind, r, t).real(); };
            double direct = 0.0;
            double a = 0.0;
            for (double b : {1e-3, 1e-2, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0, 20.0, 60.0}) {
                direct += gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-12);
                a = b;
            }
            direct *= std::sqrt(2.0 / pi);
            rel = std::max(rel, std::abs(prof.origin.real() - direct) / std::abs(direct));
        }
    }
    o.require(rel <= 1e-6, "origin vs direct quadrature max rel " + num(rel));
}

void bessel_layer(Outcome& o) {
    double worst = 0.0;
    for (double mu : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
        for (double s : {0.5, 2.0, 17.0, 40.0}) {
            const double h = 1e-5;
            const double d = (radial::bessel_j_tilde(mu, s + h) - radial::bessel_j_tilde(mu, s - h)) / (2 * h);
            worst = std::max(worst, std::abs(d + s * radial::bessel_j_tilde(mu + 1.0, s)));
        }
    }
    for (double s : {0.3, 1.0, 7.0}) {
        worst = std::max(worst, std::abs(radial::bessel_j_tilde(-0.5, s) - std::sqrt(2.0 / pi) * std::cos(s)));
        worst = std::max(worst, std::abs(radial::bessel_j_tilde(0.5, s) - std::sqrt(2.0 / pi) * std::sin(s) / s));
    }
    o.require(worst <= 1e-6, "recurrence residual " + num(worst));
    const double alpha = radial::lemma_b1_alpha();
    o.require(alpha > 0.0 && alpha < 1.0, "alpha " + num(alpha));
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        const double x = k / 9999.0;
        if (radial::bessel_j(0.0, x) < 1.0 - std::pow(x, alpha)) ++violations;
    }
    o.require(violations == 0, "inequality violations " + std::to_string(violations) + "/10000");
}

void linear_propagator(Outcome& o) {
    using namespace boost::numeric::odeint;
    using state = std::array<double, 2>;
    double ode_err = 0.0;
    for (const auto& p : {ModelParams::reference(1), ModelParams{2.0, 0.5, 1.5, 0.1, 0.1, 1}}) {
        const GridSpec g{1, 64, 2 * pi};
        for (int k : {1, 2, 3, 5}) {
            const double xi = k * pi / g.half_length;
            auto st = FieldState::zeros(g);
            st.u = grid::sample(g, [&](std::span<const double> x) { return std::cos(xi * x[0]); });
            const double b = symbols::damping(p, xi);
            const double c = symbols::stiffness(p, xi);
            state w{1.0, 0.0};
            auto stepper = make_controlled(1e-14, 1e-14, runge_kutta_fehlberg78<state>());
            double t = 0.0;
            for (int j = 1; j <= 40; ++j) {
                const double target = 0.25 * j;
                integrate_adaptive(stepper, [&](const state& y, state& dy, double) {
                    dy[0] = y[1];
                    dy[1] = -b * y[1] - c * y[0];
                }, w, t, target, 1e-3);
                t = target;
                const auto out = evolution::linear_propagate(st, t, p, g);
                for (std::size_t i = 0; i < st.u.size(); ++i) {
                    ode_err = std::max(ode_err, std::abs(out.u[i] - w[0] * st.u[i]));
                    ode_err = std::max(ode_err, std::abs(out.ut[i] - w[1] * st.u[i]));
                }
            }
        }
    }
    o.require(ode_err <= 1e-8, "single-mode vs ODE " + num(ode_err));

    const GridSpec g2{2, 64, 8.0};
    const auto p2 = ModelParams::reference(2);
    auto st = gaussian(g2, 1.0, 1.5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto& v : st.ut) v = U(rng);
    const auto direct = evolution::linear_propagate(st, 3.0, p2, g2);
    const auto composed = evolution::linear_propagate(evolution::linear_propagate(st, 1.1, p2, g2), 3.0, p2, g2);
    const double semi = std::max(max_diff(direct.u, composed.u) / max_abs(direct.u),
                                 max_diff(direct.ut, composed.ut) / max_abs(direct.ut));
    o.require(semi <= 1e-10, "semigroup residual " + num(semi));

    const auto u0 = gaussian(g2, 1.0, 1.2);
    const std::vector<evolution::ChannelSpec> ch{{"u_L2", evolution::ChannelField::U, 0.0, 2.0}};
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    const auto series = evolution::evolve(u0, 10.0, times, p2, evolution::Nonlinearity{2.0, 0.0, 0.0},
                                          evolution::StepControls{}, ch);
    const auto hat = grid::forward(u0.u, g2);
    double planch = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const evolution::ModeMultipliers m(p2, g2, times[k]);
        double sum = 0.0;
        for (std::size_t i = 0; i < hat.size(); ++i) sum += std::norm(m.k0[i] * hat[i]);
        const double oracle = std::sqrt(sum) * g2.spacing();
        planch = std::max(planch, std::abs(series.channel("u_L2")[k] - oracle) / oracle);
    }
    o.require(planch <= 1e-8, "Plancherel rel " + num(planch));
}

void semilinear_integrator(Outcome& o) {
    const auto p = ModelParams::reference(1);
    const GridSpec g{1, 128, 12.0};
    const std::vector<evolution::ChannelSpec> none;

    {
        const auto st = gaussian(g, 0.3, 1.0);
        evolution::StepControls c;
        c.h = 0.1;
        const auto a = evolution::semilinear_step(st, c, p, evolution::Nonlinearity{2.0, 0.0, 0.0}, g);
        const auto b = evolution::linear_propagate(st, 0.1, p, g);
        const double r = std::max(max_diff(a.u, b.u), max_diff(a.ut, b.ut));
        o.require(r <= 1e-10, "coefficient-zero residual " + num(r));
    }
    {
        const auto st = gaussian(g, 0.8, 1.0);
        const evolution::Nonlinearity nl{2.0, 0.0, 1.0};
        const auto run = [&](double h) {
            evolution::StepControls c;
            c.h = h;
            FieldState out;
            evolution::evolve(st, 2.0, std::vector<double>{2.0}, p, nl, c, none, &out);
            return out.u;
        };
        const auto u1 = run(0.1);
        const auto u2 = run(0.05);
        const auto ref = run(0.0125);
        const double ratio = max_diff(u1, ref) / max_diff(u2, ref);
        o.require(ratio >= 3.2 && ratio <= 4.8, "self-convergence factor " + num(ratio));
    }
    {
        const GridSpec gp{1, 256, 20.0};
        const double eps = 1e-3;
        const auto st = gaussian(gp, eps, 1.0);
        const evolution::Nonlinearity nl{2.0, 0.0, 1.0};
        evolution::StepControls c;
        c.h = 0.01;
        FieldState sol;
        evolution::evolve(st, 1.0, std::vector<double>{1.0}, p, nl, c, none, &sol);
        const auto lin = evolution::linear_propagate(st, 1.0, p, gp);
        std::vector<cplx> acc(gp.size(), cplx(0.0));
        static const double x5[] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                    0.9061798459386640};
        static const double w5[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                    0.4786286704993665, 0.2369268850561891};
        const int panels = 40;
        for (int k = 0; k < panels; ++k) {
            const double a = static_cast<double>(k) / panels;
            const double b = static_cast<double>(k + 1) / panels;
            for (int j = 0; j < 5; ++j) {
                const double tau = 0.5 * (a + b) + 0.5 * (b - a) * x5[j];
                const auto ul = evolution::linear_propagate(st, tau, p, gp);
                const auto nhat = grid::forward(evolution::nonlinear_term(ul.u, nl, c.dealias_fraction, gp), gp);
                const evolution::ModeMultipliers m(p, gp, 1.0 - tau);
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += 0.5 * (b - a) * w5[j] * m.k1[i] * nhat[i];
            }
        }
        const auto duhamel = grid::inverse_real(acc, gp);
        double err = 0.0;
        for (std::size_t i = 0; i < gp.size(); ++i) err = std::max(err, std::abs(sol.u[i] - lin.u[i] - duhamel[i]));
        o.require(err <= 10 * eps * eps * eps, "Picard first-iterate gap " + num(err));
    }
}

void theorem_regime(Outcome& o) {
    const auto cfg = harness::ExperimentConfig::from_config(
        harness::Config::load(ref_config("semilinear_theorem_regime")));
    const auto r = harness::run_experiment(cfg);
    o.require(cfg.params.n == 2 && cfg.grid.points == 256 && cfg.query.m == 1.0 && cfg.query.q == 2.0 &&
                  cfg.data.epsilon == 1e-2,
              "setup n=2, 256^2, m=1, q=2, eps=1e-2, p=" + num(cfg.nl.p));
    const auto rep = rates::admissible_exponents(cfg.query);
    o.require(rep.feasible && rep.p_interval.contains(cfg.nl.p), "p inside the reported interval");
    o.require(r.fit.has_value() && r.fit->slope <= r.predicted + 0.05, describe(r));
    o.require(!r.blowup, "no blow-up");
    const double ratio = r.weighted_sup / r.weighted_sup_half;
    o.require(std::abs(ratio - 1.0) <= 0.1, "weighted sup T=50 vs T=25 ratio " + num(ratio));
    o.require(r.passed(), "report entry " + r.status);
}

void rate_calculator(Outcome& o) {
    std::mt19937_64 rng(424242);
    int mismatches = 0;
    int nonempty = 0;
    for (int i = 0; i < 50; ++i) {
        const auto q = oracle::random_query(rng, static_cast<rates::TheoremCase>(i % 4));
        const auto rep = rates::admissible_exponents(q);
        const auto& iv = rep.p_interval;
        if (!iv.empty()) ++nonempty;
        for (int k = 1; k <= 20000; ++k) {
            const double p = 1.0 + 39.0 * k / 20000.0;
            if (std::abs(p - iv.lo) < 1e-9 || (std::isfinite(iv.hi) && std::abs(p - iv.hi) < 1e-9)) continue;
            if (iv.contains(p) != oracle::admissible_at(q, p)) ++mismatches;
        }
        if (!iv.empty() && std::isfinite(iv.hi) && iv.hi_closed != oracle::admissible_at(q, iv.hi)) ++mismatches;
    }
    o.require(mismatches == 0, "scan mismatches " + std::to_string(mismatches) + " over 50 queries (" +
                                   std::to_string(nonempty) + " non-empty)");
    bool exact = true;
    for (int n : {1, 2, 3, 5}) {
        for (double sg : {0.5, 1.0, 2.0}) {
            exact &= rates::gn_theta(n, sg, sg, 3.0, 2.0, 3.0).theta == 1.0;
            exact &= rates::gn_theta(n, 0.0, sg, 2.0, 2.0, 3.0).theta == 0.0;
        }
    }
    o.require(exact, "GN endpoint identities");
}

void determinism(Outcome& o) {
    const std::vector<std::string> paths{std::string(DSIG_SOURCE_DIR) + "/configs/reference"};
    const auto cfgs = harness::load_config_set(paths);
    const std::string a = harness::run_verification(cfgs).to_json();
    setenv("DSIG_MAX_WORKERS", "1", 1);
    const std::string b = harness::run_verification(cfgs).to_json();
    unsetenv("DSIG_MAX_WORKERS");
    o.require(a == b, "report JSON identical across runs and worker counts (" + std::to_string(a.size()) + " bytes)");
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "root algebra", 1.0, roots_algebra},
        {2, "kernel L1 decay", 120.0, kernel_l1},
        {3, "kernel Linf decay", 120.0, kernel_linf},
        {4, "radial transform oracle", 10.0, radial_oracle},
        {5, "Bessel layer", 5.0, bessel_layer},
        {6, "linear propagator exactness", 30.0, linear_propagator},
        {7, "semilinear integrator", 120.0, semilinear_integrator},
        {8, "theorem-regime decay", 600.0, theorem_regime},
        {9, "rate calculator", 5.0, rate_calculator},
        {10, "determinism", 600.0, determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    bool all_pass = true;
    for (const auto& c : all) {
        if (!selected.empty() && selected.count(c.id) == 0) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs <= c.budget_seconds, "runtime " + num(secs) + " s (limit " + num(c.budget_seconds) + " s)");
        all_pass &= o.pass;
        std::printf("criterion %2d %-30s %s  %s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
