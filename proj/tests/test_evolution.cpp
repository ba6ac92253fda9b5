#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "dsig/error.hpp"
#include "dsig/evolution.hpp"
#include "dsig/grid.hpp"

using namespace dsig;
using namespace dsig::evolution;
using std::numbers::pi;

namespace {

FieldState gaussian_state(const GridSpec& g, double amp, double width = 1.0) {
    auto st = FieldState::zeros(g);
    st.u = grid::sample(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return amp * std::exp(-r2 / (2 * width * width));
    });
    return st;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double max_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Solution of the mode ODE with (w, w') = (1, 0) at t.
std::array<double, 2> mode_oracle(const ModelParams& p, double rho, double t_end) {
    using namespace boost::numeric::odeint;
    using state = std::array<double, 2>;
    const double b = symbols::damping(p, rho);
    const double c = symbols::stiffness(p, rho);
    state x{1.0, 0.0};
    auto stepper = make_controlled(1e-14, 1e-14, runge_kutta_fehlberg78<state>());
    integrate_adaptive(stepper, [&](const state& y, state& dy, double) {
        dy[0] = y[1];
        dy[1] = -b * y[1] - c * y[0];
    }, x, 0.0, t_end, 1e-3);
    return x;
}

}  // namespace

TEST_CASE("controls and nonlinearity validation") {
    StepControls c;
    CHECK_NOTHROW(c.validate());
    c.h = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = StepControls{};
    c.dealias_fraction = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    const auto p = ModelParams::reference();
    Nonlinearity nl;
    CHECK_NOTHROW(nl.validate(p));
    nl.p = 1.0;
    CHECK_THROWS_AS(nl.validate(p), Error);
    nl = Nonlinearity{};
    nl.a = 0.6;  // σ − σ2 = 0.5
    CHECK_THROWS_AS(nl.validate(p), Error);
}

TEST_CASE("linear propagation over zero time is the identity") {
    const GridSpec g{1, 64, 10.0};
    auto st = gaussian_state(g, 1.0);
    st.ut = grid::sample(g, [](std::span<const double> x) { return std::sin(x[0]) * std::exp(-x[0] * x[0]); });
    const auto out = linear_propagate(st, 0.0, ModelParams::reference(), g);
    CHECK(out.u == st.u);
    CHECK(out.ut == st.ut);
}

TEST_CASE("single Fourier mode follows the scalar ODE") {
    for (const auto& p : {ModelParams::reference(1), ModelParams{2.0, 0.5, 1.5, 0.1, 0.1, 1}}) {
        const GridSpec g{1, 64, 2 * pi};
        const int k = 3;
        const double xi = k * pi / g.half_length;
        auto st = FieldState::zeros(g);
        st.u = grid::sample(g, [&](std::span<const double> x) { return std::cos(xi * x[0]); });
        for (double t = 0.5; t <= 10.0 + 1e-12; t += 0.5) {
            const auto w = mode_oracle(p, xi, t);
            const auto out = linear_propagate(st, t, p, g);
            for (std::size_t i = 0; i < st.u.size(); ++i) {
                CHECK(std::abs(out.u[i] - w[0] * st.u[i]) <= 1e-8);
                CHECK(std::abs(out.ut[i] - w[1] * st.u[i]) <= 1e-8);
            }
        }
    }
}

TEST_CASE("linear propagation is a semigroup") {
    const GridSpec g{2, 32, 6.0};
    const auto p = ModelParams::reference(2);
    auto st = gaussian_state(g, 1.0, 1.5);
    st.ut = grid::sample(g, [](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); });
    const auto direct = linear_propagate(st, 3.0, p, g);
    const auto composed = linear_propagate(linear_propagate(st, 1.25, p, g), 3.0, p, g);
    CHECK(max_diff(direct.u, composed.u) <= 1e-10 * max_abs(direct.u));
    CHECK(max_diff(direct.ut, composed.ut) <= 1e-10 * std::max(max_abs(direct.ut), 1e-300));
}

TEST_CASE("zero coefficient reproduces the linear propagator") {
    const GridSpec g{1, 128, 10.0};
    const auto p = ModelParams::reference();
    const auto st = gaussian_state(g, 0.3);
    Nonlinearity nl{2.0, 0.0, 0.0};
    StepControls c;
    c.h = 0.1;
    const auto a = semilinear_step(st, c, p, nl, g);
    const auto b = linear_propagate(st, 0.1, p, g);
    CHECK(max_diff(a.u, b.u) <= 1e-10);
    CHECK(max_diff(a.ut, b.ut) <= 1e-10);
    CHECK(a.time == doctest::Approx(0.1));
}

TEST_CASE("second-order self-convergence") {
    const GridSpec g{1, 128, 12.0};
    const auto p = ModelParams::reference();
    const auto st = gaussian_state(g, 0.8);
    const Nonlinearity nl{2.0, 0.0, 1.0};
    const std::vector<ChannelSpec> none;
    const double T = 2.0;
    const auto run = [&](double h) {
        StepControls c;
        c.h = h;
        FieldState out;
        evolve(st, T, std::vector<double>{T}, p, nl, c, none, &out);
        return out.u;
    };
    const double h = 0.1;
    const auto u1 = run(h);
    const auto u2 = run(h / 2);
    const auto ref = run(h / 8);
    const double ratio = max_diff(u1, ref) / max_diff(u2, ref);
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
}

TEST_CASE("small data agrees with the first Picard iterate") {
    const GridSpec g{1, 256, 20.0};
    const auto p = ModelParams::reference();
    const double eps = 1e-3;
    const auto st = gaussian_state(g, eps);
    const Nonlinearity nl{2.0, 0.0, 1.0};
    StepControls c;
    c.h = 0.01;
    FieldState sol;
    const std::vector<ChannelSpec> none;
    evolve(st, 1.0, std::vector<double>{1.0}, p, nl, c, none, &sol);

    // u_lin(1) + ∫_0^1 K1(1−τ) * N(u_lin(τ)) dτ by composite Gauss-Legendre in τ.
    const auto lin = linear_propagate(st, 1.0, p, g);
    std::vector<cplx> acc(g.size(), cplx(0.0));
    static const double x5[] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                0.9061798459386640};
    static const double w5[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};
    const int panels = 40;
    for (int k = 0; k < panels; ++k) {
        const double a = static_cast<double>(k) / panels;
        const double b = static_cast<double>(k + 1) / panels;
        for (int j = 0; j < 5; ++j) {
            const double tau = 0.5 * (a + b) + 0.5 * (b - a) * x5[j];
            const auto ul = linear_propagate(st, tau, p, g);
            const auto nhat = grid::forward(nonlinear_term(ul.u, nl, c.dealias_fraction, g), g);
            const ModeMultipliers m(p, g, 1.0 - tau);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += 0.5 * (b - a) * w5[j] * m.k1[i] * nhat[i];
        }
    }
    const auto duhamel = grid::inverse_real(acc, g);
    double err = 0.0;
    double nl_size = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        err = std::max(err, std::abs(sol.u[i] - lin.u[i] - duhamel[i]));
        nl_size = std::max(nl_size, std::abs(duhamel[i]));
    }
    CHECK(nl_size > 1e-8);  // the nonlinear contribution is resolved
    CHECK(err <= 10 * eps * eps * eps);
}

TEST_CASE("evolve: zero data stays zero") {
    const GridSpec g{1, 64, 10.0};
    const auto st = FieldState::zeros(g);
    const std::vector<ChannelSpec> ch{{"u_L2", ChannelField::U, 0.0, 2.0}, {"ut_Linf", ChannelField::Ut, 0.0,
                                                                           std::numeric_limits<double>::infinity()}};
    const auto s = evolve(st, 2.0, std::vector<double>{0.0, 1.0, 2.0}, ModelParams::reference(), Nonlinearity{},
                          StepControls{}, ch);
    CHECK_FALSE(s.blowup);
    CHECK(s.times.size() == 3);
    for (const auto& col : s.values)
        for (double v : col) CHECK(v == 0.0);
}

TEST_CASE("evolve: L2 channel matches the Plancherel sum") {
    const GridSpec g{2, 64, 10.0};
    const auto p = ModelParams::reference(2);
    const auto st = gaussian_state(g, 1.0, 1.2);
    const std::vector<ChannelSpec> ch{{"u_L2", ChannelField::U, 0.0, 2.0}};
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0, 5.0};
    const auto s = evolve(st, 5.0, times, p, Nonlinearity{2.0, 0.0, 0.0}, StepControls{}, ch);
    const auto u0hat = grid::forward(st.u, g);
    const double dx = g.spacing();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const ModeMultipliers m(p, g, times[k]);
        double sum = 0.0;
        for (std::size_t i = 0; i < u0hat.size(); ++i) sum += std::norm(m.k0[i] * u0hat[i]);
        const double oracle = std::sqrt(sum * dx * dx);
        CHECK(std::abs(s.channel("u_L2")[k] - oracle) <= 1e-8 * oracle);
    }
}

TEST_CASE("evolve: large data flags blow-up and truncates") {
    const GridSpec g{1, 128, 10.0};
    const auto st = gaussian_state(g, 50.0, 2.0);
    StepControls c;
    c.h = 0.01;
    c.blowup_threshold = 1e4;
    const std::vector<ChannelSpec> ch{{"u_L2", ChannelField::U, 0.0, 2.0}};
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(0.5 * k);
    const auto s = evolve(st, 10.0, times, ModelParams::reference(), Nonlinearity{3.0, 0.0, 1.0}, c, ch);
    CHECK(s.blowup);
    CHECK(std::isfinite(s.blowup_time));
    CHECK(s.times.size() < times.size());
    CHECK(s.values[0].size() == s.times.size());
}

TEST_CASE("norm series output") {
    NormSeries s;
    s.times = {0.0, 1.0};
    s.names = {"a"};
    s.values = {{1.0, 0.1}};
    CHECK(s.has_channel("a"));
    CHECK_FALSE(s.has_channel("b"));
    CHECK_THROWS_AS(s.channel("b"), Error);
    std::ostringstream os;
    s.write_csv(os);
    CHECK(os.str() == "t,a\n0,1\n1,0.10000000000000001\n");
    CHECK(s.summary_json().find("\"blowup\": false") != std::string::npos);
}

TEST_CASE("boundary ring fraction") {
    const GridSpec g{1, 256, 20.0};
    CHECK(boundary_ring_fraction(gaussian_state(g, 1.0)) < 1e-12);
    auto st = FieldState::zeros(g);
    st.u = grid::sample(g, [](std::span<const double> x) { return std::abs(x[0]) >= 19.0 ? 1.0 : 0.0; });
    CHECK(boundary_ring_fraction(st) == doctest::Approx(1.0));
}

TEST_CASE("evolve rejects malformed schedules") {
    const GridSpec g{1, 64, 10.0};
    const auto st = gaussian_state(g, 0.1);
    const std::vector<ChannelSpec> ch;
    CHECK_THROWS_AS(evolve(st, 1.0, std::vector<double>{0.5, 0.2}, ModelParams::reference(), Nonlinearity{},
                           StepControls{}, ch),
                    Error);
    CHECK_THROWS_AS(evolve(st, 1.0, std::vector<double>{2.0}, ModelParams::reference(), Nonlinearity{},
                           StepControls{}, ch),
                    Error);
}
