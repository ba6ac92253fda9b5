#include "dsig/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>

#include "json.hpp"

#include "dsig/error.hpp"
#include "dsig/io.hpp"

namespace dsig::evolution {

void Nonlinearity::validate(const ModelParams& params) const {
    if (!(p > 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "nonlinearity exponent p must exceed 1");
    if (!(a >= 0.0)) fail(ErrorCode::InvalidArgument, "derivative order a must be >= 0");
    if (!(coefficient >= 0.0)) fail(ErrorCode::InvalidArgument, "nonlinearity coefficient must be >= 0");
    if (a > 0.0 && !(a < params.sigma - params.sigma2))
        fail(ErrorCode::InvalidArgument, "derivative order a must be below sigma - sigma2");
}

void StepControls::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "step h must be positive");
    if (corrector_iterations < 1) fail(ErrorCode::InvalidArgument, "corrector_iterations must be >= 1");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        fail(ErrorCode::InvalidArgument, "dealias fraction must lie in (0, 1]");
    if (!(blowup_threshold >= 0.0)) fail(ErrorCode::InvalidArgument, "blow-up threshold must be >= 0");
}

bool NormSeries::has_channel(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& NormSeries::channel(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail(ErrorCode::MissingChannel, "norm series has no channel '" + name + "'");
    return values[static_cast<std::size_t>(it - names.begin())];
}

void NormSeries::write_csv(std::ostream& os) const {
    os << 't';
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        os << io::fmt(times[k]);
        for (const auto& col : values) os << ',' << io::fmt(col[k]);
        os << '\n';
    }
}

std::string NormSeries::summary_json() const {
    nlohmann::ordered_json j;
    j["blowup"] = blowup;
    j["blowup_time"] = blowup ? nlohmann::ordered_json(blowup_time) : nlohmann::ordered_json(nullptr);
    j["samples"] = times.size();
    j["channels"] = names;
    return j.dump(2);
}

ModeMultipliers::ModeMultipliers(const ModelParams& params, const GridSpec& g, double step) : dt(step) {
    const auto mag = grid::frequency_magnitudes(g);
    const std::size_t n = mag.size();
    k0.resize(n);
    k1.resize(n);
    dt_k0.resize(n);
    dt_k1.resize(n);
    // Grid frequencies repeat heavily in 2-d and 3-d.
    std::map<double, symbols::MultiplierSet> memo;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = memo.find(mag[i]);
        if (it == memo.end()) it = memo.emplace(mag[i], symbols::multipliers(params, mag[i], step)).first;
        const auto& m = it->second;
        k0[i] = m.k0.real();
        k1[i] = m.k1.real();
        dt_k0[i] = m.dt_k0.real();
        dt_k1[i] = m.dt_k1.real();
    }
}

namespace {

void check_grid(const FieldState& state, const GridSpec& g) {
    state.check_shape();
    const auto& s = state.grid;
    if (s.n != g.n || s.points != g.points || s.half_length != g.half_length)
        fail(ErrorCode::ShapeMismatch, "state grid differs from the supplied grid");
}

double power_abs(double v, double p) {
    const double a = std::abs(v);
    if (a < 1e-300) return 0.0;
    return std::exp(p * std::log(a));
}

// Spectral state and cached per-grid data shared across steps.
class Stepper {
public:
    Stepper(const ModelParams& params, const GridSpec& g, const Nonlinearity& nl, double dealias)
        : params_(params), grid_(g), nl_(nl), mag_(grid::frequency_magnitudes(g)) {
        const auto kmax = grid::max_abs_wavenumber(g);
        const double limit = dealias * g.points / 2.0;
        mask_.resize(kmax.size());
        for (std::size_t i = 0; i < kmax.size(); ++i) mask_[i] = kmax[i] <= limit ? 1.0 : 0.0;
        if (nl_.a > 0.0) {
            da_.resize(mag_.size());
            for (std::size_t i = 0; i < mag_.size(); ++i) da_[i] = mag_[i] == 0.0 ? 0.0 : std::pow(mag_[i], nl_.a);
        }
    }

    const ModeMultipliers& multipliers(double dt) {
        auto it = cache_.find(dt);
        if (it == cache_.end()) it = cache_.emplace(dt, std::make_unique<ModeMultipliers>(params_, grid_, dt)).first;
        return *it->second;
    }

    bool active() const { return nl_.coefficient != 0.0; }

    // N̂ from û: dealias, optional |D|^a, pointwise power, transform, dealias.
    std::vector<cplx> nonlinear_hat(const std::vector<cplx>& uhat) const {
        std::vector<cplx> w(uhat.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] = uhat[i] * mask_[i];
            if (!da_.empty()) w[i] *= da_[i];
        }
        auto phys = grid::inverse_real(w, grid_);
        for (auto& v : phys) v = nl_.coefficient * power_abs(v, nl_.p);
        auto out = grid::forward(phys, grid_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask_[i];
        return out;
    }

    void step(std::vector<cplx>& uh, std::vector<cplx>& uth, double h, int iterations) {
        const auto& m = multipliers(h);
        const std::size_t n = uh.size();
        std::vector<cplx> lin_u(n);
        std::vector<cplx> lin_ut(n);
        for (std::size_t i = 0; i < n; ++i) {
            lin_u[i] = m.k0[i] * uh[i] + m.k1[i] * uth[i];
            lin_ut[i] = m.dt_k0[i] * uh[i] + m.dt_k1[i] * uth[i];
        }
        if (!active()) {
            uh.swap(lin_u);
            uth.swap(lin_ut);
            return;
        }
        const auto nk = nonlinear_hat(uh);
        // Predictor: left-endpoint rule for the Duhamel integral.
        std::vector<cplx> pu(n);
        for (std::size_t i = 0; i < n; ++i) pu[i] = lin_u[i] + h * m.k1[i] * nk[i];
        // Corrector: trapezoid rule; K̂1(0) = 0 removes the endpoint term
        // from u, ∂tK̂1(0) = 1 keeps it in u_t.
        std::vector<cplx> cu(n);
        for (std::size_t i = 0; i < n; ++i) cu[i] = lin_u[i] + 0.5 * h * m.k1[i] * nk[i];
        std::vector<cplx> cut(n);
        const std::vector<cplx>* endpoint = &pu;
        for (int it = 0; it < iterations; ++it) {
            const auto nstar = nonlinear_hat(*endpoint);
            for (std::size_t i = 0; i < n; ++i) cut[i] = lin_ut[i] + 0.5 * h * (m.dt_k1[i] * nk[i] + nstar[i]);
            endpoint = &cu;
        }
        uh.swap(cu);
        uth.swap(cut);
    }

private:
    ModelParams params_;
    GridSpec grid_;
    Nonlinearity nl_;
    std::vector<double> mag_;
    std::vector<double> mask_;
    std::vector<double> da_;
    std::map<double, std::unique_ptr<ModeMultipliers>> cache_;
};

double resolve_threshold(const StepControls& c, std::span<const double> u0) {
    if (c.blowup_threshold > 0.0) return c.blowup_threshold;
    double m = 0.0;
    for (double v : u0) m = std::max(m, std::abs(v));
    return m > 0.0 ? kDefaultBlowupFactor * m : std::numeric_limits<double>::infinity();
}

void check_blowup(std::span<const double> u, double threshold, double t) {
    for (double v : u)
        if (!std::isfinite(v) || std::abs(v) > threshold) throw BlowUpError(t);
}

void check_blowup(std::span<const cplx> uh, double t) {
    for (const auto& v : uh)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw BlowUpError(t);
}

double channel_from_spectra(const std::vector<cplx>& uh, const std::vector<cplx>& uth,
                            const std::vector<double>& mag, const ChannelSpec& ch, const GridSpec& g) {
    const auto& src = ch.field == ChannelField::U ? uh : uth;
    if (ch.riesz_order == 0.0) return grid::lq_norm_grid(grid::inverse_real(src, g), ch.q, g);
    std::vector<cplx> w(src.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = mag[i] == 0.0 ? cplx(0.0) : src[i] * std::pow(mag[i], ch.riesz_order);
    return grid::lq_norm_grid(grid::inverse_real(w, g), ch.q, g);
}

}  // namespace

FieldState linear_propagate(const FieldState& state, double t_target, const ModelParams& params,
                            const GridSpec& g) {
    check_grid(state, g);
    params.validate();
    if (!(t_target >= state.time)) fail(ErrorCode::InvalidArgument, "t_target must not precede the state time");
    const double dt = t_target - state.time;
    FieldState out = state;
    out.time = t_target;
    if (dt == 0.0) return out;
    const ModeMultipliers m(params, g, dt);
    const auto uh = grid::forward(state.u, g);
    const auto uth = grid::forward(state.ut, g);
    std::vector<cplx> nu(uh.size());
    std::vector<cplx> nut(uh.size());
    for (std::size_t i = 0; i < uh.size(); ++i) {
        nu[i] = m.k0[i] * uh[i] + m.k1[i] * uth[i];
        nut[i] = m.dt_k0[i] * uh[i] + m.dt_k1[i] * uth[i];
    }
    out.u = grid::inverse_real(nu, g);
    out.ut = grid::inverse_real(nut, g);
    return out;
}

std::vector<double> nonlinear_term(std::span<const double> u, const Nonlinearity& nl, double dealias_fraction,
                                   const GridSpec& g) {
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        fail(ErrorCode::InvalidArgument, "dealias fraction must lie in (0, 1]");
    const Stepper s(ModelParams{}, g, nl, dealias_fraction);
    return grid::inverse_real(s.nonlinear_hat(grid::forward(u, g)), g);
}

FieldState semilinear_step(const FieldState& state, const StepControls& controls, const ModelParams& params,
                           const Nonlinearity& nl, const GridSpec& g) {
    check_grid(state, g);
    params.validate();
    controls.validate();
    nl.validate(params);
    const double threshold = resolve_threshold(controls, state.u);
    check_blowup(state.u, threshold, state.time);
    Stepper stepper(params, g, nl, controls.dealias_fraction);
    auto uh = grid::forward(state.u, g);
    auto uth = grid::forward(state.ut, g);
    stepper.step(uh, uth, controls.h, controls.corrector_iterations);
    FieldState out = state;
    out.time = state.time + controls.h;
    check_blowup(uh, out.time);
    out.u = grid::inverse_real(uh, g);
    out.ut = grid::inverse_real(uth, g);
    check_blowup(out.u, threshold, out.time);
    return out;
}

double channel_value(const FieldState& state, const ChannelSpec& ch) {
    state.check_shape();
    const auto& g = state.grid;
    return channel_from_spectra(grid::forward(state.u, g), grid::forward(state.ut, g),
                                grid::frequency_magnitudes(g), ch, g);
}

NormSeries evolve(const FieldState& initial, double horizon, std::span<const double> sample_times,
                  const ModelParams& params, const Nonlinearity& nl, const StepControls& controls,
                  std::span<const ChannelSpec> channels, FieldState* final_state) {
    initial.check_shape();
    params.validate();
    controls.validate();
    nl.validate(params);
    if (!(horizon >= initial.time)) fail(ErrorCode::InvalidArgument, "horizon precedes the initial time");
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
        if (!(sample_times[k] >= initial.time && sample_times[k] <= horizon))
            fail(ErrorCode::InvalidArgument, "sample times must lie in [initial time, horizon]");
        if (k > 0 && !(sample_times[k] > sample_times[k - 1]))
            fail(ErrorCode::InvalidArgument, "sample times must be strictly increasing");
    }
    for (const auto& ch : channels)
        if (!(ch.q >= 1.0)) fail(ErrorCode::InvalidArgument, "channel exponent q must be >= 1");

    const auto& g = initial.grid;
    NormSeries series;
    for (const auto& ch : channels) series.names.push_back(ch.name);
    series.values.assign(channels.size(), {});

    const double threshold = resolve_threshold(controls, initial.u);
    const auto mag = grid::frequency_magnitudes(g);
    Stepper stepper(params, g, nl, controls.dealias_fraction);
    auto uh = grid::forward(initial.u, g);
    auto uth = grid::forward(initial.ut, g);
    double t = initial.time;

    const auto record = [&](double at) {
        series.times.push_back(at);
        for (std::size_t c = 0; c < channels.size(); ++c)
            series.values[c].push_back(channel_from_spectra(uh, uth, mag, channels[c], g));
        if (final_state != nullptr) {
            final_state->grid = g;
            final_state->time = at;
            final_state->u = grid::inverse_real(uh, g);
            final_state->ut = grid::inverse_real(uth, g);
        }
    };

    try {
        check_blowup(initial.u, threshold, t);
        for (double target : sample_times) {
            const double span = target - t;
            if (span > 0.0) {
                const auto steps = static_cast<long long>(std::ceil(span / controls.h * (1.0 - 1e-12)));
                const double h = span / static_cast<double>(steps);
                for (long long k = 0; k < steps; ++k) {
                    stepper.step(uh, uth, h, controls.corrector_iterations);
                    const double now = t + h * static_cast<double>(k + 1);
                    check_blowup(uh, now);
                    if (stepper.active()) check_blowup(grid::inverse_real(uh, g), threshold, now);
                }
                t = target;
            }
            if (!stepper.active()) {
                check_blowup(uh, t);
                check_blowup(grid::inverse_real(uh, g), threshold, t);
            }
            record(t);
        }
    } catch (const BlowUpError& e) {
        series.blowup = true;
        series.blowup_time = e.time();
    }
    return series;
}

double boundary_ring_fraction(const FieldState& state) {
    state.check_shape();
    const auto& g = state.grid;
    const auto inside = grid::sample(g, [&](std::span<const double> x) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m >= 0.9 * g.half_length ? 1.0 : 0.0;
    });
    double ring = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i) {
        const double e = state.u[i] * state.u[i];
        total += e;
        ring += inside[i] * e;
    }
    return total == 0.0 ? 0.0 : ring / total;
}

}  // namespace dsig::evolution
