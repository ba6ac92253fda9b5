#ifndef DSIG_EVOLUTION_HPP
#define DSIG_EVOLUTION_HPP

// Spectral propagation of
//   u_tt + (-Δ)^σ u + μ1(-Δ)^σ1 u_t + μ2(-Δ)^σ2 u_t = c·||D|^a u|^p
// on a periodic grid: the linear part is applied exactly through the kernel
// multipliers, the nonlinearity through an exponential predictor-corrector
// discretization of the Duhamel integral.

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dsig/grid.hpp"
#include "dsig/symbols.hpp"

namespace dsig::evolution {

struct Nonlinearity {
    double p = 2.0;
    double a = 0.0;
    /// 0 disables the nonlinearity.
    double coefficient = 1.0;

    /// p > 1, a ≥ 0, coefficient ≥ 0, and a < σ − σ2 whenever a > 0.
    void validate(const ModelParams& params) const;
};

struct StepControls {
    double h = 0.01;
    int corrector_iterations = 1;
    /// Modes with max_i |k_i| > fraction · N/2 are removed from the
    /// nonlinearity's input and output.
    double dealias_fraction = 2.0 / 3.0;
    /// Absolute L∞ bound on u; 0 selects 1e6 × the initial L∞ norm.
    double blowup_threshold = 0.0;

    void validate() const;
};

inline constexpr double kDefaultBlowupFactor = 1e6;

enum class ChannelField { U, Ut };

/// ‖|D|^order w‖_{L^q} with w = u or u_t.
struct ChannelSpec {
    std::string name;
    ChannelField field = ChannelField::U;
    double riesz_order = 0.0;
    double q = 2.0;
};

struct NormSeries {
    std::vector<double> times;
    std::vector<std::string> names;
    /// values[c][k] is channel c at times[k].
    std::vector<std::vector<double>> values;
    bool blowup = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();

    /// Throws MissingChannel if absent.
    const std::vector<double>& channel(const std::string& name) const;
    bool has_channel(const std::string& name) const;

    /// Header `t,<names>`, 17 significant digits.
    void write_csv(std::ostream& os) const;
    /// Sidecar summary: blow-up flag and time, sample and channel lists.
    std::string summary_json() const;
};

/// Real parts of K̂0, K̂1, ∂tK̂0, ∂tK̂1 at every grid frequency for one Δt.
struct ModeMultipliers {
    double dt = 0.0;
    std::vector<double> k0;
    std::vector<double> k1;
    std::vector<double> dt_k0;
    std::vector<double> dt_k1;

    ModeMultipliers(const ModelParams& params, const GridSpec& g, double dt);
};

/// Exact linear evolution from state.time to t_target.
FieldState linear_propagate(const FieldState& state, double t_target, const ModelParams& params,
                            const GridSpec& g);

/// N(u) = coefficient·||D|^a u|^p with dealiasing of input and output.
std::vector<double> nonlinear_term(std::span<const double> u, const Nonlinearity& nl,
                                   double dealias_fraction, const GridSpec& g);

/// One predictor-corrector step of size controls.h. Throws BlowUpError.
FieldState semilinear_step(const FieldState& state, const StepControls& controls,
                           const ModelParams& params, const Nonlinearity& nl, const GridSpec& g);

/// Value of one channel for a state.
double channel_value(const FieldState& state, const ChannelSpec& ch);

/// Marches with equal substeps of size ≤ h between consecutive sample
/// times and records every channel at every sample time. Blow-up truncates
/// the series and sets the flag. `final_state`, when given, receives the
/// state at the last recorded sample.
NormSeries evolve(const FieldState& initial, double horizon, std::span<const double> sample_times,
                  const ModelParams& params, const Nonlinearity& nl, const StepControls& controls,
                  std::span<const ChannelSpec> channels, FieldState* final_state = nullptr);

/// Wrap-around diagnostic: L² mass of u in the outer ring max_i |x_i| ≥ 0.9 L
/// relative to the total L² mass.
double boundary_ring_fraction(const FieldState& state);

}  // namespace dsig::evolution

#endif
