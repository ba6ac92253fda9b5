#ifndef DSIG_HARNESS_HPP
#define DSIG_HARNESS_HPP

// Experiment configuration, exponent fitting and batch verification.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsig/evolution.hpp"
#include "dsig/grid.hpp"
#include "dsig/radial.hpp"
#include "dsig/rates.hpp"
#include "dsig/symbols.hpp"

namespace dsig::harness {

// ---------------------------------------------------------------- fitting

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int samples = 0;
};

/// Least squares on (ln t, ln value) over samples with t in [t_lo, t_hi].
/// Throws InsufficientSamples (< 3 in window) or NonpositiveValue.
/// A constant series has r_squared = 1.
DecayFit fit_exponent(std::span<const double> times, std::span<const double> values, double t_lo, double t_hi);

// ----------------------------------------------------------------- config

/// Line-oriented `section.key = value` text; `#` starts a comment.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<string>");
    static Config load(const std::string& path);

    /// Adds or replaces one entry; the key must be in the schema.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::string& source() const { return source_; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

private:
    std::string source_;
    std::map<std::string, std::string> entries_;
};

/// Every key the configuration schema admits.
const std::vector<std::string>& known_keys();

enum class ExperimentKind { Kernel, Linear, Semilinear, Rates };

std::string to_string(ExperimentKind k);

enum class FitMode { TwoSided, OneSided };

struct KernelSpec {
    symbols::MultiplierKind kind = symbols::MultiplierKind::K1;
    double s = 0.0;
    double r = 1.0;
    symbols::Zone zone = symbols::Zone::All;
    double eps_star = 0.0;
    /// Single time for the `kernel` subcommand.
    double t = 1.0;
    std::vector<double> norms{1.0, 2.0, std::numeric_limits<double>::infinity()};
    double t_min = 10.0;
    double t_max = 1000.0;
    int samples = 9;
    int per_decade = 64;
    radial::QuadratureConfig quadrature;
};

struct DataSpec {
    /// "gaussian" or "random_bumps".
    std::string profile = "gaussian";
    double width = 1.0;
    /// Target data-space norm of (u0, u1).
    double epsilon = 1e-2;
    /// u1 = u1_ratio · (profile of u0).
    double u1_ratio = 0.0;
    int bumps = 4;
    rates::DataVariant variant = rates::DataVariant::ShiftedSigma;
};

struct SimSpec {
    double horizon = 50.0;
    double t_first = 0.5;
    int samples = 40;
    std::string channel = "u_Lq";
};

struct FitPolicy {
    double t_min = std::numeric_limits<double>::quiet_NaN();
    double t_max = std::numeric_limits<double>::quiet_NaN();
    double tolerance = 0.05;
    double r2_min = 0.98;
    FitMode mode = FitMode::TwoSided;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentKind kind = ExperimentKind::Kernel;
    std::uint64_t seed = 1;
    ModelParams params;
    GridSpec grid;
    evolution::Nonlinearity nl;
    /// nl.p = "auto": pick p inside the admissible interval (ignored by
    /// linear runs, which keep p = 2).
    bool p_auto = false;
    evolution::StepControls step;
    DataSpec data;
    rates::RateQuery query;
    KernelSpec kernel;
    SimSpec sim;
    FitPolicy fit;
    double roots_rho_min = 1e-6;
    double roots_rho_max = 1e6;
    int roots_count = 121;
    bool horizon_doubling = false;
    double horizon_doubling_tolerance = 0.1;

    /// Builds and validates; unknown keys and malformed values throw Config.
    static ExperimentConfig from_config(const Config& c);
};

/// p strictly inside the admissible interval: the midpoint when bounded,
/// lo + 1 otherwise. Throws InvalidQuery when the interval is empty.
double choose_p(const rates::AdmissibleReport& r);

// ------------------------------------------------------------------- data

/// ‖u0‖_{H^s_q} + ‖u0‖_{L^m} + ‖u1‖_{H^γ_q} + ‖u1‖_{L^m}, γ per variant.
double data_norm(std::span<const double> u0, std::span<const double> u1, const rates::RateQuery& q,
                 rates::DataVariant variant, const GridSpec& g);

/// Initial state scaled so that data_norm equals data.epsilon.
FieldState make_initial_state(const ExperimentConfig& cfg);

/// Channel set recorded for the query's case: u_Lm, u_Lq, Dsu_Lq and, per
/// case, ut_Lq and Dsut_Lq.
std::vector<evolution::ChannelSpec> channels_for(const rates::RateQuery& q);

/// sup over recorded t ≤ t_max of Σ channel_i(t) / f_i(t), with
/// f_i = (1+t)^{exponent_i} over the case's channels.
double weighted_sup_norm(const evolution::NormSeries& series, const rates::RateQuery& q,
                         double t_max = std::numeric_limits<double>::infinity());

// ----------------------------------------------------------------- report

struct ExperimentResult {
    std::string name;
    std::string kind;
    /// "pass", "fail", "infeasible" or "error".
    std::string status = "error";
    std::string message;
    double predicted = std::numeric_limits<double>::quiet_NaN();
    std::optional<DecayFit> fit;
    double tolerance = 0.05;
    double r2_min = 0.98;
    std::string mode;
    double p = std::numeric_limits<double>::quiet_NaN();
    double data_norm = std::numeric_limits<double>::quiet_NaN();
    bool blowup = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double weighted_sup = std::numeric_limits<double>::quiet_NaN();
    double weighted_sup_half = std::numeric_limits<double>::quiet_NaN();
    double boundary_ring = std::numeric_limits<double>::quiet_NaN();
    std::string rates_json;
    /// Per-experiment series (t, value columns).
    std::string csv;
    /// Wall time; kept out of the JSON so reports stay byte-identical.
    double runtime_seconds = 0.0;

    bool passed() const { return status == "pass"; }
};

struct Report {
    std::vector<ExperimentResult> entries;

    bool all_passed() const;
    std::string to_json() const;
    /// report.json, <name>.csv per entry and timings.csv into `dir`.
    void write(const std::string& dir) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Worker count: DSIG_MAX_WORKERS if set (≥ 1), else hardware concurrency.
int max_workers();

/// Runs every config concurrently; per-experiment errors are recorded in
/// the entry, never thrown. Entry order follows the input order.
Report run_verification(std::span<const ExperimentConfig> configs);

/// Loads configs from files and directories (*.cfg, sorted by name).
std::vector<ExperimentConfig> load_config_set(std::span<const std::string> paths);

// ------------------------------------------------------ single-run helpers

/// CSV `rho,re_lambda1,im_lambda1,re_lambda2,im_lambda2,regime` over a log grid.
std::string roots_csv(const ExperimentConfig& cfg);

struct KernelOutput {
    std::string profile_csv;
    std::string norms_json;
};

/// Profile at kernel.t with its L^r norms for every r in kernel.norms.
KernelOutput kernel_run(const ExperimentConfig& cfg);

struct SimulationOutput {
    evolution::NormSeries series;
    std::string csv;
    std::string summary_json;
};

/// Linear (semilinear = false) or semilinear run of a config.
SimulationOutput simulate(const ExperimentConfig& cfg, bool semilinear);

/// Admissibility and exponent JSON for the config's query.
std::string rates_run(const ExperimentConfig& cfg);

}  // namespace dsig::harness

#endif
