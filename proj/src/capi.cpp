#include "dsig/dsig.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "dsig/error.hpp"
#include "dsig/harness.hpp"
#include "dsig/radial.hpp"
#include "dsig/symbols.hpp"

struct dsig_config {
    dsig::harness::Config cfg;
};

struct dsig_text {
    std::string data;
};

struct dsig_report {
    dsig::harness::Report report;
};

namespace {

thread_local std::string g_last_error;

dsig_status to_status(dsig::ErrorCode c) {
    using dsig::ErrorCode;
    switch (c) {
        case ErrorCode::InvalidArgument: return DSIG_INVALID_ARGUMENT;
        case ErrorCode::InvalidParams: return DSIG_INVALID_PARAMS;
        case ErrorCode::NoRealRootTail: return DSIG_NO_REAL_ROOT_TAIL;
        case ErrorCode::UnsupportedOrder: return DSIG_UNSUPPORTED_ORDER;
        case ErrorCode::TailNotConverged: return DSIG_TAIL_NOT_CONVERGED;
        case ErrorCode::ShapeMismatch: return DSIG_SHAPE_MISMATCH;
        case ErrorCode::BlowUp: return DSIG_BLOW_UP;
        case ErrorCode::InvalidQuery: return DSIG_INVALID_QUERY;
        case ErrorCode::DegenerateDenominator: return DSIG_DEGENERATE_DENOMINATOR;
        case ErrorCode::InsufficientSamples: return DSIG_INSUFFICIENT_SAMPLES;
        case ErrorCode::NonpositiveValue: return DSIG_NONPOSITIVE_VALUE;
        case ErrorCode::MissingChannel: return DSIG_MISSING_CHANNEL;
        case ErrorCode::Config: return DSIG_CONFIG;
        case ErrorCode::Io: return DSIG_IO;
    }
    return DSIG_INTERNAL;
}

template <class F>
dsig_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return DSIG_OK;
    } catch (const dsig::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return DSIG_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DSIG_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return DSIG_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) dsig::fail(dsig::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

dsig::ModelParams from_c(const dsig_params* p) {
    require(p, "params");
    dsig::ModelParams m{p->sigma, p->sigma1, p->sigma2, p->mu1, p->mu2, p->n};
    m.validate();
    return m;
}

dsig_text* text(std::string s) { return new dsig_text{std::move(s)}; }

dsig::harness::ExperimentConfig experiment(const dsig_config* cfg) {
    require(cfg, "config");
    return dsig::harness::ExperimentConfig::from_config(cfg->cfg);
}

}  // namespace

extern "C" {

const char* dsig_version(void) { return "1.0.0"; }

const char* dsig_last_error(void) { return g_last_error.c_str(); }

const char* dsig_status_name(dsig_status s) {
    switch (s) {
        case DSIG_OK: return "ok";
        case DSIG_INVALID_ARGUMENT: return "invalid_argument";
        case DSIG_INVALID_PARAMS: return "invalid_params";
        case DSIG_NO_REAL_ROOT_TAIL: return "no_real_root_tail";
        case DSIG_UNSUPPORTED_ORDER: return "unsupported_order";
        case DSIG_TAIL_NOT_CONVERGED: return "tail_not_converged";
        case DSIG_SHAPE_MISMATCH: return "shape_mismatch";
        case DSIG_BLOW_UP: return "blow_up";
        case DSIG_INVALID_QUERY: return "invalid_query";
        case DSIG_DEGENERATE_DENOMINATOR: return "degenerate_denominator";
        case DSIG_INSUFFICIENT_SAMPLES: return "insufficient_samples";
        case DSIG_NONPOSITIVE_VALUE: return "nonpositive_value";
        case DSIG_MISSING_CHANNEL: return "missing_channel";
        case DSIG_CONFIG: return "config";
        case DSIG_IO: return "io";
        case DSIG_INTERNAL: return "internal";
    }
    return "unknown";
}

dsig_params dsig_params_reference(int n) {
    const auto r = dsig::ModelParams::reference(n);
    return dsig_params{r.sigma, r.sigma1, r.sigma2, r.mu1, r.mu2, r.n};
}

dsig_status dsig_characteristic_roots(const dsig_params* p, double rho, dsig_roots* out) {
    return guarded([&] {
        require(out, "out");
        const auto r = dsig::symbols::characteristic_roots(from_c(p), rho);
        out->re_lambda1 = r.lambda1.real();
        out->im_lambda1 = r.lambda1.imag();
        out->re_lambda2 = r.lambda2.real();
        out->im_lambda2 = r.lambda2.imag();
        switch (r.regime) {
            case dsig::symbols::Regime::RealDistinct: out->regime = DSIG_REAL_DISTINCT; break;
            case dsig::symbols::Regime::ComplexPair: out->regime = DSIG_COMPLEX_PAIR; break;
            case dsig::symbols::Regime::Degenerate: out->regime = DSIG_DEGENERATE; break;
        }
    });
}

dsig_status dsig_multiplier(const dsig_params* p, dsig_multiplier_kind kind, double rho, double t, double* re,
                            double* im) {
    return guarded([&] {
        require(re, "re");
        require(im, "im");
        using K = dsig::symbols::MultiplierKind;
        K k;
        switch (kind) {
            case DSIG_K0: k = K::K0; break;
            case DSIG_K1: k = K::K1; break;
            case DSIG_DT_K0: k = K::DtK0; break;
            case DSIG_DT_K1: k = K::DtK1; break;
            default: dsig::fail(dsig::ErrorCode::InvalidArgument, "unknown multiplier kind");
        }
        const auto v = dsig::symbols::multiplier(from_c(p), k, rho, t);
        *re = v.real();
        *im = v.imag();
    });
}

dsig_status dsig_epsilon_star(const dsig_params* p, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = dsig::symbols::epsilon_star(from_c(p));
    });
}

dsig_status dsig_bessel_j(double mu, double x, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = dsig::radial::bessel_j(mu, x);
    });
}

dsig_status dsig_config_load(const char* path, dsig_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = nullptr;
        *out = new dsig_config{dsig::harness::Config::load(path)};
    });
}

dsig_status dsig_config_parse(const char* text_in, dsig_config** out) {
    return guarded([&] {
        require(text_in, "text");
        require(out, "out");
        *out = nullptr;
        *out = new dsig_config{dsig::harness::Config::parse(text_in)};
    });
}

dsig_status dsig_config_set(dsig_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg, "config");
        require(key, "key");
        require(value, "value");
        cfg->cfg.set(key, value);
    });
}

void dsig_config_free(dsig_config* cfg) { delete cfg; }

const char* dsig_text_data(const dsig_text* t) { return t ? t->data.c_str() : nullptr; }
size_t dsig_text_size(const dsig_text* t) { return t ? t->data.size() : 0; }
void dsig_text_free(dsig_text* t) { delete t; }

dsig_status dsig_run_roots(const dsig_config* cfg, dsig_text** csv) {
    return guarded([&] {
        require(csv, "csv");
        *csv = text(dsig::harness::roots_csv(experiment(cfg)));
    });
}

dsig_status dsig_run_kernel(const dsig_config* cfg, dsig_text** profile_csv, dsig_text** norms_json) {
    return guarded([&] {
        require(profile_csv, "profile_csv");
        require(norms_json, "norms_json");
        auto out = dsig::harness::kernel_run(experiment(cfg));
        *profile_csv = text(std::move(out.profile_csv));
        *norms_json = text(std::move(out.norms_json));
    });
}

dsig_status dsig_run_simulation(const dsig_config* cfg, int semilinear, dsig_text** csv, dsig_text** summary_json,
                                int* blowup) {
    return guarded([&] {
        require(csv, "csv");
        require(summary_json, "summary_json");
        auto out = dsig::harness::simulate(experiment(cfg), semilinear != 0);
        if (blowup) *blowup = out.series.blowup ? 1 : 0;
        *csv = text(std::move(out.csv));
        *summary_json = text(std::move(out.summary_json));
    });
}

dsig_status dsig_run_rates(const dsig_config* cfg, dsig_text** json) {
    return guarded([&] {
        require(json, "json");
        *json = text(dsig::harness::rates_run(experiment(cfg)));
    });
}

dsig_status dsig_verify(const char* const* paths, size_t count, dsig_report** out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(paths, "paths");
        std::vector<std::string> p;
        for (size_t i = 0; i < count; ++i) {
            require(paths[i], "path");
            p.emplace_back(paths[i]);
        }
        const auto cfgs = dsig::harness::load_config_set(p);
        *out = new dsig_report{dsig::harness::run_verification(cfgs)};
    });
}

size_t dsig_report_size(const dsig_report* r) { return r ? r->report.entries.size() : 0; }

int dsig_report_all_passed(const dsig_report* r) { return r && r->report.all_passed() ? 1 : 0; }

const char* dsig_report_entry_name(const dsig_report* r, size_t i) {
    return r && i < r->report.entries.size() ? r->report.entries[i].name.c_str() : nullptr;
}

const char* dsig_report_entry_status(const dsig_report* r, size_t i) {
    return r && i < r->report.entries.size() ? r->report.entries[i].status.c_str() : nullptr;
}

const char* dsig_report_entry_message(const dsig_report* r, size_t i) {
    return r && i < r->report.entries.size() ? r->report.entries[i].message.c_str() : nullptr;
}

dsig_status dsig_report_json(const dsig_report* r, dsig_text** json) {
    return guarded([&] {
        require(r, "report");
        require(json, "json");
        *json = text(r->report.to_json());
    });
}

dsig_status dsig_report_write(const dsig_report* r, const char* dir) {
    return guarded([&] {
        require(r, "report");
        require(dir, "dir");
        r->report.write(dir);
    });
}

void dsig_report_free(dsig_report* r) { delete r; }

int dsig_max_workers(void) { return dsig::harness::max_workers(); }

}  // extern "C"
