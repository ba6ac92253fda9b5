// Command-line front end; talks to the library only through dsig.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsig/dsig.h"

namespace {

struct CliError {
    std::string message;
    int code;
};

void check(dsig_status s, const char* what) {
    if (s != DSIG_OK)
        throw CliError{std::string(what) + ": " + dsig_status_name(s) + ": " + dsig_last_error(), 2};
}

using TextPtr = std::unique_ptr<dsig_text, decltype(&dsig_text_free)>;
using ConfigPtr = std::unique_ptr<dsig_config, decltype(&dsig_config_free)>;
using ReportPtr = std::unique_ptr<dsig_report, decltype(&dsig_report_free)>;

TextPtr own(dsig_text* t) { return TextPtr(t, &dsig_text_free); }

void emit(const dsig_text* t, const std::string& path) {
    const std::string_view body(dsig_text_data(t), dsig_text_size(t));
    if (path.empty() || path == "-") {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError{"cannot write '" + path + "'", 2};
    f << body;
}

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("-c,--config", c.config, "Config file (key = value lines)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("-s,--set", c.sets, "Override one key: section.key=value (repeatable)");
    sub->add_option("-o,--out", c.out, "Output file (default: stdout)");
}

ConfigPtr load(const Common& c) {
    dsig_config* raw = nullptr;
    if (c.config.empty()) check(dsig_config_parse("", &raw), "config");
    else check(dsig_config_load(c.config.c_str(), &raw), "config");
    ConfigPtr cfg(raw, &dsig_config_free);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliError{"--set expects key=value, got '" + kv + "'", 2};
        check(dsig_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set");
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decay rates for doubly damped sigma-evolution equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dsig_version()));

    Common roots_o, kernel_o, linear_o, semi_o, rates_o;
    std::string norms_out, linear_summary, semi_summary, out_dir;
    std::vector<std::string> verify_paths;
    bool quiet = false;

    auto* roots = app.add_subcommand("roots", "Characteristic roots and regime over a log-spaced rho range (CSV)");
    add_common(roots, roots_o, false);

    auto* kernel = app.add_subcommand("kernel", "Kernel profile at kernel.t (CSV) and its L^r norms (JSON)");
    add_common(kernel, kernel_o, false);
    kernel->add_option("--norms-out", norms_out, "Norms JSON file (default: stderr)");

    auto* linear = app.add_subcommand("linear", "Linear simulation; norm series as CSV");
    add_common(linear, linear_o, true);
    linear->add_option("--summary", linear_summary, "Summary JSON file");

    auto* semi = app.add_subcommand("semilinear", "Semilinear simulation; norm series as CSV");
    add_common(semi, semi_o, true);
    semi->add_option("--summary", semi_summary, "Summary JSON file");

    auto* rates = app.add_subcommand("rates", "Decay exponents and admissibility report (JSON)");
    add_common(rates, rates_o, false);

    auto* verify = app.add_subcommand("verify", "Run a config set; exit 0 iff every entry passes");
    verify->add_option("paths", verify_paths, "Config files or directories of *.cfg");
    verify->add_option("-d,--out-dir", out_dir, "Write report.json, per-entry CSV and timings.csv here");
    verify->add_flag("-q,--quiet", quiet, "Suppress the per-entry status lines");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*roots) {
            auto cfg = load(roots_o);
            dsig_text* csv = nullptr;
            check(dsig_run_roots(cfg.get(), &csv), "roots");
            emit(own(csv).get(), roots_o.out);
        } else if (*kernel) {
            auto cfg = load(kernel_o);
            dsig_text* csv = nullptr;
            dsig_text* js = nullptr;
            check(dsig_run_kernel(cfg.get(), &csv, &js), "kernel");
            auto c = own(csv);
            auto j = own(js);
            emit(c.get(), kernel_o.out);
            if (norms_out.empty()) std::cerr << dsig_text_data(j.get());
            else emit(j.get(), norms_out);
        } else if (*linear || *semi) {
            const bool nl = static_cast<bool>(*semi);
            const Common& o = nl ? semi_o : linear_o;
            const std::string& summary = nl ? semi_summary : linear_summary;
            auto cfg = load(o);
            dsig_text* csv = nullptr;
            dsig_text* js = nullptr;
            int blowup = 0;
            check(dsig_run_simulation(cfg.get(), nl ? 1 : 0, &csv, &js, &blowup), nl ? "semilinear" : "linear");
            auto c = own(csv);
            auto j = own(js);
            emit(c.get(), o.out);
            if (!summary.empty()) emit(j.get(), summary);
            if (blowup) std::cerr << "blow-up detected; series truncated\n";
        } else if (*rates) {
            auto cfg = load(rates_o);
            dsig_text* js = nullptr;
            check(dsig_run_rates(cfg.get(), &js), "rates");
            emit(own(js).get(), rates_o.out);
        } else if (*verify) {
            std::vector<const char*> p;
            for (const auto& s : verify_paths) p.push_back(s.c_str());
            dsig_report* raw = nullptr;
            check(dsig_verify(p.data(), p.size(), &raw), "verify");
            ReportPtr rep(raw, &dsig_report_free);
            if (!out_dir.empty()) check(dsig_report_write(rep.get(), out_dir.c_str()), "verify");
            else {
                dsig_text* js = nullptr;
                check(dsig_report_json(rep.get(), &js), "verify");
                emit(own(js).get(), "");
            }
            const size_t n = dsig_report_size(rep.get());
            size_t passed = 0;
            for (size_t i = 0; i < n; ++i) {
                const std::string status = dsig_report_entry_status(rep.get(), i);
                if (status == "pass") ++passed;
                if (!quiet)
                    std::cerr << status << "  " << dsig_report_entry_name(rep.get(), i) << "  "
                              << dsig_report_entry_message(rep.get(), i) << "\n";
            }
            if (!quiet) std::cerr << passed << "/" << n << " passed\n";
            return dsig_report_all_passed(rep.get()) ? 0 : 1;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    }
    return 0;
}
