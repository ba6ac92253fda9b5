#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dsig/dsig.h"

namespace fs = std::filesystem;

namespace {

std::string take(dsig_text* t) {
    std::string s(dsig_text_data(t), dsig_text_size(t));
    dsig_text_free(t);
    return s;
}

}  // namespace

TEST_CASE("status names are distinct") {
    for (int a = DSIG_OK; a <= DSIG_INTERNAL; ++a)
        for (int b = a + 1; b <= DSIG_INTERNAL; ++b)
            CHECK(std::string(dsig_status_name(static_cast<dsig_status>(a))) !=
                  dsig_status_name(static_cast<dsig_status>(b)));
}

TEST_CASE("errors set the thread-local message and success clears it") {
    double v = 0.0;
    CHECK(dsig_bessel_j(0.25, 1.0, &v) == DSIG_UNSUPPORTED_ORDER);
    CHECK(std::string(dsig_last_error()).size() > 0);
    CHECK(dsig_bessel_j(0.5, 1.0, &v) == DSIG_OK);
    CHECK(std::string(dsig_last_error()).empty());
    CHECK(dsig_bessel_j(0.5, 1.0, nullptr) == DSIG_INVALID_ARGUMENT);
}

TEST_CASE("config errors surface as DSIG_CONFIG or DSIG_IO") {
    dsig_config* cfg = nullptr;
    CHECK(dsig_config_parse("params.nothing = 1\n", &cfg) == DSIG_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(dsig_config_load("/nonexistent.cfg", &cfg) == DSIG_IO);
    CHECK(dsig_config_parse("params.sigma = x\n", &cfg) == DSIG_OK);
    dsig_text* out = nullptr;
    CHECK(dsig_run_rates(cfg, &out) == DSIG_CONFIG);
    dsig_config_free(cfg);
}

TEST_CASE("roots and kernel through the C API") {
    dsig_config* cfg = nullptr;
    REQUIRE(dsig_config_parse("roots.count = 4\nkernel.t = 1\n", &cfg) == DSIG_OK);
    dsig_text* csv = nullptr;
    REQUIRE(dsig_run_roots(cfg, &csv) == DSIG_OK);
    const auto roots = take(csv);
    CHECK(roots.rfind("rho,", 0) == 0);
    dsig_text* prof = nullptr;
    dsig_text* norms = nullptr;
    REQUIRE(dsig_run_kernel(cfg, &prof, &norms) == DSIG_OK);
    CHECK(take(prof).rfind("r,re,im\n", 0) == 0);
    CHECK(take(norms).find("\"norms\"") != std::string::npos);
    dsig_config_free(cfg);
}

TEST_CASE("simulation through the C API") {
    dsig_config* cfg = nullptr;
    REQUIRE(dsig_config_parse("experiment.kind = linear\ngrid.points = 128\nsim.horizon = 2\nsim.t_first = 0.1\n"
                              "sim.samples = 5\nparams.n = 1\n",
                              &cfg) == DSIG_OK);
    dsig_text* csv = nullptr;
    dsig_text* js = nullptr;
    int blowup = -1;
    REQUIRE(dsig_run_simulation(cfg, 0, &csv, &js, &blowup) == DSIG_OK);
    CHECK(blowup == 0);
    const auto body = take(csv);
    CHECK(std::count(body.begin(), body.end(), '\n') == 7);
    CHECK(take(js).find("\"blowup\": false") != std::string::npos);
    dsig_config_free(cfg);
}

TEST_CASE("verify through the C API") {
    const auto dir = fs::temp_directory_path() / "dsig_capi_verify";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "r.cfg") << "experiment.name = r\nexperiment.kind = rates\nparams.n = 5\nrates.s = 2.75\nnl.p = auto\n";
    const std::string d = dir.string();
    const char* paths[] = {d.c_str()};
    dsig_report* rep = nullptr;
    REQUIRE(dsig_verify(paths, 1, &rep) == DSIG_OK);
    CHECK(dsig_report_size(rep) == 1);
    CHECK(dsig_report_all_passed(rep) == 1);
    CHECK(std::string(dsig_report_entry_name(rep, 0)) == "r");
    CHECK(std::string(dsig_report_entry_status(rep, 0)) == "pass");
    CHECK(dsig_report_entry_status(rep, 1) == nullptr);
    dsig_text* js = nullptr;
    REQUIRE(dsig_report_json(rep, &js) == DSIG_OK);
    CHECK(take(js).find("\"all_passed\": true") != std::string::npos);
    REQUIRE(dsig_report_write(rep, (dir / "out").string().c_str()) == DSIG_OK);
    CHECK(fs::exists(dir / "out" / "report.json"));
    dsig_report_free(rep);

    dsig_report* empty = nullptr;
    REQUIRE(dsig_verify(nullptr, 0, &empty) == DSIG_OK);
    CHECK(dsig_report_size(empty) == 0);
    CHECK(dsig_report_all_passed(empty) == 1);
    dsig_report_free(empty);
}
