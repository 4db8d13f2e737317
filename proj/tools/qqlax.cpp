// Command-line driver: runs a verification suite through the C interface.
#include <cstdio>
#include <cstring>
#include <string>

#include "CLI11.hpp"
#include "qqlax/qqlax.h"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kInternalError = 3 };

int report_error(qqlax_status s) {
    std::fprintf(stderr, "qqlax: %s\n", qqlax_last_error());
    return s == QQLAX_CONFIG_ERROR || s == QQLAX_IO_ERROR ? kConfigError : kInternalError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification suites for elliptic qq-characters and their Lax matrices"};
    app.set_version_flag("--version", std::string(qqlax_version()));
    app.require_subcommand(1);

    std::string suite, config_path, out_path, format = "json";
    uint64_t seed = 0;
    int degree = 0;
    bool timing = false;
    CLI::App* run = app.add_subcommand("run", "run a suite and write its report");
    run->add_option("--suite", suite, "theta, instanton, factorization, jacobi, lax-cm, lax-rs, spectral, trig, "
                                      "eigenvector, duality or all")
        ->required();
    run->add_option("--config", config_path, "JSON config file")->required();
    CLI::Option* seed_opt = run->add_option("--seed", seed, "overrides the config seed");
    CLI::Option* degree_opt = run->add_option("--degree", degree, "overrides the config degree");
    run->add_option("--out", out_path, "report path (stdout when omitted)");
    run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    run->add_flag("--timing", timing, "record the wall time in the JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kConfigError;
    }

    qqlax_config* cfg = nullptr;
    qqlax_status s = qqlax_config_from_file(config_path.c_str(), &cfg);
    if (s != QQLAX_OK) return report_error(s);
    s = qqlax_config_set_suite(cfg, suite.c_str());
    if (s == QQLAX_OK && *seed_opt) s = qqlax_config_set_seed(cfg, seed);
    if (s == QQLAX_OK && *degree_opt) s = qqlax_config_set_degree(cfg, degree);
    if (s != QQLAX_OK) {
        qqlax_config_free(cfg);
        return report_error(s);
    }

    qqlax_report* rep = nullptr;
    s = qqlax_run(cfg, &rep);
    qqlax_config_free(cfg);
    if (!rep) return report_error(s);

    char* text = nullptr;
    const qqlax_format fmt = format == "text" ? QQLAX_FORMAT_TEXT : QQLAX_FORMAT_JSON;
    const qqlax_status es = qqlax_report_emit(rep, fmt, timing || fmt == QQLAX_FORMAT_TEXT, &text);
    const bool passed = qqlax_report_passed(rep) != 0;
    qqlax_report_free(rep);
    if (es != QQLAX_OK) return report_error(es);

    int rc = passed ? kPass : kCheckFailed;
    if (out_path.empty()) {
        std::fputs(text, stdout);
    } else {
        FILE* f = std::fopen(out_path.c_str(), "wb");
        if (!f || std::fwrite(text, 1, std::strlen(text), f) != std::strlen(text)) {
            std::fprintf(stderr, "qqlax: cannot write %s\n", out_path.c_str());
            rc = kInternalError;
        }
        if (f) std::fclose(f);
    }
    qqlax_string_free(text);
    return rc;
}
