#include "qqlax/qqlax.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "qqlax/errors.hpp"
#include "qqlax/suite.hpp"

struct qqlax_config {
    qqlax::SuiteConfig cfg;
};

struct qqlax_report {
    qqlax::Report rep;
};

namespace {

thread_local std::string last_error;

qqlax_status fail(qqlax_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
qqlax_status guarded(F&& f) {
    last_error.clear();
    try {
        return f();
    } catch (const qqlax::ConfigError& e) {
        return fail(QQLAX_CONFIG_ERROR, e.what());
    } catch (const std::exception& e) {
        return fail(QQLAX_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(QQLAX_INTERNAL_ERROR, "unknown exception");
    }
}

}  // namespace

extern "C" {

const char* qqlax_version(void) { return QQLAX_VERSION; }

const char* qqlax_last_error(void) { return last_error.c_str(); }

qqlax_status qqlax_config_default(qqlax_config** out) {
    if (!out) return fail(QQLAX_INTERNAL_ERROR, "null output pointer");
    return guarded([&] {
        *out = new qqlax_config{};
        return QQLAX_OK;
    });
}

qqlax_status qqlax_config_from_json(const char* json_text, qqlax_config** out) {
    if (!json_text || !out) return fail(QQLAX_INTERNAL_ERROR, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new qqlax_config{qqlax::parse_config(json_text)};
        return QQLAX_OK;
    });
}

qqlax_status qqlax_config_from_file(const char* path, qqlax_config** out) {
    if (!path || !out) return fail(QQLAX_INTERNAL_ERROR, "null argument");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) return fail(QQLAX_IO_ERROR, std::string("cannot read ") + path);
    std::ostringstream text;
    text << in.rdbuf();
    return qqlax_config_from_json(text.str().c_str(), out);
}

qqlax_status qqlax_config_set_suite(qqlax_config* cfg, const char* suite) {
    if (!cfg || !suite) return fail(QQLAX_INTERNAL_ERROR, "null argument");
    cfg->cfg.suite = suite;
    return QQLAX_OK;
}

qqlax_status qqlax_config_set_seed(qqlax_config* cfg, uint64_t seed) {
    if (!cfg) return fail(QQLAX_INTERNAL_ERROR, "null config");
    cfg->cfg.seed = seed;
    return QQLAX_OK;
}

qqlax_status qqlax_config_set_degree(qqlax_config* cfg, int degree) {
    if (!cfg) return fail(QQLAX_INTERNAL_ERROR, "null config");
    cfg->cfg.degree = degree;
    return QQLAX_OK;
}

void qqlax_config_free(qqlax_config* cfg) { delete cfg; }

qqlax_status qqlax_run(const qqlax_config* cfg, qqlax_report** out) {
    if (!cfg || !out) return fail(QQLAX_INTERNAL_ERROR, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new qqlax_report{qqlax::run_suite(cfg->cfg)};
        return (*out)->rep.pass() ? QQLAX_OK : QQLAX_CHECK_FAILED;
    });
}

int qqlax_report_passed(const qqlax_report* rep) { return rep && rep->rep.pass() ? 1 : 0; }

int qqlax_report_check_count(const qqlax_report* rep) { return rep ? int(rep->rep.checks.size()) : 0; }

double qqlax_report_wall_time(const qqlax_report* rep) { return rep ? rep->rep.wall_time : 0.0; }

qqlax_status qqlax_report_emit(const qqlax_report* rep, qqlax_format format, int with_timing, char** out) {
    if (!rep || !out) return fail(QQLAX_INTERNAL_ERROR, "null argument");
    *out = nullptr;
    return guarded([&] {
        const std::string s = qqlax::emit_report(
            rep->rep, format == QQLAX_FORMAT_TEXT ? qqlax::ReportFormat::Text : qqlax::ReportFormat::Json, with_timing != 0);
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) return fail(QQLAX_INTERNAL_ERROR, "out of memory");
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
        return QQLAX_OK;
    });
}

void qqlax_report_free(qqlax_report* rep) { delete rep; }

void qqlax_string_free(char* s) { std::free(s); }

}  // extern "C"
