#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qqlax/elliptic.hpp"
#include "qqlax/report.hpp"

namespace qqlax {

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"theta",  "instanton", "factorization", "jacobi",
                                                   "lax-cm", "lax-rs",    "spectral",      "trig",
                                                   "eigenvector", "duality", "all"};
    return names;
}

// Batch configuration. n_colors and degree cap the ranges each suite sweeps; x and p, when given,
// replace the seeded phase-space point for the matching N.
struct SuiteConfig {
    std::string suite = "all";
    int n_colors = 4;
    int degree = 4;
    int window = 20;
    std::uint64_t seed = 1;
    cplx m{0.37, 0.05};
    cplx eps1{0.4137, 0.1029};
    cplx eps2{-0.1583, 0.3671};
    cplx nome{0.1, 0.0};
    cplx beta{0.8, 0.0};
    cplx nome6d{0.15, 0.03};
    std::vector<cplx> a;
    std::vector<cplx> x;
    std::vector<cplx> p;
    double tolerance_scale = 1.0;  // multiplies every numerical tolerance

    void validate() const;  // ConfigError
};

// Parses the JSON config (complex numbers as [re, im]); unknown keys are rejected.
SuiteConfig parse_config(const std::string& json_text);

struct Report {
    std::string suite;
    std::vector<CheckResult> checks;  // sorted by name
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::string version;
    SuiteConfig config;

    bool pass() const;
};

// Runs the checks of a suite concurrently and merges them in name order. Check failures become
// report rows; ConfigError and other Error types propagate.
Report run_suite(const SuiteConfig& cfg);

enum class ReportFormat { Json, Text };

// JSON numbers are written as decimal strings. wall_time is null unless `with_timing`, so reports
// for the same config and seed are byte-identical.
std::string emit_report(const Report& r, ReportFormat format, bool with_timing = false);

// Inverse of the JSON emitter (wall_time read back when present).
Report parse_report(const std::string& json_text);

}  // namespace qqlax
