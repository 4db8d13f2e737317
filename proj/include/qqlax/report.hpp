#pragma once

#include <string>
#include <vector>

namespace qqlax {

// Outcome of one numerical check: the worst relative discrepancy seen and the
// cells that exceeded the tolerance (capped, for readability).
struct CheckResult {
    std::string name;
    std::string anchor;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    int cells = 0;
    std::vector<std::string> failures;

    void record(double err, const std::string& where);
    void merge(const CheckResult& other);
    void finalize() { pass = pass && max_rel_error <= tolerance; }
};

// |a - b| / max(1, |a|, |b|)
double rel_error(double abs_diff, double a_norm, double b_norm);

}  // namespace qqlax
