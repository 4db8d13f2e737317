#include "qqlax/report.hpp"

#include <algorithm>
#include <cmath>

namespace qqlax {

namespace {
constexpr std::size_t kMaxFailures = 16;
}

void CheckResult::record(double err, const std::string& where) {
    ++cells;
    if (std::isnan(err)) err = INFINITY;
    max_rel_error = std::max(max_rel_error, err);
    if (err > tolerance) {
        pass = false;
        if (failures.size() < kMaxFailures) failures.push_back(where);
    }
}

void CheckResult::merge(const CheckResult& other) {
    cells += other.cells;
    max_rel_error = std::max(max_rel_error, other.max_rel_error);
    pass = pass && other.pass;
    for (const auto& f : other.failures)
        if (failures.size() < kMaxFailures) failures.push_back(f);
}

double rel_error(double abs_diff, double a_norm, double b_norm) {
    return abs_diff / std::max({1.0, a_norm, b_norm});
}

}  // namespace qqlax
