#include <set>

#include "doctest.h"
#include "qqlax/errors.hpp"
#include "qqlax/suite.hpp"

using namespace qqlax;

namespace {

bool same(const CheckResult& a, const CheckResult& b) {
    auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.name == b.name && a.anchor == b.anchor && eq(a.max_rel_error, b.max_rel_error) && a.tolerance == b.tolerance &&
           a.pass == b.pass && a.cells == b.cells && a.failures == b.failures;
}

Report synthetic() {
    Report r;
    r.suite = "theta";
    r.seed = 42;
    r.version = "9.9.9";
    r.config.suite = "theta";
    r.config.seed = 42;
    r.config.x = {{1.0, 0.0}, {0.3, -0.1}};
    r.config.p = {{0.1, 0.2}, {-1e-300, 3.5e200}};
    CheckResult a;
    a.name = "alpha";
    a.anchor = "first \"quoted\" row";
    a.max_rel_error = 0.1 + 0.2;
    a.tolerance = 1e-12;
    a.pass = false;
    a.cells = 3;
    a.failures = {"k=1", "k=2"};
    CheckResult b;
    b.name = "beta";
    b.max_rel_error = std::numeric_limits<double>::infinity();
    b.tolerance = 0.0;
    b.cells = 0;
    r.checks = {a, b};
    return r;
}

}  // namespace

TEST_CASE("config parsing and validation") {
    const SuiteConfig c = parse_config(R"({"suite": "jacobi", "n_colors": 3, "seed": "7", "nome": [0.2, 0.05],
                                           "m": 0.5, "x": [[1, 0], [0.5, 0.1], [0.3, 0]]})");
    CHECK(c.suite == "jacobi");
    CHECK(c.n_colors == 3);
    CHECK(c.seed == 7);
    CHECK(c.nome == cplx(0.2, 0.05));
    CHECK(c.m == cplx(0.5, 0.0));
    CHECK(c.x.size() == 3);
    CHECK_NOTHROW(c.validate());
    CHECK_THROWS_AS(parse_config(R"({"colour": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nome": [1, 2, 3]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"degree": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nome": [1.5, 0]})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nome": [0, 1]})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite": "nope"})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"m": 0})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nome": 0.2, "x": [1, 0.5, 0.1]})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"x": [1, 0.5], "p": [0]})").validate(), ConfigError);
    SuiteConfig bad;
    bad.nome = 1.5;
    CHECK_THROWS_AS(run_suite(bad), ConfigError);
}

TEST_CASE("report JSON round trip") {
    const Report r = synthetic();
    for (bool timing : {false, true}) {
        Report with_time = r;
        with_time.wall_time = 1.0 / 3.0;
        const std::string text = emit_report(with_time, ReportFormat::Json, timing);
        const Report back = parse_report(text);
        CHECK(back.suite == r.suite);
        CHECK(back.seed == r.seed);
        CHECK(back.version == r.version);
        CHECK(back.wall_time == (timing ? 1.0 / 3.0 : 0.0));
        CHECK(back.config.x == r.config.x);
        CHECK(back.config.p == r.config.p);
        CHECK(back.config.nome == r.config.nome);
        REQUIRE(back.checks.size() == r.checks.size());
        for (std::size_t i = 0; i < r.checks.size(); ++i) CHECK(same(back.checks[i], r.checks[i]));
        // emit is a fixed point of parse
        CHECK(emit_report(back, ReportFormat::Json, timing) == text);
    }
    const std::string text = emit_report(r, ReportFormat::Json);
    CHECK(text.find("\"max_rel_error\": \"0.30000000000000004\"") != std::string::npos);
    CHECK(text.find("\"wall_time\": null") != std::string::npos);
    CHECK(text.find("\"m\": [\n      \"0.37\",") != std::string::npos);
}

TEST_CASE("text report has one status line per check") {
    const std::string text = emit_report(synthetic(), ReportFormat::Text);
    int pass = 0, fail = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        pass += line.rfind("PASS ", 0) == 0;
        fail += line.rfind("FAIL ", 0) == 0;
        pos = end + 1;
    }
    CHECK(pass == 1);
    CHECK(fail == 1);
}

TEST_CASE("suites run deterministically and merge by name") {
    SuiteConfig c;
    c.suite = "jacobi";
    c.n_colors = 3;
    c.seed = 7;
    const Report a = run_suite(c), b = run_suite(c);
    CHECK(a.pass());
    CHECK(a.checks.size() >= 3);
    CHECK(emit_report(a, ReportFormat::Json) == emit_report(b, ReportFormat::Json));
    for (std::size_t i = 1; i < a.checks.size(); ++i) CHECK(a.checks[i - 1].name < a.checks[i].name);

    c.suite = "factorization";
    c.degree = 0;
    const Report f = run_suite(c);
    CHECK(f.pass());
    for (const CheckResult& r : f.checks) CHECK(r.name.find("_deg1") == std::string::npos);
}

TEST_CASE("every suite passes with unique check names") {
    SuiteConfig c;
    c.suite = "all";
    const Report r = run_suite(c);
    std::set<std::string> names;
    for (const CheckResult& row : r.checks) {
        CHECK_MESSAGE(row.pass, row.name);
        CHECK(!row.anchor.empty());
        names.insert(row.name);
    }
    CHECK(names.size() == r.checks.size());
    CHECK(r.checks.size() > 150);
}

TEST_CASE("tolerance scale tightens the headline tolerances") {
    SuiteConfig c;
    c.suite = "theta";
    c.tolerance_scale = 1e-6;
    const Report r = run_suite(c);
    bool any_fail = false;
    for (const CheckResult& row : r.checks) any_fail |= !row.pass;
    CHECK(any_fail);
}
