// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "srforge/bench.hpp"
#include "srforge/error.hpp"
#include "srforge/parse.hpp"

using namespace srforge;

namespace {

BenchmarkCase make_case(const char* name, const char* expr, SamplingSpec spec = SamplingSpec::uniform(-1, 1, 20))
{
    BenchmarkCase c;
    c.suite = "test";
    c.name = name;
    c.expr = expr;
    c.truth = parse_expression(expr);
    c.dims = std::max<std::size_t>(1, c.truth.variable_span());
    c.spec = spec;
    return c;
}

std::filesystem::path temp_file(const char* name, const std::string& text)
{
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("every registered suite loads and its truths evaluate")
{
    auto names = suite_names();
    CHECK(names.size() == 13);
    std::size_t total = 0;
    for (const auto& n : names) {
        Suite s = load_suite(n);
        CHECK(!s.cases.empty());
        for (const auto& c : s.cases) {
            Rng rng(1);
            INFO(s.name, "/", c.name);
            CHECK_NOTHROW(sample_case(c, rng));
            CHECK(c.truth.variable_span() <= c.dims);
        }
        total += s.cases.size();
    }
    CHECK(total == 266);
    CHECK(load_suite("NGUYEN").cases.size() == 12);
    CHECK(load_suite("Knowledge").cases.size() == 50);
    CHECK_THROWS_AS(load_suite("nope"), UnknownSuite);
}

TEST_CASE("recovery accepts reparameterizations and rejects other functions")
{
    auto shifted = make_case("shift", "sin(x1) + 0.5");
    CHECK(recovery_check(parse_expression("[+, sin, x1, C]"), std::vector<double>{0.0}, shifted, 1).recovered);
    auto scaled = make_case("scale", "sin(1.3 * x1)");
    CHECK(recovery_check(parse_expression("[sin, *, C, x1]"), std::vector<double>{1.0}, scaled, 2).recovered);
    CHECK(recovery_check(parse_expression("sin(2 * x1)"), {}, scaled, 3).recovered);
    auto plain = make_case("sin", "sin(x1)");
    auto rc = recovery_check(parse_expression("cos(x1)"), {}, plain, 4);
    CHECK_FALSE(rc.recovered);
    CHECK(rc.heldout_r2 < kRecoveryThreshold);
    CHECK_FALSE(recovery_check(parse_expression("[*, C, x1]"), std::vector<double>{1.0}, plain, 5).recovered);
}

TEST_CASE("the ground truth regressor scores perfectly")
{
    Suite s = load_suite("nguyen");
    BenchOptions o;
    o.runs = 2;
    o.seed = 3;
    auto rep = run_benchmark(s, o);
    REQUIRE(rep.cases.size() == s.cases.size());
    for (const auto& c : rep.cases) {
        INFO(c.name);
        CHECK(c.r2.mean == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(c.recovery_rate == 1.0);
    }
    CHECK(rep.recovery_rate == 1.0);
    o.runs = 0;
    CHECK_THROWS_AS(run_benchmark(s, o), ConfigError);
}

TEST_CASE("reports are deterministic and independent of workers")
{
    Suite s = load_suite("constant");
    BenchOptions o;
    o.seed = 9;
    o.regressor = RegressorKind::GroundTruth;
    auto a = to_json(run_benchmark(s, o)).dump();
    o.workers = 3;
    auto b = to_json(run_benchmark(s, o)).dump();
    CHECK(a == b);
    CHECK(render_table(run_benchmark(s, o)).find("Recover") != std::string::npos);
}

TEST_CASE("external files skip malformed lines and score the rest")
{
    std::string text;
    text += R"({"case": "Nguyen-1", "preorder": ["+", "*", "x1", "*", "x1", "x1", "+", "*", "x1", "x1", "x1"]})" "\n";
    text += R"({"case": "Nguyen-2", "preorder": "[+, x1, C]"})" "\n";
    text += R"({"case": "Nguyen-3", "preorder": ["+", "x1"]})" "\n"; // malformed preorder
    for (int i = 4; i <= 10; ++i) text += fmt::format(R"({{"case": "Nguyen-{}", "preorder": "[C]"}})" "\n", i);
    auto path = temp_file("srforge_external.jsonl", text);
    auto ef = read_external(path);
    CHECK(ef.lines == 10);
    CHECK(ef.skipped == 1);
    CHECK(ef.errors.size() == 1);
    CHECK(ef.candidates.size() == 9);

    BenchOptions o;
    o.cases = {"Nguyen-1", "Nguyen-2", "Nguyen-4", "Nguyen-5"};
    auto rep = external_candidates(path, load_suite("nguyen"), o);
    CHECK(rep.skipped_lines == 1);
    REQUIRE(rep.cases.size() == 4);
    CHECK(rep.cases[0].r2.mean == doctest::Approx(1.0));
    CHECK(rep.cases[0].recovery_rate == 1.0);
    CHECK(rep.cases[1].recovery_rate == 0.0);
    // a fitted constant is the mean predictor
    CHECK(std::fabs(rep.cases[2].r2.mean) < 0.1);
    std::filesystem::remove(path);
}

TEST_CASE("knowledge labels are checked and disagreements carry witnesses")
{
    auto ag = property_agreement(load_suite("knowledge"));
    CHECK(ag.checked == 50);
    CHECK(ag.agreed >= 40);
    CHECK(ag.discrepancies.size() == ag.checked - ag.agreed);
    for (const auto& d : ag.discrepancies) {
        INFO(d.dump());
        CHECK(d.contains("case"));
        CHECK(!d.at("evidence").get<std::string>().empty());
    }
}
