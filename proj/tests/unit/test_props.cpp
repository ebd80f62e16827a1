// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/generator.hpp"
#include "srforge/parse.hpp"
#include "srforge/property.hpp"

using namespace srforge;

namespace {

PropertyLabel L(const char* s) { return PropertyLabel::parse(s); }

Verdict verdict(const char* expr, const char* label, SamplingSpec dom = SamplingSpec::uniform(-3, 3, 100))
{
    return check_property(parse_expression(expr), {}, L(label), dom).verdict;
}

} // namespace

TEST_CASE("label names round-trip")
{
    for (const char* s : {"periodic-in(x1)", "periodic-in(x3)", "symmetric-even", "symmetric-odd-origin",
                          "monotone-increasing", "monotone-decreasing", "convex", "concave(x2)", "bounded"}) {
        CHECK(L(s).to_string() == s);
    }
    CHECK_THROWS(PropertyLabel::parse("wiggly"));
}

TEST_CASE("textbook functions get the expected verdicts")
{
    CHECK(verdict("x1 * x1", "convex") == Verdict::Holds);
    CHECK(verdict("x1 * x1", "symmetric-even") == Verdict::Holds);
    CHECK(verdict("x1 * x1", "monotone-increasing") == Verdict::Fails);
    CHECK(verdict("x1 * x1 * x1", "symmetric-odd-origin") == Verdict::Holds);
    CHECK(verdict("x1 * x1 * x1", "monotone-increasing") == Verdict::Holds);
    CHECK(verdict("x1 * x1 * x1", "convex") == Verdict::Fails);
    CHECK(verdict("exp(x1)", "convex") == Verdict::Holds);
    CHECK(verdict("exp(x1)", "concave") == Verdict::Fails);
    CHECK(verdict("-exp(x1)", "monotone-decreasing") == Verdict::Holds);
    CHECK(verdict("sin(x1)", "symmetric-odd-origin") == Verdict::Holds);
    CHECK(verdict("cos(x1)", "symmetric-even") == Verdict::Holds);
    CHECK(verdict("cos(x1) + x1", "symmetric-even") == Verdict::Fails);
    CHECK(verdict("tanh(x1)", "bounded") == Verdict::Holds);
}

TEST_CASE("a flat function is both monotone directions and both curvatures")
{
    for (const char* l : {"monotone-increasing", "monotone-decreasing", "convex", "concave"})
        CHECK(verdict("[+, x1, -, 2.5, x1]", l) == Verdict::Holds);
}

TEST_CASE("failures carry witnesses that re-evaluate")
{
    auto t = parse_expression("sin(x1)");
    auto dom = SamplingSpec::uniform(-3, 3, 100);
    auto rep = check_property(t, {}, L("monotone-increasing"), dom);
    REQUIRE(rep.verdict == Verdict::Fails);
    REQUIRE(!rep.witnesses.empty());
    const auto& w = rep.witnesses.front();
    CHECK(w.points.size() == 2);
    CHECK(w.values[0] > w.values[1]);
    CHECK(w.excess > 0.0);
    CHECK(witness_confirms(t, {}, rep, w));
    CHECK(w.values[0] == doctest::Approx(std::sin(w.points[0][0])));
}

TEST_CASE("periodicity comes from a structural certificate")
{
    auto dom = SamplingSpec::uniform(-3, 3, 100);
    auto rep = check_property(parse_expression("sin(2 * x1) + cos(3 * x1)"), {}, L("periodic-in(x1)"), dom);
    REQUIRE(rep.holds());
    REQUIRE(rep.period);
    CHECK(*rep.period == doctest::Approx(2 * std::numbers::pi).epsilon(1e-9));
    CHECK(verdict("sin(x1) + x1", "periodic-in(x1)") != Verdict::Holds);
    CHECK(verdict("sin(x1) * sin(1.41421356237 * x1)", "periodic-in(x1)") != Verdict::Holds);
    auto two = check_property(parse_expression("sin(x1) * x2"), {}, L("periodic-in(x1)"), dom, 2);
    CHECK(two.holds());
    CHECK(check_property(parse_expression("sin(x1) * x2"), {}, L("periodic-in(x2)"), dom, 2).verdict != Verdict::Holds);
    auto p = structural_period(parse_expression("[sin, *, C, x1]"), std::vector<double>{0.5}, 0);
    REQUIRE(p);
    CHECK(*p == doctest::Approx(4 * std::numbers::pi));
}

TEST_CASE("faults make the verdict inconclusive and asymmetric domains reject symmetry")
{
    CHECK(verdict("log(x1)", "monotone-increasing") == Verdict::Inconclusive);
    CHECK(verdict("log(x1)", "monotone-increasing", SamplingSpec::uniform(0.01, 4, 100)) == Verdict::Holds);
    CHECK_THROWS_AS(check_property(parse_expression("x1 * x1"), {}, L("symmetric-even"), SamplingSpec::uniform(0, 3, 10)),
                    UnsupportedDomain);
}

TEST_CASE("multivariate checks scan every axis")
{
    auto dom = SamplingSpec::uniform(-2, 2, 100);
    CHECK(check_property(parse_expression("x1 + x2"), {}, L("monotone-increasing"), dom, 2).holds());
    CHECK(check_property(parse_expression("x1 - x2"), {}, L("monotone-increasing"), dom, 2).verdict == Verdict::Fails);
    CHECK(check_property(parse_expression("x1 - x2"), {}, L("monotone-increasing(x1)"), dom, 2).holds());
    CHECK(check_property(parse_expression("x1 * x1 + x2 * x2"), {}, L("convex"), dom, 2).holds());
}

TEST_CASE("success rate counts inconclusive against")
{
    std::vector<Candidate> cs = {{parse_expression("x1"), {}}, {parse_expression("-x1"), {}}, {parse_expression("log(x1)"), {}}};
    CHECK(success_rate(cs, L("monotone-increasing"), SamplingSpec::uniform(-1, 1, 10)) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(success_rate({}, L("convex"), SamplingSpec::uniform(-1, 1, 10)), ConfigError);
}

TEST_CASE("structural periods hold numerically on generated trees")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::extended(), 1);
    cfg.max_length = 15;
    Rng rng(21);
    std::size_t certified = 0;
    for (int i = 0; i < 4000; ++i) {
        auto t = generate_expression(cfg, rng);
        auto c = draw_constants(cfg, t.constant_count(), rng);
        auto p = structural_period(t, c, 0);
        if (!p) continue;
        ++certified;
        std::vector<std::vector<double>> a, b;
        for (int k = 0; k < 40; ++k) {
            double x = -2.0 + 0.1 * k;
            a.push_back({x});
            b.push_back({x + *p});
        }
        auto ea = evaluate(t, Matrix::from_rows(a), c);
        auto eb = evaluate(t, Matrix::from_rows(b), c);
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (ea.faulted[k] || eb.faulted[k]) continue;
            double scale = std::max(1.0, std::fabs(ea.values[k]));
            CHECK(std::fabs(ea.values[k] - eb.values[k]) <= 1e-6 * scale);
        }
    }
    CHECK(certified > 50);
}

TEST_CASE("convex and concave both hold only for affine functions")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::primitives(), 1);
    cfg.max_length = 12;
    Rng rng(8);
    auto dom = SamplingSpec::uniform(-2, 2, 50);
    for (int i = 0; i < 300; ++i) {
        auto t = generate_expression(cfg, rng);
        auto c = draw_constants(cfg, t.constant_count(), rng);
        bool vex = check_property(t, c, L("convex"), dom).holds();
        bool cave = check_property(t, c, L("concave"), dom).holds();
        if (!(vex && cave)) continue;
        // an affine function has values on the chord through its endpoints
        auto ev = evaluate(t, Matrix::from_rows({{-2.0}, {0.3}, {2.0}}), c);
        REQUIRE(ev.ok());
        double chord = ev.values[0] + (ev.values[2] - ev.values[0]) * (2.3 / 4.0);
        CHECK(ev.values[1] == doctest::Approx(chord).epsilon(1e-5).scale(std::max(1.0, std::fabs(chord))));
    }
}
