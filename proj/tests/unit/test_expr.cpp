// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/generator.hpp"
#include "srforge/parse.hpp"
#include "srforge/tree.hpp"

using namespace srforge;

namespace {

Matrix column(std::vector<double> xs)
{
    std::vector<std::vector<double>> rows;
    for (double x : xs) rows.push_back({x});
    return Matrix::from_rows(rows);
}

} // namespace

TEST_CASE("preorder round-trip over generated trees")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::extended(), 3);
    cfg.max_length = 30;
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        ExprTree t = generate_expression(cfg, rng);
        auto seq = to_preorder(t);
        REQUIRE(seq.size() == node_count(t));
        CHECK(from_preorder(seq) == t);
        CHECK(parse_bracketed(t.to_string()) == t);
        auto trace = arity_trace(seq);
        CHECK(trace.back() == 0);
        for (std::size_t k = 0; k + 1 < trace.size(); ++k) CHECK(trace[k] > 0);
    }
}

TEST_CASE("incomplete or overlong sequences are rejected")
{
    auto reg = OperatorRegistry::extended();
    std::vector<Token> open = {Token::binary(Op::Add), Token::variable(0)};
    CHECK_FALSE(is_complete_preorder(open));
    CHECK_THROWS_AS(from_preorder(open), MalformedSequence);
    std::vector<Token> extra = {Token::variable(0), Token::variable(0)};
    CHECK_THROWS_AS(from_preorder(extra), MalformedSequence);
    CHECK_THROWS_AS(parse_bracketed("[+, x1]", reg), MalformedSequence);
    CHECK_THROWS_AS(parse_bracketed("[frobnicate, x1]", reg), ParseFailure);
}

TEST_CASE("infix and bracketed forms agree")
{
    auto a = parse_expression("sin(x1) + cos(x1)");
    auto b = parse_expression("[+, sin, x1, cos, x1]");
    CHECK(a == b);
    CHECK(a.to_string() == "[+, sin, x1, cos, x1]");
    CHECK(parse_expression("x") == parse_expression("x1"));
    CHECK(parse_expression("x1 - x2 * x3").to_string() == "[-, x1, *, x2, x3]");
    CHECK(parse_expression("-x1").size() >= 2);
}

TEST_CASE("subtree splicing keeps sizes consistent")
{
    auto t = parse_expression("[+, sin, x1, *, x1, C]");
    CHECK(t.subtree_size(0) == t.size());
    auto child = t.child(0, 1);
    CHECK(t.subtree(child).to_string() == "[*, x1, C]");
    auto r = t.with_subtree(child, parse_expression("[cos, x1]"));
    CHECK(r.to_string() == "[+, sin, x1, cos, x1]");
    CHECK(r.parent(r.child(0, 1)) == 0);
    CHECK(t.constant_count() == 1);
}

TEST_CASE("evaluation matches direct formulas")
{
    auto t = parse_expression("[+, *, C, sin, x1, /, x1, C]");
    std::vector<double> xs;
    for (int i = 0; i < 50; ++i) xs.push_back(-3.0 + 0.13 * i);
    std::vector<double> c = {1.5, 2.5};
    auto res = evaluate(t, column(xs), c);
    REQUIRE(res.ok());
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(res.values[i] == doctest::Approx(1.5 * std::sin(xs[i]) + xs[i] / 2.5).epsilon(1e-14));
    CHECK_THROWS_AS(evaluate(t, column(xs), std::vector<double>{1.0}), ConstantCountMismatch);
}

TEST_CASE("domain faults are flagged per row")
{
    auto lg = parse_expression("log(x1)");
    auto res = evaluate(lg, column({-1.0, 0.5, 2.0}));
    CHECK(res.fault_count == 1);
    CHECK(res.faulted[0] == 1);
    CHECK(res.faulted[1] == 0);

    auto div = parse_expression("[/, C, x1]");
    res = evaluate(div, column({0.0, 1e-13, 0.1}), std::vector<double>{1.0});
    CHECK(res.faulted[0] == 1);
    CHECK(res.faulted[1] == 1);
    CHECK(res.faulted[2] == 0);

    auto sq = parse_expression("sqrt(x1)");
    CHECK(evaluate(sq, column({-1e-3})).fault_count == 1);
    CHECK(evaluate(sq, column({0.0})).ok());
}

TEST_CASE("skeletonize lifts literals but keeps integer exponents")
{
    std::vector<double> lits;
    auto s = skeletonize(parse_expression("3.39 * x1 ^ 3 + 2.12"), &lits);
    CHECK(s.constant_count() == 2);
    CHECK(lits == std::vector<double>{3.39, 2.12});
    CHECK(s.to_string().find("3") != std::string::npos);
}

TEST_CASE("find_bracketed returns every complete preorder in text")
{
    auto found = find_bracketed("first [x1] then [+, x1, C] and [broken, ] end");
    REQUIRE(found.size() == 2);
    CHECK(found.back().to_string() == "[+, x1, C]");
}
