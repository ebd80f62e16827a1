// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "srforge/chain.hpp"
#include "srforge/error.hpp"
#include "srforge/fit.hpp"
#include "srforge/generator.hpp"
#include "srforge/parse.hpp"
#include "srforge/search.hpp"

using namespace srforge;

namespace {

Dataset data_for(const char* expr, SamplingSpec spec = SamplingSpec::uniform(-1, 1, 20))
{
    Rng rng(2);
    return sample_dataset(parse_expression(expr), spec, {}, rng);
}

SearchConfig small(std::uint64_t seed)
{
    SearchConfig c;
    c.population = 40;
    c.generations = 15;
    c.eval_budget = 600;
    c.time_budget_secs = 1e9;
    c.beam_width = 2;
    c.final_restarts = 3;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("filters parse from names and objects")
{
    auto reg = OperatorRegistry::extended();
    auto f = parse_filters(nlohmann::json::parse(R"j(["convex", {"property": "periodic-in(x1)"}, {"must_contain": ["sin", "x1"]}])j"), reg);
    REQUIRE(f.size() == 3);
    CHECK(f[0].kind == SearchFilter::Kind::Property);
    CHECK(f[1].label.to_string() == "periodic-in(x1)");
    CHECK(f[2].kind == SearchFilter::Kind::MustContain);
    CHECK(f[2].symbols.size() == 2);
    CHECK_THROWS(parse_filters(nlohmann::json::parse(R"j([{"must_contain": ["sine"]}])j"), reg));
}

TEST_CASE("config validation")
{
    SearchConfig c;
    c.population = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    auto j = to_json(small(3));
    auto back = search_config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
}

TEST_CASE("search finds an easy polynomial")
{
    auto res = search(data_for("x1 * x1 + x1"), small(1));
    CHECK(res.r2 > 0.9999);
    CHECK(!res.chain.entries.empty());
    CHECK(res.evaluations > 0);
}

TEST_CASE("search is reproducible under an evaluation budget")
{
    auto ds = data_for("sin(x1) + x1 * x1 * x1");
    auto a = search(ds, small(5));
    auto b = search(ds, small(5));
    CHECK(a.best == b.best);
    CHECK(a.constants == b.constants);
    REQUIRE(a.chain.entries.size() == b.chain.entries.size());
    for (std::size_t i = 0; i < a.chain.entries.size(); ++i) CHECK(to_json(a.chain.entries[i]).dump() == to_json(b.chain.entries[i]).dump());
}

TEST_CASE("chain rewards are reproduced by refitting with the search's fit settings")
{
    auto ds = data_for("x1 * x1 * x1 + x1 * x1");
    auto cfg = small(8);
    auto res = search(ds, cfg);
    for (const auto& e : res.chain.entries) {
        CHECK(reward(e.tree, e.constants, ds) == doctest::Approx(e.reward).epsilon(1e-12));
        if (e.tree.constant_count() == 0) continue;
        auto fr = fit_constants(e.tree, ds, search_fit_options(cfg, e.tree));
        CHECK(reward(e.tree, fr.constants, ds) == doctest::Approx(e.reward).epsilon(1e-9));
    }
}

TEST_CASE("must-contain filters hold on every chain entry and the answer")
{
    auto ds = data_for("x1 * x1 + x1");
    auto cfg = small(2);
    cfg.filters = parse_filters(nlohmann::json::parse(R"j([{"must_contain": ["sin"]}])j"), cfg.registry);
    auto res = search(ds, cfg);
    std::vector<Token> sin = {Token::unary(Op::Sin)};
    CHECK(contains_symbols(res.best, sin));
    for (const auto& e : res.chain.entries) CHECK(contains_symbols(e.tree, sin));
}

TEST_CASE("property filters hold on every chain entry and the answer")
{
    auto ds = data_for("x1 * x1 * x1 + x1", SamplingSpec::uniform(-2, 2, 30));
    auto cfg = small(4);
    cfg.filters = parse_filters(nlohmann::json::parse(R"j(["monotone-increasing"])j"), cfg.registry);
    auto res = search(ds, cfg);
    auto label = PropertyLabel::parse("monotone-increasing");
    CHECK(check_property(res.best, res.constants, label, ds.spec).holds());
    for (const auto& e : res.chain.entries) CHECK(check_property(e.tree, e.constants, label, ds.spec).holds());
}
