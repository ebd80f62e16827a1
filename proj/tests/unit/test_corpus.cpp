// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "srforge/constraints.hpp"
#include "srforge/corpus.hpp"
#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/generator.hpp"
#include "srforge/parse.hpp"

using namespace srforge;

TEST_CASE("count rule stops exactly at zero and respects max_length")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::primitives(), 2);
    Rng rng(5);
    auto pick = weighted_picker(cfg, rng);
    for (int i = 0; i < 2000; ++i) {
        auto a = assemble_preorder(pick, 15);
        REQUIRE(!a.preorder.empty());
        CHECK(a.preorder.size() <= 15);
        CHECK(a.counts.back() == 0);
        int count = 1;
        for (std::size_t k = 0; k < a.preorder.size(); ++k) {
            count += a.preorder[k].arity() - 1;
            CHECK(count == a.counts[k]);
        }
    }
}

TEST_CASE("nested trig and unsafe log/sqrt arguments are violations")
{
    CHECK_FALSE(check_constraints(parse_expression("sin(cos(x1))")).valid());
    CHECK_FALSE(check_constraints(parse_expression("tan(x1 + sin(x1))")).valid());
    CHECK(check_constraints(parse_expression("sin(x1) * cos(x1)")).valid());
    CHECK_FALSE(check_constraints(parse_expression("log(x1)")).valid());
    CHECK(check_constraints(parse_expression("log(x1 * x1 + 1)")).valid());
    CHECK(check_constraints(parse_expression("sqrt(exp(x1))")).valid());
    auto nonneg = SignContext::from_spec(SamplingSpec::uniform(0.0, 4.0, 10), 1);
    CHECK(check_constraints(parse_expression("sqrt(x1)"), nonneg).valid());
    auto r = check_constraints(parse_expression("x1 + sin(cos(x1))"));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == ConstraintRule::NestedTrig);
    CHECK(r.violations[0].path == std::vector<int>{1});
}

TEST_CASE("generated expressions satisfy the constraints and the constant cap")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::extended(), 2);
    cfg.max_constants = 3;
    Rng rng(9);
    for (int i = 0; i < 2000; ++i) {
        auto t = generate_expression(cfg, rng);
        CHECK(check_constraints(t, SignContext::from_spec(cfg.spec, 2)).valid());
        CHECK(t.constant_count() <= 3);
        CHECK(t.size() <= cfg.max_length);
    }
}

TEST_CASE("population stddev matches a two-pass oracle")
{
    std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
    CHECK(stddev(v) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mean(v) == doctest::Approx(5.0));
}

TEST_CASE("noise is linear in sigma and scaled by std(y)")
{
    auto t = parse_expression("x1 * x1 + x1");
    Rng r0(1);
    Dataset ds = sample_dataset(t, SamplingSpec::uniform(-2, 2, 500), {}, r0);
    const double sd = stddev(ds.y);
    Rng a(77), b(77);
    Dataset n1 = add_noise(ds, 0.1, a);
    Dataset n2 = add_noise(ds, 0.3, b);
    std::vector<double> eps;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        double d1 = n1.y[i] - ds.y[i];
        double d2 = n2.y[i] - ds.y[i];
        CHECK(d2 == doctest::Approx(3.0 * d1).epsilon(1e-9));
        eps.push_back(d1 / (0.1 * sd));
    }
    CHECK(std::fabs(mean(eps)) < 0.15);
    CHECK(stddev(eps) == doctest::Approx(1.0).epsilon(0.1));
    Rng c(77);
    CHECK(add_noise(ds, 0.0, c).y == ds.y);
    CHECK(n1.noise_sigma == 0.1);
}

TEST_CASE("sampled data is fault-free and matches evaluation")
{
    auto t = parse_expression("log(x1)");
    Rng rng(3);
    Dataset ds = sample_dataset(t, SamplingSpec::uniform(-1, 2, 200), {}, rng);
    CHECK(ds.rows() == 200);
    auto ev = evaluate(t, ds.X);
    CHECK(ev.ok());
    CHECK(ev.values == ds.y);
    for (double x : ds.X.col(0)) CHECK(x > 0.0);
    Rng r2(3);
    CHECK_THROWS_AS(sample_dataset(parse_expression("log(-1 - x1 * x1)"), SamplingSpec::uniform(-1, 1, 10), {}, r2),
                    DomainUnsatisfiable);
}

TEST_CASE("even spacing uses a mesh in several dimensions")
{
    Rng rng(0);
    Matrix m1 = sample_inputs(SamplingSpec::even(1, 50, 50), 1, rng);
    CHECK(m1.rows() == 50);
    CHECK(m1(0, 0) == 1.0);
    CHECK(m1(49, 0) == 50.0);
    Matrix m2 = sample_inputs(SamplingSpec::even(0, 1, 100), 2, rng);
    CHECK(m2.rows() == 100);
    std::set<double> xs(m2.col(0).begin(), m2.col(0).end());
    CHECK(xs.size() == 10);
}

TEST_CASE("corpus is deterministic, unique and independent of workers")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::primitives(), 1);
    cfg.seed = 7;
    CorpusStats st;
    auto a = generate_corpus(cfg, 300, 1, &st);
    auto b = generate_corpus(cfg, 300, 3);
    REQUIRE(a.size() == b.size());
    CHECK(st.emitted == a.size());
    std::set<std::string> keys;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(to_json(a[i]).dump() == to_json(b[i]).dump());
        keys.insert(a[i].tree.key());
    }
    CHECK(keys.size() == a.size());
    CHECK(generate_corpus(cfg, 0).empty());

    auto rec = corpus_record_from_json(nlohmann::json::parse(to_json(a[5]).dump()));
    CHECK(to_json(rec).dump() == to_json(a[5]).dump());
    CHECK(rec.materialize().y == a[5].materialize().y);
}

TEST_CASE("generator config rejects bad weights and unknown operators")
{
    auto cfg = GenConfig::defaults(OperatorRegistry::primitives(), 1);
    cfg.weights[0].weight = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    std::vector<std::string> names = {"+", "sine"};
    CHECK_THROWS_AS(OperatorRegistry::from_names(names), ConfigError);
}
