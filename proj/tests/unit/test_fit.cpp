// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>

#include "srforge/bfgs.hpp"
#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/fit.hpp"
#include "srforge/generator.hpp"
#include "srforge/metrics.hpp"
#include "srforge/parse.hpp"

using namespace srforge;

namespace {

Dataset make_data(const char* expr, std::vector<double> c, SamplingSpec spec, std::uint64_t seed = 1)
{
    Rng rng(seed);
    return sample_dataset(parse_expression(expr), spec, c, rng);
}

double mse_at(const ExprTree& t, const Dataset& ds, double c)
{
    std::vector<double> cs = {c};
    auto ev = evaluate(t, ds.X, cs);
    if (!ev.ok()) return std::numeric_limits<double>::infinity();
    double s = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) s += (ev.values[i] - ds.y[i]) * (ev.values[i] - ds.y[i]);
    return s / ds.rows();
}

} // namespace

TEST_CASE("BFGS minimizes Rosenbrock")
{
    Objective f = [](std::span<const double> x) {
        return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
    };
    auto r = bfgs_minimize(f, {-1.2, 1.0}, {.max_iterations = 500});
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.value < 1e-8);
}

TEST_CASE("BFGS treats non-finite values as infinitely bad")
{
    Objective f = [](std::span<const double> x) { return x[0] < 0 ? std::nan("") : (x[0] - 2) * (x[0] - 2); };
    auto r = bfgs_minimize(f, {0.5});
    CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("numerical gradient matches the analytic one")
{
    Objective f = [](std::span<const double> x) { return std::sin(x[0]) * x[1] * x[1]; };
    std::vector<double> x = {0.7, -1.3};
    auto g = numerical_gradient(f, x, f(x), 1e-6);
    CHECK(g[0] == doctest::Approx(std::cos(0.7) * 1.69).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx(std::sin(0.7) * 2 * -1.3).epsilon(1e-6));
}

TEST_CASE("one-constant fits match a brute-force grid oracle")
{
    struct Case {
        const char* truth;
        const char* skeleton;
    };
    for (auto [truth, skel] : {Case{"sin(1.7 * x1)", "[sin, *, C, x1]"}, Case{"x1 * x1 + 0.8", "[+, *, x1, x1, C]"},
                               Case{"exp(-0.45 * x1)", "[exp, *, C, x1]"}}) {
        Dataset ds = make_data(truth, {}, SamplingSpec::uniform(-2, 2, 60));
        auto skeleton = parse_expression(skel);
        double best = 0, best_mse = std::numeric_limits<double>::infinity();
        for (double v = -3.0; v <= 3.0; v += 1e-4) {
            double m = mse_at(skeleton, ds, v);
            if (m < best_mse) best_mse = m, best = v;
        }
        auto fr = fit_constants(skeleton, ds, 10);
        REQUIRE(fr.constants.size() == 1);
        CHECK(fr.constants[0] == doctest::Approx(best).epsilon(2e-4));
        CHECK(fr.mse <= best_mse + 1e-12);
        CHECK(fr.r2 > 0.999999);
    }
}

TEST_CASE("multi-constant fits recover printed constants")
{
    Dataset ds = make_data("3.39 * x1 * x1 * x1 + 2.12 * x1 * x1 + 1.78 * x1", {}, SamplingSpec::uniform(-1, 1, 40));
    auto fr = fit_constants(parse_expression("[+, *, C, *, x1, *, x1, x1, +, *, C, *, x1, x1, *, C, x1]"), ds, 10);
    CHECK(fr.constants[0] == doctest::Approx(3.39).epsilon(1e-6));
    CHECK(fr.constants[1] == doctest::Approx(2.12).epsilon(1e-6));
    CHECK(fr.constants[2] == doctest::Approx(1.78).epsilon(1e-6));
}

TEST_CASE("screened starts find both frequencies of a product of waves")
{
    Dataset ds = make_data("sin(1.5 * x1) * cos(0.5 * x2)", {}, SamplingSpec::uniform(0.1, 4, 100));
    auto sk = parse_expression("[*, sin, *, C, x1, cos, *, C, x2]");
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FitOptions o;
        o.seed = seed;
        hits += fit_constants(sk, ds, o).r2 > 0.999999;
    }
    CHECK(hits == 20);
}

TEST_CASE("fits are reproducible for a fixed seed")
{
    Dataset ds = make_data("sin(x1) + 0.3 * x1", {}, SamplingSpec::uniform(-3, 3, 50));
    FitOptions o;
    o.restarts = 4;
    o.seed = 99;
    auto sk = parse_expression("[+, *, C, sin, x1, *, C, x1]");
    auto a = fit_constants(sk, ds, o);
    auto b = fit_constants(sk, ds, o);
    CHECK(a.constants == b.constants);
    CHECK(a.mse == b.mse);
}

TEST_CASE("a skeleton that faults everywhere throws")
{
    Dataset ds = make_data("x1", {}, SamplingSpec::uniform(1, 2, 20));
    CHECK_THROWS_AS(fit_constants(parse_expression("[log, -, 0, +, 1, *, x1, exp, C]"), ds, 3), AllRestartsFaulted);
    CHECK_THROWS_AS(fit_constants(parse_expression("log(-1 - x1)"), ds, 3), AllRestartsFaulted);
}

TEST_CASE("r_squared agrees with a two-pass oracle")
{
    Rng rng(4);
    std::normal_distribution<double> n(0, 1);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> y(30), yh(30);
        for (int i = 0; i < 30; ++i) y[i] = n(rng) * 3 + 1, yh[i] = y[i] + n(rng) * 0.5;
        double m = 0;
        for (double v : y) m += v;
        m /= y.size();
        long double res = 0, tot = 0;
        for (int i = 0; i < 30; ++i) res += (long double)(y[i] - yh[i]) * (y[i] - yh[i]), tot += (long double)(y[i] - m) * (y[i] - m);
        double oracle = static_cast<double>(1 - res / tot);
        CHECK(std::fabs(r_squared(y, yh) - oracle) < 1e-12);
    }
    std::vector<double> y = {1, 2, 3, 4};
    std::vector<double> mean_pred(4, 2.5);
    CHECK(r_squared(y, mean_pred) == doctest::Approx(0.0));
    CHECK(r_squared(y, y) == 1.0);
    std::vector<double> flat(4, 1.0);
    CHECK_THROWS_AS(r_squared(flat, y), ZeroVariance);
    CHECK_THROWS_AS(r_squared(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("reward is one at an exact fit and zero on faults")
{
    Dataset ds = make_data("x1 * x1", {}, SamplingSpec::uniform(-1, 1, 30));
    CHECK(reward(parse_expression("x1 * x1"), {}, ds) == 1.0);
    double r = reward(parse_expression("x1"), {}, ds);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
    CHECK(reward(parse_expression("log(x1)"), {}, ds) == 0.0);
}

TEST_CASE("mean_ci uses Student t quantiles")
{
    std::vector<double> s = {1, 2, 3, 4, 5};
    auto ci = mean_ci(s, 0.95);
    CHECK(ci.mean == 3.0);
    // t(0.975, 4) = 2.776445, sample sd = sqrt(2.5)
    CHECK(ci.half_width == doctest::Approx(2.776445 * std::sqrt(2.5) / std::sqrt(5.0)).epsilon(1e-6));
    CHECK(mean_ci(std::vector<double>{7.0}).half_width == 0.0);
}
