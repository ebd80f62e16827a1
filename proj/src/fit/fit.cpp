// SPDX-License-Identifier: Apache-2.0
#include "srforge/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "srforge/bfgs.hpp"
#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/generator.hpp"
#include "srforge/metrics.hpp"
#include "srforge/rng.hpp"

namespace srforge {

namespace {

double mse_of(const EvalResult& r, std::span<const double> y)
{
    if (!r.ok()) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = r.values[i] - y[i];
        s += d * d;
    }
    return s / static_cast<double>(y.size());
}

double fit_r2(const EvalResult& r, std::span<const double> y)
{
    if (!r.ok()) return 0.0;
    try {
        return r_squared(y, r.values);
    } catch (const ZeroVariance&) {
        return mse_of(r, y) == 0.0 ? 1.0 : 0.0;
    }
}

} // namespace

FitResult fit_constants(const ExprTree& skeleton, const Dataset& ds, const FitOptions& opt)
{
    const std::size_t k = skeleton.constant_count();
    FitResult best;
    if (k == 0) {
        auto r = evaluate(skeleton, ds.X);
        if (!r.ok()) throw AllRestartsFaulted(fmt::format("{} faults on the data", skeleton.to_string()));
        best.mse = mse_of(r, ds.y);
        best.r2 = fit_r2(r, ds.y);
        best.converged = true;
        return best;
    }

    Objective objective = [&](std::span<const double> c) { return mse_of(evaluate(skeleton, ds.X, c), ds.y); };

    // exact-fit threshold relative to the target scale
    double var = 0.0;
    {
        const double sd = stddev(ds.y);
        var = sd * sd;
    }
    const double perfect = 1e-28 * std::max(1.0, var);

    Rng rng(opt.seed);
    std::uniform_real_distribution<double> init(-opt.init_range, opt.init_range);
    BfgsOptions bo;
    bo.max_iterations = opt.max_iterations;
    bo.gradient_tolerance = opt.gradient_tolerance;

    bool found = false;
    BfgsResult top;
    const int restarts = std::max(1, opt.restarts);
    const bool seeded = opt.initial && opt.initial->size() == k;
    std::vector<std::vector<double>> starts;
    if (seeded) starts.push_back(*opt.initial);
    {
        const int need = restarts - (seeded ? 1 : 0);
        const int pool = need * std::max(1, opt.screen);
        std::vector<std::pair<double, std::vector<double>>> drawn;
        drawn.reserve(pool);
        for (int i = 0; i < pool; ++i) {
            std::vector<double> x0(k);
            for (auto& c : x0) c = init(rng);
            double v = pool > need ? objective(x0) : 0.0;
            drawn.emplace_back(std::isfinite(v) ? v : std::numeric_limits<double>::infinity(), std::move(x0));
        }
        std::stable_sort(drawn.begin(), drawn.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int i = 0; i < need && i < pool; ++i) starts.push_back(std::move(drawn[i].second));
    }
    for (auto& x0 : starts) {
        ++best.restarts_used;
        auto res = bfgs_minimize(objective, std::move(x0), bo);
        if (!std::isfinite(res.value)) continue;
        if (!found || res.value < top.value) {
            top = std::move(res);
            found = true;
        }
        if (top.value <= perfect) break;
    }
    if (!found)
        throw AllRestartsFaulted(fmt::format("all {} starts faulted for {}", best.restarts_used, skeleton.to_string()));

    best.constants = top.x;
    best.mse = top.value;
    best.iterations = top.iterations;
    best.converged = top.converged;
    best.r2 = fit_r2(evaluate(skeleton, ds.X, best.constants), ds.y);
    return best;
}

FitResult fit_constants(const ExprTree& skeleton, const Dataset& ds, int restarts)
{
    FitOptions opt;
    opt.restarts = restarts;
    return fit_constants(skeleton, ds, opt);
}

double reward(const ExprTree& tree, std::span<const double> constants, const Dataset& ds)
{
    if (ds.y.empty()) return 0.0;
    auto r = evaluate(tree, ds.X, constants);
    if (!r.ok()) return 0.0;
    const double e = rmse(ds.y, r.values);
    const double sd = stddev(ds.y);
    const double nrmse = sd > 0.0 ? e / sd : e;
    if (!std::isfinite(nrmse)) return 0.0;
    return 1.0 / (1.0 + nrmse);
}

} // namespace srforge
