// SPDX-License-Identifier: Apache-2.0
#include "srforge/metrics.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "srforge/error.hpp"

namespace srforge {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat)
{
    if (y.size() != yhat.size())
        throw ConfigError(fmt::format("length mismatch: {} targets, {} predictions", y.size(), yhat.size()));
}

} // namespace

double r_squared(std::span<const double> y, std::span<const double> yhat)
{
    check_pair(y, yhat);
    if (y.size() < 2) throw ConfigError("r_squared needs at least two points");
    double ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    if (ss_tot == 0.0) throw ZeroVariance("targets have zero variance");
    return 1.0 - ss_res / ss_tot;
}

double rmse(std::span<const double> y, std::span<const double> yhat)
{
    check_pair(y, yhat);
    if (y.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return std::sqrt(s / static_cast<double>(y.size()));
}

MeanCi mean_ci(std::span<const double> samples, double level)
{
    MeanCi ci;
    const std::size_t n = samples.size();
    if (n == 0) return ci;
    for (double v : samples) ci.mean += v;
    ci.mean /= static_cast<double>(n);
    if (n < 2) return ci;
    double ss = 0.0;
    for (double v : samples) ss += (v - ci.mean) * (v - ci.mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
    ci.half_width = t * sd / std::sqrt(static_cast<double>(n));
    return ci;
}

} // namespace srforge
