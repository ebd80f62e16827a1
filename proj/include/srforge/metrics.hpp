// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

namespace srforge {

// 1 - SS_res / SS_tot. Throws ZeroVariance when y is constant and
// ConfigError on a length mismatch or fewer than two points.
double r_squared(std::span<const double> y, std::span<const double> yhat);

double rmse(std::span<const double> y, std::span<const double> yhat);

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0; // 0 when fewer than two samples
    double low() const noexcept { return mean - half_width; }
    double high() const noexcept { return mean + half_width; }
};

// Student-t interval on the sample mean.
MeanCi mean_ci(std::span<const double> samples, double level = 0.95);

} // namespace srforge
