// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srforge/dataset.hpp"
#include "srforge/tree.hpp"

namespace srforge {

struct FitOptions {
    int restarts = 10;
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    double init_range = 5.0; // restarts draw from U(-init_range, init_range)
    // Random starts are drawn screen times over and the lowest-loss ones are kept.
    int screen = 20;
    std::uint64_t seed = 0;
    // Used as the first start when its length matches the placeholder count.
    std::optional<std::vector<double>> initial;
};

struct FitResult {
    std::vector<double> constants;
    double r2 = 0.0;
    double mse = 0.0;
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
};

// Minimizes the mean squared error over the placeholders of `skeleton`,
// best of `restarts` starts. Throws AllRestartsFaulted when no start gives a
// fault-free evaluation.
FitResult fit_constants(const ExprTree& skeleton, const Dataset& ds, const FitOptions& options);
FitResult fit_constants(const ExprTree& skeleton, const Dataset& ds, int restarts = 10);

// 1 / (1 + RMSE / std(y)); 0 for any faulted row. When y is constant the
// RMSE itself is used as the error.
double reward(const ExprTree& tree, std::span<const double> constants, const Dataset& ds);

} // namespace srforge
