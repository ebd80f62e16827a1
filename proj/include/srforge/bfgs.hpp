// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace srforge {

using Objective = std::function<double(std::span<const double>)>;

struct BfgsOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8; // infinity norm
    double relative_step = 1e-6;      // h = relative_step * max(1, |x_i|)
};

struct BfgsResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false; // gradient below tolerance or line search stalled
};

// Quasi-Newton minimization with central-difference gradients and Armijo
// backtracking. Non-finite objective values are treated as +inf.
BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& options = {});

std::vector<double> numerical_gradient(const Objective& f, std::span<const double> x, double fx, double relative_step);

} // namespace srforge
