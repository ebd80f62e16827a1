// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srforge/dataset.hpp"
#include "srforge/tree.hpp"

namespace srforge {

// Denominators with smaller magnitude are domain faults.
inline constexpr double kDivisionGuard = 1e-12;

struct EvalResult {
    std::vector<double> values;
    std::vector<std::uint8_t> faulted; // 1 where the row hit a domain fault
    std::size_t fault_count = 0;

    bool ok() const noexcept { return fault_count == 0; }
};

// Elementwise evaluation over the rows of X. `constants` binds the
// placeholders in preorder order; throws ConstantCountMismatch otherwise.
// Rows where any node leaves its domain (log/sqrt of a negative, |den| below
// the guard, non-finite intermediates) are flagged in the mask.
EvalResult evaluate(const ExprTree& tree, const Matrix& X, std::span<const double> constants = {});

// Evaluates the subtree at `node`, which must not reference variables.
// Returns NaN on a domain fault.
double evaluate_constant_subtree(const ExprTree& tree, std::size_t node, std::span<const double> constants);

double apply_unary(Op op, double a, bool& fault);
double apply_binary(Op op, double a, double b, bool& fault);

} // namespace srforge
