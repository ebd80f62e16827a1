// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srforge/dataset.hpp"
#include "srforge/tree.hpp"

namespace srforge {

enum class ConstraintRule {
    NestedTrig,        // a trig function inside another trig function
    NegativeArgument,  // log/sqrt argument not provably nonnegative
};

struct Violation {
    ConstraintRule rule;
    std::vector<int> path; // child-index path to the offending node
    std::string subtree;   // bracketed preorder of the offending node
};

struct ConstraintReport {
    std::vector<Violation> violations;
    bool valid() const noexcept { return violations.empty(); }
};

// Variable lower bounds used by the nonnegativity rule; a variable is
// nonnegative when its sampling domain has low >= 0.
struct SignContext {
    std::vector<double> variable_lows;

    static SignContext from_spec(const SamplingSpec& spec, std::size_t dims);
    bool variable_nonnegative(std::uint16_t var) const;
    bool variable_positive(std::uint16_t var) const;
};

enum class Sign { Positive, Nonnegative, Unknown };

// Structural sign of the subtree at `node`. Literal values count; placeholder
// C is of unknown sign.
Sign structural_sign(const ExprTree& tree, std::size_t node, const SignContext& ctx = {});

ConstraintReport check_constraints(const ExprTree& tree, const SignContext& ctx = {});

std::string to_string(ConstraintRule rule);

} // namespace srforge
