// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srforge/token.hpp"
#include "srforge/tree.hpp"

namespace srforge {

struct ParseOptions {
    OperatorRegistry registry = OperatorRegistry::extended();
    // Names bound to x1, x2, ... in order. Empty means x, x1, x2, ... only.
    std::vector<std::string> variable_names;
};

// Accepts either infix with function-call notation ("sin(x1) + pow(x1, 0.5)")
// or the bracketed preorder form ("[+, sin, x1, cos, x1]").
ExprTree parse_expression(std::string_view text, const ParseOptions& options = {});

ExprTree parse_infix(std::string_view text, const ParseOptions& options = {});
ExprTree parse_bracketed(std::string_view text, const OperatorRegistry& registry = OperatorRegistry::extended());
ExprTree parse_token_names(std::span<const std::string> names,
                           const OperatorRegistry& registry = OperatorRegistry::extended());

// Every "[...]" group in free text that parses as a complete preorder.
std::vector<ExprTree> find_bracketed(std::string_view text,
                                     const OperatorRegistry& registry = OperatorRegistry::extended());

} // namespace srforge
