// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "srforge/dialogue.hpp"

namespace srforge::templates {

inline constexpr std::size_t kVariants = 8;

// Human prompt for a single-turn family. Patterns use {symbols}, {length},
// {property} and {sigma}.
std::string_view human(TemplateKind kind, std::size_t variant);
std::string_view assistant(std::size_t variant);

// Later multi-turn prompts.
std::string_view followup_property(std::size_t variant);
std::string_view followup_symbols(std::size_t variant);
std::string_view followup_refine(std::size_t variant);
std::string_view followup_answer(std::size_t variant);

// "periodic in x1", "monotonically increasing", ...
std::string property_phrase(const PropertyLabel& label);

} // namespace srforge::templates
