// SPDX-License-Identifier: Apache-2.0
#include "templates.hpp"

#include <array>

#include <fmt/format.h>

namespace srforge::templates {

namespace {

using Pool = std::array<std::string_view, kVariants>;

constexpr Pool kPlain = {
    "Please generate an expression that fits the uploaded data.",
    "Find a closed-form expression that reproduces these observations.",
    "Which formula explains the data above? Give it as an expression.",
    "Recover the symbolic expression behind this dataset.",
    "Fit the data with a mathematical expression.",
    "Derive an equation that matches the given samples.",
    "Give me an expression y = f(x) consistent with the data.",
    "Propose a symbolic model for the uploaded observations.",
};

constexpr Pool kProperty = {
    "Please generate an expression that fits the data and is {property}.",
    "Fit the data with an expression that is {property}.",
    "I know the underlying function is {property}. Find an expression for the data.",
    "Recover a formula for these samples; it must be {property}.",
    "Give an expression matching the data. Prior knowledge: the function is {property}.",
    "The target is {property}. Which expression fits the observations?",
    "Find a closed form for the data that is {property}.",
    "Derive an equation for the samples, keeping it {property}.",
};

constexpr Pool kMustContain = {
    "Please generate an expression that fits the data and contains the symbols {symbols}.",
    "Fit the data; the expression must use {symbols}.",
    "Find a formula for these observations that includes {symbols}.",
    "The answer should contain {symbols}. Which expression fits the data?",
    "Recover an expression for the data using at least the symbols {symbols}.",
    "Give an equation matching the samples that involves {symbols}.",
    "Derive a closed form for the data containing {symbols}.",
    "Propose an expression for the uploaded data with the symbols {symbols} in it.",
};

constexpr Pool kLength = {
    "Please generate an expression that fits the data with at most {length} symbols in its preorder sequence.",
    "Fit the data using no more than {length} symbols.",
    "Find a formula for the observations whose preorder length does not exceed {length}.",
    "Keep it short: at most {length} symbols. Which expression fits the data?",
    "Recover an expression for the data; the symbol sequence may have up to {length} tokens.",
    "Give an equation for the samples with a preorder sequence of length {length} or less.",
    "Derive a compact expression (at most {length} symbols) for this dataset.",
    "Propose a model for the data using {length} symbols or fewer.",
};

constexpr Pool kVocab = {
    "Please generate an expression that fits the data using only the symbols {symbols}.",
    "Fit the data; you may use only {symbols}.",
    "Find a formula for these observations built solely from {symbols}.",
    "Restrict yourself to the symbols {symbols}. Which expression fits the data?",
    "Recover an expression for the data with vocabulary limited to {symbols}.",
    "Give an equation matching the samples whose symbols all come from {symbols}.",
    "Derive a closed form for the data using nothing but {symbols}.",
    "Propose an expression for the uploaded data drawn only from {symbols}.",
};

constexpr Pool kNoisy = {
    "The data contains Gaussian noise (relative level {sigma}). Please generate an expression that fits it.",
    "These observations are noisy (sigma = {sigma} of the spread). Find the underlying expression.",
    "Fit the data, ignoring measurement noise of relative size {sigma}.",
    "Noise at level {sigma} was added to the targets. Recover the clean formula.",
    "Give the expression behind the data; expect noise of about {sigma} times std(y).",
    "Find a robust closed form for these noisy samples (noise level {sigma}).",
    "Despite noise of relative magnitude {sigma}, derive the generating equation.",
    "The targets are perturbed by noise (level {sigma}). Which expression explains them?",
};

constexpr Pool kAnswer = {
    "I have generated the expression {expr} for you.",
    "The expression is {expr}.",
    "A fitting expression is {expr}.",
    "Here is the expression: {expr}.",
    "My answer is {expr}.",
    "The data is explained by {expr}.",
    "I propose {expr}.",
    "The recovered expression is {expr}.",
};

constexpr Pool kFollowProperty = {
    "Good. Now make the expression {property}.",
    "Can you refine it so that it is {property}?",
    "The function should also be {property}. Please update the expression.",
    "Improve the fit and keep the expression {property}.",
    "Adjust the expression so it becomes {property}.",
    "Try again, this time with an expression that is {property}.",
    "Prior knowledge says the function is {property}. Revise your answer.",
    "Please give a better expression that is {property}.",
};

constexpr Pool kFollowSymbols = {
    "Good. Now try an expression that contains {symbols}.",
    "Can you refine it using {symbols}?",
    "Include {symbols} and fit the data better.",
    "Improve the expression; it should involve {symbols}.",
    "Revise the answer so that it uses {symbols}.",
    "Try again with {symbols} in the expression.",
    "A better fit needs {symbols}. Update the expression.",
    "Please give an improved expression containing {symbols}.",
};

constexpr Pool kFollowRefine = {
    "The fit can still be improved. Please refine the expression.",
    "Can you find a more accurate expression?",
    "That is close. Improve the fit.",
    "Please revise the expression to match the data better.",
    "Try to reduce the error further.",
    "The residuals are still large; refine your answer.",
    "Give a better-fitting expression.",
    "Improve on the previous expression.",
};

constexpr Pool kFollowAnswer = {
    "Based on your feedback, I generate the expression {expr} for you.",
    "Updated expression: {expr}.",
    "Taking that into account, the expression is {expr}.",
    "Here is the refined expression: {expr}.",
    "The improved answer is {expr}.",
    "Revised, the expression becomes {expr}.",
    "With that constraint, I propose {expr}.",
    "The better expression is {expr}.",
};

std::string_view at(const Pool& p, std::size_t v) { return p[v % kVariants]; }

} // namespace

std::string_view human(TemplateKind kind, std::size_t variant)
{
    switch (kind) {
    case TemplateKind::PlainFit:
    case TemplateKind::MultiTurn: return at(kPlain, variant);
    case TemplateKind::Property: return at(kProperty, variant);
    case TemplateKind::MustContain: return at(kMustContain, variant);
    case TemplateKind::LengthBound: return at(kLength, variant);
    case TemplateKind::RestrictedVocab: return at(kVocab, variant);
    case TemplateKind::NoisyRobust: return at(kNoisy, variant);
    }
    return at(kPlain, variant);
}

std::string_view assistant(std::size_t v) { return at(kAnswer, v); }
std::string_view followup_property(std::size_t v) { return at(kFollowProperty, v); }
std::string_view followup_symbols(std::size_t v) { return at(kFollowSymbols, v); }
std::string_view followup_refine(std::size_t v) { return at(kFollowRefine, v); }
std::string_view followup_answer(std::size_t v) { return at(kFollowAnswer, v); }

std::string property_phrase(const PropertyLabel& label)
{
    std::string scope = label.var ? fmt::format(" in x{}", *label.var + 1) : std::string{};
    switch (label.kind) {
    case PropertyKind::PeriodicIn: return "periodic" + scope;
    case PropertyKind::SymmetricEven: return "an even function (symmetric about the y-axis)";
    case PropertyKind::SymmetricOddOrigin: return "an odd function (symmetric about the origin)";
    case PropertyKind::MonotoneIncreasing: return "monotonically increasing" + scope;
    case PropertyKind::MonotoneDecreasing: return "monotonically decreasing" + scope;
    case PropertyKind::Convex: return "convex" + scope;
    case PropertyKind::Concave: return "concave" + scope;
    case PropertyKind::Bounded: return "bounded on the sampled domain";
    }
    return label.to_string();
}

} // namespace srforge::templates
