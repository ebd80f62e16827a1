// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/chain.hpp"
#include "srforge/dataset.hpp"
#include "srforge/fit.hpp"
#include "srforge/property.hpp"
#include "srforge/token.hpp"

namespace srforge {

struct SearchFilter {
    enum class Kind { Property, MustContain };
    Kind kind = Kind::Property;
    PropertyLabel label;         // Property
    std::vector<Token> symbols;  // MustContain

    std::string to_string() const;
};

// Accepts a JSON list whose items are property names ("convex",
// "periodic-in(x1)") or objects {"property": name} / {"must_contain": [names]}.
std::vector<SearchFilter> parse_filters(const nlohmann::json& j, const OperatorRegistry& registry);
nlohmann::ordered_json to_json(const std::vector<SearchFilter>& filters);

bool contains_symbols(const ExprTree& tree, std::span<const Token> symbols);

// Re-checks one filter on a fitted candidate; property filters need a holds
// verdict.
bool filter_satisfied(const ExprTree& tree, std::span<const double> constants, const SearchFilter& filter,
                      const SamplingSpec& domain, std::size_t dims);

struct SearchConfig {
    std::size_t population = 150;
    std::size_t generations = 1000;
    double crossover_rate = 0.5;
    double subtree_mutation_rate = 0.25;
    double point_mutation_rate = 0.2; // the remainder is plain reproduction
    std::size_t tournament = 4;
    std::size_t elites = 2;
    // Generations without improvement before the non-elite population is
    // redrawn; 0 disables restarts.
    std::size_t stagnation_generations = 30;
    // Tournament fitness is reward - parsimony * length.
    double parsimony = 1e-3;
    // Distinct top candidates refit with final_restarts at the end.
    std::size_t beam_width = 5;
    std::size_t max_length = 30;
    std::size_t init_max_length = 12;
    std::size_t max_constants = 8;
    int fit_restarts = 2;
    int fit_iterations = 100;
    int final_restarts = 10;
    std::size_t eval_budget = 100000; // constant fits
    double time_budget_secs = 60.0;
    double target_r2 = 1.0 - 1e-12;
    std::uint64_t seed = 1;
    OperatorRegistry registry = OperatorRegistry::primitives();
    std::vector<SearchFilter> filters;
    // Domain for property filters; the dataset's sampling spec when unset.
    std::optional<SamplingSpec> property_domain;

    void validate() const;
};

SearchConfig search_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SearchConfig& cfg);

struct SearchResult {
    ExprTree best;
    std::vector<double> constants;
    double reward = 0.0;
    double r2 = 0.0;
    InferenceChain chain; // one entry per generation, as searched
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    bool budget_exhausted = false; // evaluation or time budget ran out
};

// Fit settings the search uses for a given structure; refitting a chain entry
// with these reproduces its constants and reward.
FitOptions search_fit_options(const SearchConfig& cfg, const ExprTree& tree);

// Throws BudgetExhausted only when no admissible candidate was ever found.
SearchResult search(const Dataset& ds, const SearchConfig& cfg);

} // namespace srforge
