// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/constraints.hpp"
#include "srforge/dataset.hpp"
#include "srforge/rng.hpp"
#include "srforge/tree.hpp"

namespace srforge {

struct SymbolWeight {
    Token token;
    double weight = 1.0;
};

struct GenConfig {
    std::vector<SymbolWeight> weights;
    std::size_t max_length = 20;
    std::size_t dims = 1;
    std::uint64_t seed = 42;
    SamplingSpec spec = SamplingSpec::uniform(-1.0, 1.0, 20);
    std::vector<double> noise_levels;
    std::size_t max_constants = 8;
    std::size_t resample_cap = 100;
    // Constants are drawn from U(-constant_range, constant_range) with
    // |c| >= constant_min_magnitude.
    double constant_range = 5.0;
    double constant_min_magnitude = 0.05;

    // Default weights over the registry's operators plus x1..xd and C.
    static GenConfig defaults(const OperatorRegistry& registry, std::size_t dims);

    // Throws ConfigError on negative weights, no positive-weight terminal or
    // max_length == 0.
    void validate() const;
};

GenConfig gen_config_from_json(const nlohmann::json& j, const OperatorRegistry& registry);
nlohmann::ordered_json to_json(const GenConfig& cfg);

// Draws one token whose arity does not exceed `max_arity`.
using SymbolPicker = std::function<Token(int max_arity)>;

struct Assembly {
    std::vector<Token> preorder;
    std::vector<int> counts; // counter after each token; the last entry is 0
};

// The count-based stopping rule: count starts at 1, each drawn symbol s
// updates count <- count - 1 + arity(s), and drawing stops at count = 0.
// The picker is told the largest arity that still fits in max_length.
Assembly assemble_preorder(const SymbolPicker& pick, std::size_t max_length);

SymbolPicker weighted_picker(const GenConfig& cfg, Rng& rng);

// Rejection-samples until the tree satisfies constraints and the constant
// cap; throws BudgetExhausted after cfg.resample_cap attempts.
ExprTree generate_expression(const GenConfig& cfg, Rng& rng);

std::vector<double> draw_constants(const GenConfig& cfg, std::size_t count, Rng& rng);

// U: iid uniform rows; E: evenly spaced grid (a mesh of round(n^(1/d))
// points per axis when d > 1). Faulted rows are redrawn (U) or dropped (E);
// throws DomainUnsatisfiable when that does not converge.
Dataset sample_dataset(const ExprTree& tree, const SamplingSpec& spec, std::span<const double> constants, Rng& rng,
                       std::size_t dims = 0, std::size_t resample_cap = 100);

Matrix sample_inputs(const SamplingSpec& spec, std::size_t dims, Rng& rng);

// y' = y + sigma * std(y) * eps with eps ~ N(0, 1). sigma = 0 returns the
// dataset unchanged.
Dataset add_noise(const Dataset& ds, double sigma, Rng& rng);

double mean(std::span<const double> v);
double stddev(std::span<const double> v); // population

} // namespace srforge
