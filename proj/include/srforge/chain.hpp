// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/tree.hpp"

namespace srforge {

struct ChainEntry {
    std::size_t generation = 0;
    ExprTree tree;
    std::vector<double> constants;
    double reward = 0.0;
};

enum class ChainOrder { AsSearched, RewardAscending };

struct InferenceChain {
    std::vector<ChainEntry> entries;
    ChainOrder order = ChainOrder::AsSearched;
};

struct Ocoi {
    std::vector<ChainEntry> entries;
    std::size_t T = 1;
};

// Stable ascending sort by reward (ties keep chain order), then the last T.
Ocoi build_ocoi(const InferenceChain& chain, std::size_t T);

bool rewards_nondecreasing(const std::vector<ChainEntry>& entries);

nlohmann::ordered_json to_json(const ChainEntry& e);
ChainEntry chain_entry_from_json(const nlohmann::json& j);
void write_chain(const InferenceChain& chain, const std::filesystem::path& path);

} // namespace srforge
