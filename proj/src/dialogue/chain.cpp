// SPDX-License-Identifier: Apache-2.0
#include "srforge/chain.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/parse.hpp"

namespace srforge {

Ocoi build_ocoi(const InferenceChain& chain, std::size_t T)
{
    if (chain.entries.empty()) throw ConfigError("cannot build an OCOI from an empty chain");
    if (T == 0) throw ConfigError("OCOI length T must be at least 1");
    std::vector<ChainEntry> sorted = chain.entries;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ChainEntry& a, const ChainEntry& b) { return a.reward < b.reward; });
    Ocoi out;
    out.T = T;
    const std::size_t keep = std::min(T, sorted.size());
    out.entries.assign(std::make_move_iterator(sorted.end() - static_cast<std::ptrdiff_t>(keep)),
                       std::make_move_iterator(sorted.end()));
    return out;
}

bool rewards_nondecreasing(const std::vector<ChainEntry>& entries)
{
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].reward < entries[i - 1].reward) return false;
    }
    return true;
}

nlohmann::ordered_json to_json(const ChainEntry& e)
{
    nlohmann::ordered_json j;
    j["generation"] = e.generation;
    auto pre = nlohmann::ordered_json::array();
    for (const auto& t : e.tree.preorder()) pre.push_back(t.name());
    j["preorder"] = pre;
    j["constants"] = e.constants;
    j["reward"] = e.reward;
    return j;
}

ChainEntry chain_entry_from_json(const nlohmann::json& j)
{
    ChainEntry e;
    e.generation = j.value("generation", std::size_t{0});
    e.tree = parse_token_names(j.at("preorder").get<std::vector<std::string>>());
    e.constants = j.value("constants", std::vector<double>{});
    e.reward = j.at("reward").get<double>();
    return e;
}

void write_chain(const InferenceChain& chain, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure(fmt::format("cannot open {} for writing", path.string()));
    for (const auto& e : chain.entries) out << to_json(e).dump() << '\n';
    if (!out) throw IoFailure(fmt::format("write to {} failed", path.string()));
}

} // namespace srforge
