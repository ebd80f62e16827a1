// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/generator.hpp"

namespace srforge {

struct CorpusRecord {
    std::string id;
    ExprTree tree;
    std::vector<double> constants;
    SamplingSpec spec;
    double noise_sigma = 0.0;
    std::uint64_t data_seed = 0;
    std::size_t dims = 1;

    // Regenerates the (noisy, if noise_sigma > 0) dataset from data_seed.
    Dataset materialize() const;
};

struct CorpusStats {
    std::size_t requested = 0;
    std::size_t emitted = 0;
    std::size_t duplicates = 0;
    std::size_t rejected = 0; // sampling failed or y was constant
};

// Deterministic in (cfg, count): candidate k is drawn from its own stream
// derive_seed(cfg.seed, k), candidates are deduplicated by preorder in index
// order, so the worker count never changes the output.
std::vector<CorpusRecord> generate_corpus(const GenConfig& cfg, std::size_t count, std::size_t workers = 1,
                                          CorpusStats* stats = nullptr);

nlohmann::ordered_json to_json(const CorpusRecord& rec);
CorpusRecord corpus_record_from_json(const nlohmann::json& j);

void write_corpus(const std::vector<CorpusRecord>& records, const std::filesystem::path& path);
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);

} // namespace srforge
