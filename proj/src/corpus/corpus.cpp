// SPDX-License-Identifier: Apache-2.0
#include "srforge/corpus.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <unordered_set>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/parallel.hpp"
#include "srforge/parse.hpp"

namespace srforge {

namespace {

struct Candidate {
    std::optional<CorpusRecord> record;
    bool rejected = false;
};

Candidate draw_candidate(const GenConfig& cfg, std::size_t index)
{
    Candidate out;
    Rng rng = make_rng(cfg.seed, index);
    try {
        CorpusRecord rec;
        rec.tree = generate_expression(cfg, rng);
        rec.constants = draw_constants(cfg, rec.tree.constant_count(), rng);
        rec.spec = cfg.spec;
        rec.data_seed = derive_seed(cfg.seed, index ^ 0xda7aULL);
        if (!cfg.noise_levels.empty())
            rec.noise_sigma = cfg.noise_levels[std::uniform_int_distribution<std::size_t>(0, cfg.noise_levels.size() - 1)(rng)];
        rec.dims = cfg.dims;
        auto ds = rec.materialize();
        if (stddev(ds.y) <= 1e-12 * std::max(1.0, std::fabs(mean(ds.y)))) {
            out.rejected = true;
            return out;
        }
        out.record = std::move(rec);
    } catch (const DomainUnsatisfiable&) {
        out.rejected = true;
    }
    return out;
}

} // namespace

Dataset CorpusRecord::materialize() const
{
    Rng rng(data_seed);
    auto ds = sample_dataset(tree, spec, constants, rng, std::max(dims, tree.variable_span()));
    if (noise_sigma > 0.0) ds = add_noise(ds, noise_sigma, rng);
    return ds;
}

std::vector<CorpusRecord> generate_corpus(const GenConfig& cfg, std::size_t count, std::size_t workers,
                                          CorpusStats* stats)
{
    cfg.validate();
    CorpusStats local;
    local.requested = count;
    std::vector<CorpusRecord> out;
    out.reserve(count);
    std::unordered_set<std::string> seen;
    std::size_t next_index = 0;
    // generous ceiling on draws; tiny grammars cannot always supply `count`
    // distinct expressions
    const std::size_t max_draws = std::max<std::size_t>(1000, count * 50);
    while (out.size() < count && next_index < max_draws) {
        std::size_t batch = std::min<std::size_t>(std::max<std::size_t>(64, (count - out.size()) * 2), max_draws - next_index);
        std::vector<Candidate> drawn(batch);
        parallel_for(batch, workers, [&](std::size_t k) { drawn[k] = draw_candidate(cfg, next_index + k); });
        for (std::size_t k = 0; k < batch && out.size() < count; ++k) {
            if (drawn[k].rejected) {
                ++local.rejected;
                continue;
            }
            auto& rec = *drawn[k].record;
            if (!seen.insert(rec.tree.key()).second) {
                ++local.duplicates;
                continue;
            }
            rec.id = fmt::format("expr-{:07d}", out.size());
            out.push_back(std::move(rec));
        }
        next_index += batch;
    }
    local.emitted = out.size();
    if (stats) *stats = local;
    if (out.size() < count)
        throw BudgetExhausted(fmt::format("only {} distinct expressions after {} draws", out.size(), next_index));
    return out;
}

nlohmann::ordered_json to_json(const CorpusRecord& rec)
{
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    auto pre = nlohmann::ordered_json::array();
    for (const auto& t : rec.tree.preorder()) pre.push_back(t.name());
    j["preorder"] = pre;
    j["constants"] = rec.constants;
    j["spec"] = to_json(rec.spec);
    j["noise_sigma"] = rec.noise_sigma;
    j["data_seed"] = rec.data_seed;
    j["d"] = rec.dims;
    return j;
}

CorpusRecord corpus_record_from_json(const nlohmann::json& j)
{
    CorpusRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.tree = parse_token_names(j.at("preorder").get<std::vector<std::string>>());
    rec.constants = j.at("constants").get<std::vector<double>>();
    if (rec.constants.size() != rec.tree.constant_count())
        throw ConstantCountMismatch(fmt::format("record {} lists {} constants for {} placeholders", rec.id,
                                                rec.constants.size(), rec.tree.constant_count()));
    rec.spec = sampling_spec_from_json(j.at("spec"));
    rec.noise_sigma = j.value("noise_sigma", 0.0);
    rec.data_seed = j.value("data_seed", std::uint64_t{0});
    rec.dims = std::max(j.value("d", std::size_t{1}), rec.tree.variable_span());
    return rec;
}

void write_corpus(const std::vector<CorpusRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure(fmt::format("cannot open {} for writing", path.string()));
    for (const auto& rec : records) out << to_json(rec).dump() << '\n';
    if (!out) throw IoFailure(fmt::format("write to {} failed", path.string()));
}

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(fmt::format("cannot open corpus {}", path.string()));
    std::vector<CorpusRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(corpus_record_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

} // namespace srforge
