// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/chain.hpp"
#include "srforge/corpus.hpp"
#include "srforge/property.hpp"
#include "srforge/rng.hpp"
#include "srforge/search.hpp"

namespace srforge {

inline constexpr std::string_view kDataSentinel = "<Data>";

enum class TemplateKind { PlainFit, Property, MustContain, LengthBound, RestrictedVocab, NoisyRobust, MultiTurn };

std::string to_string(TemplateKind k);
TemplateKind template_kind_from_string(std::string_view s);
// The six single-turn families, in a fixed order.
const std::vector<TemplateKind>& single_turn_kinds();

struct TemplateParams {
    TemplateKind kind = TemplateKind::PlainFit;
    std::size_t k = 0;          // must-contain: 0 draws k from [1, |S| - 1]
    std::size_t max_length = 0; // length-bound: 0 draws |S| + U{0..20}
    PropertyLabel label;        // property
    double noise_sigma = 0.0;   // noisy-robust
};

// A prompt constraint in checkable form.
struct Constraint {
    TemplateKind kind = TemplateKind::PlainFit;
    std::vector<std::string> symbols; // must-contain, restricted-vocab
    std::size_t max_length = 0;       // length-bound
    std::optional<PropertyLabel> label;
    double noise_sigma = 0.0;
};

enum class Role { Human, Assistant };

struct Turn {
    Role role = Role::Human;
    std::string text;
};

struct TurnMeta {
    std::optional<Constraint> constraint;
    std::vector<double> constants;
    std::optional<double> reward;
};

struct DialogueRecord {
    std::string id;
    std::string data_ref;               // corpus id when the data is not inline
    std::optional<Dataset> inline_data; // noisy-robust records carry their data
    std::vector<Turn> turns;
    std::vector<std::string> kinds;
    std::size_t T = 1;
    double noise_sigma = 0.0;
    SamplingSpec spec;
    std::size_t dims = 1;
    std::vector<TurnMeta> turn_meta; // one per human/assistant pair
};

// Throws InconsistentParams when the parameters do not fit the target, e.g.
// a property that does not hold or k outside [1, |S| - 1].
DialogueRecord render_single_turn(const ExprTree& target, std::span<const double> constants,
                                  const TemplateParams& params, const SamplingSpec& spec, Rng& rng,
                                  std::size_t dims = 0);

// One human/assistant pair per OCOI entry. Later prompts ask for a property
// that newly holds for that entry, else for its new symbols, else for a
// refinement.
DialogueRecord render_multi_turn(const Ocoi& ocoi, const SamplingSpec& spec, Rng& rng, std::size_t dims = 0);

// Labels that hold for the expression over the domain: periodic-in per
// variable, then the global monotone, convexity and (on symmetric domains)
// symmetry labels.
std::vector<PropertyLabel> detect_properties(const ExprTree& tree, std::span<const double> constants,
                                             const SamplingSpec& spec, std::size_t dims = 0);

nlohmann::ordered_json to_json(const DialogueRecord& r);
DialogueRecord dialogue_from_json(const nlohmann::json& j);

struct ValidationResult {
    std::vector<std::string> problems;
    bool ok() const noexcept { return problems.empty(); }
};

// Schema, sentinel, role alternation, parseable answers, every stated
// constraint against its answer, and nondecreasing rewards.
ValidationResult validate_record(const DialogueRecord& r);

struct EmitStats {
    std::size_t records = 0;
    std::map<std::string, std::size_t> per_kind;
};

// Throws IoFailure. Records are written in the order given.
EmitStats emit_corpus(const std::vector<DialogueRecord>& records, const std::filesystem::path& path);
std::vector<DialogueRecord> read_dialogues(const std::filesystem::path& path);

struct DialogueConfig {
    std::vector<TemplateKind> kinds; // empty means all six plus multi-turn
    std::size_t per_expression = 1;
    std::size_t T = 3;
    std::vector<std::size_t> T_jitter{2, 3, 4};
    std::vector<double> noise_levels{0.01, 0.05, 0.1};
    std::uint64_t seed = 42;
    std::size_t workers = 1;
    SearchConfig chain_search = default_chain_search(); // small budget, one run per multi-turn record

    static SearchConfig default_chain_search();
};

struct DialogueStats {
    std::size_t emitted = 0;
    std::size_t skipped = 0; // no requested kind applied to the expression
    std::map<std::string, std::size_t> per_kind;
};

// Record j of expression i uses the stream derive_seed(seed, i * per + j), so
// the output does not depend on the worker count.
std::vector<DialogueRecord> build_dialogues(const std::vector<CorpusRecord>& corpus, const DialogueConfig& cfg,
                                            DialogueStats* stats = nullptr);

} // namespace srforge
