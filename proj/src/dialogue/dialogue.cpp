// SPDX-License-Identifier: Apache-2.0
#include "srforge/dialogue.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/fit.hpp"
#include "srforge/generator.hpp"
#include "srforge/parallel.hpp"
#include "srforge/parse.hpp"
#include "templates.hpp"

namespace srforge {

namespace {

struct KindName {
    TemplateKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {TemplateKind::PlainFit, "plain-fit"},
    {TemplateKind::Property, "property"},
    {TemplateKind::MustContain, "must-contain"},
    {TemplateKind::LengthBound, "length-bound"},
    {TemplateKind::RestrictedVocab, "restricted-vocab"},
    {TemplateKind::NoisyRobust, "noisy-robust"},
    {TemplateKind::MultiTurn, "multi-turn"},
};

std::vector<std::string> token_names(const ExprTree& t)
{
    std::vector<std::string> out;
    for (const auto& tok : t.preorder()) out.push_back(tok.name());
    return out;
}

std::vector<std::string> dedupe(const std::vector<std::string>& names)
{
    std::vector<std::string> out;
    for (const auto& n : names) {
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    }
    return out;
}

std::string symbol_list(const std::vector<std::string>& symbols)
{
    return fmt::format("{{{}}}", fmt::join(symbols, ", "));
}

std::string sigma_text(double sigma) { return fmt::format("{}", sigma); }

std::string fill(std::string_view pattern, const Constraint& c)
{
    const std::string phrase = c.label ? templates::property_phrase(*c.label) : std::string{};
    return fmt::format(fmt::runtime(pattern), fmt::arg("symbols", symbol_list(c.symbols)),
                       fmt::arg("length", c.max_length), fmt::arg("property", phrase),
                       fmt::arg("sigma", sigma_text(c.noise_sigma)));
}

std::string answer(std::string_view pattern, const ExprTree& t)
{
    return fmt::format(fmt::runtime(pattern), fmt::arg("expr", t.to_string()));
}

std::size_t variant(Rng& rng) { return std::uniform_int_distribution<std::size_t>(0, templates::kVariants - 1)(rng); }

std::size_t effective_dims(const ExprTree& t, const SamplingSpec& spec, std::size_t dims)
{
    if (dims) return dims;
    return std::max<std::size_t>({t.variable_span(), spec.ranges.size(), 1});
}

bool symmetric_domain(const SamplingSpec& spec, std::size_t dims)
{
    for (std::size_t v = 0; v < dims; ++v) {
        auto r = spec.range(v);
        if (std::fabs(r.low + r.high) > 1e-12 * std::max(1.0, std::fabs(r.high))) return false;
    }
    return true;
}

bool holds(const ExprTree& t, std::span<const double> constants, const PropertyLabel& label, const SamplingSpec& spec,
           std::size_t dims)
{
    try {
        return check_property(t, constants, label, spec, dims).holds();
    } catch (const Error&) {
        return false;
    }
}

nlohmann::ordered_json to_json(const Constraint& c)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(c.kind);
    switch (c.kind) {
    case TemplateKind::MustContain:
    case TemplateKind::RestrictedVocab: j["symbols"] = c.symbols; break;
    case TemplateKind::LengthBound: j["max_length"] = c.max_length; break;
    case TemplateKind::Property: j["property"] = c.label->to_string(); break;
    case TemplateKind::NoisyRobust: j["noise_sigma"] = c.noise_sigma; break;
    default: break;
    }
    return j;
}

Constraint constraint_from_json(const nlohmann::json& j)
{
    Constraint c;
    c.kind = template_kind_from_string(j.at("kind").get<std::string>());
    c.symbols = j.value("symbols", std::vector<std::string>{});
    c.max_length = j.value("max_length", std::size_t{0});
    if (j.contains("property")) c.label = PropertyLabel::parse(j.at("property").get<std::string>());
    c.noise_sigma = j.value("noise_sigma", 0.0);
    return c;
}

// Checks one stated constraint against the answer; appends problems.
void check_constraint(const Constraint& c, const std::string& prompt, const ExprTree& ans,
                      std::span<const double> constants, const DialogueRecord& r, std::size_t pair,
                      std::vector<std::string>& problems)
{
    auto problem = [&](std::string what) { problems.push_back(fmt::format("turn pair {}: {}", pair + 1, what)); };
    const auto names = token_names(ans);
    switch (c.kind) {
    case TemplateKind::PlainFit:
    case TemplateKind::MultiTurn: break;
    case TemplateKind::MustContain:
        if (c.symbols.empty()) problem("must-contain without symbols");
        for (const auto& s : c.symbols) {
            if (std::find(names.begin(), names.end(), s) == names.end()) problem(fmt::format("answer lacks '{}'", s));
        }
        if (prompt.find(symbol_list(c.symbols)) == std::string::npos) problem("prompt does not state the symbols");
        break;
    case TemplateKind::LengthBound:
        if (ans.size() > c.max_length) problem(fmt::format("answer has {} symbols, bound {}", ans.size(), c.max_length));
        if (prompt.find(std::to_string(c.max_length)) == std::string::npos) problem("prompt does not state the bound");
        break;
    case TemplateKind::RestrictedVocab:
        for (const auto& n : names) {
            if (std::find(c.symbols.begin(), c.symbols.end(), n) == c.symbols.end())
                problem(fmt::format("'{}' is outside the allowed vocabulary", n));
        }
        if (prompt.find(symbol_list(c.symbols)) == std::string::npos) problem("prompt does not state the vocabulary");
        break;
    case TemplateKind::Property:
        if (!c.label) {
            problem("property constraint without a label");
            break;
        }
        if (!holds(ans, constants, *c.label, r.spec, r.dims))
            problem(fmt::format("answer is not {}", c.label->to_string()));
        if (prompt.find(templates::property_phrase(*c.label)) == std::string::npos) problem("prompt does not state the property");
        break;
    case TemplateKind::NoisyRobust:
        if (!(c.noise_sigma > 0.0)) problem("noisy-robust with zero noise");
        if (!r.inline_data) problem("noisy-robust record without inline data");
        if (r.noise_sigma != c.noise_sigma) problem("noise level differs from the record's");
        if (prompt.find(sigma_text(c.noise_sigma)) == std::string::npos) problem("prompt does not state the noise level");
        break;
    }
}

} // namespace

std::string to_string(TemplateKind k)
{
    for (const auto& kn : kKindNames) {
        if (kn.kind == k) return std::string(kn.name);
    }
    return "?";
}

TemplateKind template_kind_from_string(std::string_view s)
{
    for (const auto& kn : kKindNames) {
        if (kn.name == s) return kn.kind;
    }
    throw ConfigError(fmt::format("unknown template kind '{}'", s));
}

const std::vector<TemplateKind>& single_turn_kinds()
{
    static const std::vector<TemplateKind> kinds = {
        TemplateKind::PlainFit,    TemplateKind::Property,        TemplateKind::MustContain,
        TemplateKind::LengthBound, TemplateKind::RestrictedVocab, TemplateKind::NoisyRobust,
    };
    return kinds;
}

std::vector<PropertyLabel> detect_properties(const ExprTree& tree, std::span<const double> constants,
                                             const SamplingSpec& spec, std::size_t dims)
{
    dims = effective_dims(tree, spec, dims);
    std::vector<PropertyLabel> out;
    if (!tree.has_variables(0)) return out;
    for (std::size_t v = 0; v < dims; ++v) {
        PropertyLabel l{PropertyKind::PeriodicIn, static_cast<std::uint16_t>(v)};
        if (holds(tree, constants, l, spec, dims)) out.push_back(l);
    }
    std::vector<PropertyKind> kinds = {PropertyKind::MonotoneIncreasing, PropertyKind::MonotoneDecreasing,
                                       PropertyKind::Convex, PropertyKind::Concave};
    if (symmetric_domain(spec, dims)) {
        kinds.push_back(PropertyKind::SymmetricEven);
        kinds.push_back(PropertyKind::SymmetricOddOrigin);
    }
    for (auto k : kinds) {
        PropertyLabel l{k, std::nullopt};
        if (holds(tree, constants, l, spec, dims)) out.push_back(l);
    }
    return out;
}

DialogueRecord render_single_turn(const ExprTree& target, std::span<const double> constants,
                                  const TemplateParams& params, const SamplingSpec& spec, Rng& rng, std::size_t dims)
{
    if (params.kind == TemplateKind::MultiTurn) throw InconsistentParams("multi-turn records come from an OCOI");
    if (target.empty()) throw InconsistentParams("empty target");
    dims = effective_dims(target, spec, dims);
    const auto names = token_names(target);
    const std::size_t n = names.size();

    Constraint c;
    c.kind = params.kind;
    switch (params.kind) {
    case TemplateKind::PlainFit: break;
    case TemplateKind::Property:
        if (!holds(target, constants, params.label, spec, dims))
            throw InconsistentParams(fmt::format("{} does not hold for {}", params.label.to_string(), target.to_string()));
        c.label = params.label;
        break;
    case TemplateKind::MustContain: {
        if (n < 2) throw InconsistentParams("must-contain needs a target with at least two symbols");
        std::size_t k = params.k ? params.k : std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
        if (k < 1 || k > n - 1) throw InconsistentParams(fmt::format("k = {} outside [1, {}]", k, n - 1));
        std::vector<std::size_t> pos(n);
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        std::shuffle(pos.begin(), pos.end(), rng);
        pos.resize(k);
        std::sort(pos.begin(), pos.end());
        std::vector<std::string> picked;
        for (auto p : pos) picked.push_back(names[p]);
        c.symbols = dedupe(picked);
        break;
    }
    case TemplateKind::LengthBound: {
        std::size_t m = params.max_length ? params.max_length : n + std::uniform_int_distribution<std::size_t>(0, 20)(rng);
        if (m < n || m > n + 20) throw InconsistentParams(fmt::format("bound {} outside [{}, {}]", m, n, n + 20));
        c.max_length = m;
        break;
    }
    case TemplateKind::RestrictedVocab: c.symbols = dedupe(names); break;
    case TemplateKind::NoisyRobust:
        if (!(params.noise_sigma > 0.0)) throw InconsistentParams("noisy-robust needs a positive noise level");
        c.noise_sigma = params.noise_sigma;
        break;
    case TemplateKind::MultiTurn: break;
    }

    DialogueRecord r;
    r.turns.push_back({Role::Human, fmt::format("{} {}", kDataSentinel, fill(templates::human(c.kind, variant(rng)), c))});
    r.turns.push_back({Role::Assistant, answer(templates::assistant(variant(rng)), target)});
    r.kinds = {to_string(params.kind)};
    r.T = 1;
    r.noise_sigma = c.noise_sigma;
    r.spec = spec;
    r.dims = dims;
    r.turn_meta.push_back({c, std::vector<double>(constants.begin(), constants.end()), std::nullopt});
    return r;
}

DialogueRecord render_multi_turn(const Ocoi& ocoi, const SamplingSpec& spec, Rng& rng, std::size_t dims)
{
    if (ocoi.entries.empty()) throw InconsistentParams("empty OCOI");
    if (!dims) {
        for (const auto& e : ocoi.entries) dims = std::max(dims, effective_dims(e.tree, spec, 0));
    }
    DialogueRecord r;
    r.kinds = {to_string(ocoi.entries.size() == 1 ? TemplateKind::PlainFit : TemplateKind::MultiTurn)};
    r.T = ocoi.T;
    r.spec = spec;
    r.dims = dims;
    for (std::size_t i = 0; i < ocoi.entries.size(); ++i) {
        const auto& e = ocoi.entries[i];
        Constraint c;
        std::string prompt;
        if (i == 0) {
            prompt = fmt::format("{} {}", kDataSentinel, templates::human(TemplateKind::PlainFit, variant(rng)));
        } else {
            const auto& prev = ocoi.entries[i - 1];
            auto before = detect_properties(prev.tree, prev.constants, spec, dims);
            std::vector<PropertyLabel> fresh;
            for (const auto& l : detect_properties(e.tree, e.constants, spec, dims)) {
                if (std::find(before.begin(), before.end(), l) == before.end()) fresh.push_back(l);
            }
            const auto prev_names = token_names(prev.tree);
            std::vector<std::string> new_symbols;
            for (const auto& s : dedupe(token_names(e.tree))) {
                if (std::find(prev_names.begin(), prev_names.end(), s) == prev_names.end()) new_symbols.push_back(s);
            }
            if (!fresh.empty()) {
                c.kind = TemplateKind::Property;
                c.label = fresh[std::uniform_int_distribution<std::size_t>(0, fresh.size() - 1)(rng)];
                prompt = fill(templates::followup_property(variant(rng)), c);
            } else if (!new_symbols.empty()) {
                c.kind = TemplateKind::MustContain;
                c.symbols = new_symbols;
                prompt = fill(templates::followup_symbols(variant(rng)), c);
            } else {
                prompt = std::string(templates::followup_refine(variant(rng)));
            }
        }
        r.turns.push_back({Role::Human, std::move(prompt)});
        r.turns.push_back(
            {Role::Assistant, answer(i == 0 ? templates::assistant(variant(rng)) : templates::followup_answer(variant(rng)), e.tree)});
        r.turn_meta.push_back({c, e.constants, e.reward});
    }
    return r;
}

nlohmann::ordered_json to_json(const DialogueRecord& r)
{
    nlohmann::ordered_json j;
    j["id"] = r.id;
    nlohmann::ordered_json data;
    if (r.inline_data) {
        auto X = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < r.inline_data->X.rows(); ++i) X.push_back(r.inline_data->X.row(i));
        data["inline"] = {{"X", std::move(X)}, {"y", r.inline_data->y}};
    } else {
        data["ref"] = r.data_ref;
    }
    j["data"] = std::move(data);
    auto turns = nlohmann::ordered_json::array();
    for (const auto& t : r.turns) turns.push_back({{"role", t.role == Role::Human ? "human" : "assistant"}, {"text", t.text}});
    j["turns"] = std::move(turns);
    nlohmann::ordered_json meta;
    meta["kinds"] = r.kinds;
    meta["T"] = r.T;
    meta["noise_sigma"] = r.noise_sigma;
    meta["spec"] = to_json(r.spec);
    meta["d"] = r.dims;
    auto tm = nlohmann::ordered_json::array();
    for (const auto& m : r.turn_meta) {
        nlohmann::ordered_json mj;
        mj["constraint"] = m.constraint ? to_json(*m.constraint) : nlohmann::ordered_json();
        mj["constants"] = m.constants;
        mj["reward"] = m.reward ? nlohmann::ordered_json(*m.reward) : nlohmann::ordered_json();
        tm.push_back(std::move(mj));
    }
    meta["turns"] = std::move(tm);
    j["meta"] = std::move(meta);
    return j;
}

DialogueRecord dialogue_from_json(const nlohmann::json& j)
{
    DialogueRecord r;
    r.id = j.at("id").get<std::string>();
    const auto& data = j.at("data");
    if (data.contains("inline")) {
        const auto& in = data.at("inline");
        Dataset ds;
        ds.X = Matrix::from_rows(in.at("X").get<std::vector<std::vector<double>>>());
        ds.y = in.at("y").get<std::vector<double>>();
        r.inline_data = std::move(ds);
    } else {
        r.data_ref = data.at("ref").get<std::string>();
    }
    for (const auto& t : j.at("turns")) {
        const auto role = t.at("role").get<std::string>();
        if (role != "human" && role != "assistant") throw ConfigError(fmt::format("unknown role '{}'", role));
        r.turns.push_back({role == "human" ? Role::Human : Role::Assistant, t.at("text").get<std::string>()});
    }
    const auto& meta = j.at("meta");
    r.kinds = meta.at("kinds").get<std::vector<std::string>>();
    r.T = meta.at("T").get<std::size_t>();
    r.noise_sigma = meta.at("noise_sigma").get<double>();
    r.spec = sampling_spec_from_json(meta.at("spec"));
    r.dims = meta.value("d", std::size_t{1});
    for (const auto& m : meta.value("turns", nlohmann::json::array())) {
        TurnMeta tm;
        if (!m.at("constraint").is_null()) tm.constraint = constraint_from_json(m.at("constraint"));
        tm.constants = m.value("constants", std::vector<double>{});
        if (m.contains("reward") && !m.at("reward").is_null()) tm.reward = m.at("reward").get<double>();
        r.turn_meta.push_back(std::move(tm));
    }
    if (r.inline_data) {
        r.inline_data->spec = r.spec;
        r.inline_data->noise_sigma = r.noise_sigma;
    }
    return r;
}

ValidationResult validate_record(const DialogueRecord& r)
{
    ValidationResult v;
    auto& p = v.problems;
    if (r.id.empty()) p.push_back("missing id");
    if (r.kinds.empty()) p.push_back("no template kind");
    if (r.turns.empty() || r.turns.size() % 2 != 0) p.push_back(fmt::format("{} turns; expected human/assistant pairs", r.turns.size()));
    for (std::size_t i = 0; i < r.turns.size(); ++i) {
        const Role want = i % 2 == 0 ? Role::Human : Role::Assistant;
        if (r.turns[i].role != want) p.push_back(fmt::format("turn {} has the wrong role", i + 1));
    }
    std::size_t sentinels = 0;
    for (const auto& t : r.turns) {
        for (auto pos = t.text.find(kDataSentinel); pos != std::string::npos; pos = t.text.find(kDataSentinel, pos + 1))
            ++sentinels;
    }
    if (sentinels != 1) p.push_back(fmt::format("{} data sentinels", sentinels));
    if (!r.turns.empty() && r.turns[0].text.rfind(kDataSentinel, 0) != 0) p.push_back("first turn does not open with the sentinel");

    if (r.inline_data) {
        const auto& ds = *r.inline_data;
        if (ds.X.rows() != ds.y.size()) p.push_back("inline X and y differ in length");
        for (double y : ds.y) {
            if (!std::isfinite(y)) {
                p.push_back("non-finite inline target");
                break;
            }
        }
    } else if (r.data_ref.empty()) {
        p.push_back("neither inline data nor a reference");
    }

    const std::size_t pairs = r.turns.size() / 2;
    if (r.turn_meta.size() != pairs) p.push_back(fmt::format("{} meta entries for {} turn pairs", r.turn_meta.size(), pairs));
    std::optional<double> last_reward;
    for (std::size_t k = 0; k < std::min(pairs, r.turn_meta.size()); ++k) {
        const auto& m = r.turn_meta[k];
        const auto& prompt = r.turns[2 * k].text;
        auto found = find_bracketed(r.turns[2 * k + 1].text);
        if (found.empty()) {
            p.push_back(fmt::format("turn pair {}: no parseable preorder in the answer", k + 1));
            continue;
        }
        const ExprTree& ans = found.back();
        if (m.constants.size() != ans.constant_count()) {
            p.push_back(fmt::format("turn pair {}: {} constants for {} placeholders", k + 1, m.constants.size(),
                                    ans.constant_count()));
            continue;
        }
        if (m.constraint) check_constraint(*m.constraint, prompt, ans, m.constants, r, k, p);
        if (m.reward) {
            if (*m.reward < 0.0 || *m.reward > 1.0) p.push_back(fmt::format("turn pair {}: reward outside [0, 1]", k + 1));
            if (last_reward && *m.reward < *last_reward) p.push_back(fmt::format("turn pair {}: reward decreased", k + 1));
            last_reward = m.reward;
        }
    }
    return v;
}

EmitStats emit_corpus(const std::vector<DialogueRecord>& records, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure(fmt::format("cannot open {} for writing", path.string()));
    EmitStats st;
    for (const auto& r : records) {
        out << to_json(r).dump() << '\n';
        ++st.records;
        ++st.per_kind[r.kinds.empty() ? "?" : r.kinds.front()];
    }
    if (!out) throw IoFailure(fmt::format("write to {} failed", path.string()));
    return st;
}

std::vector<DialogueRecord> read_dialogues(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(fmt::format("cannot open dialogues {}", path.string()));
    std::vector<DialogueRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(dialogue_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

SearchConfig DialogueConfig::default_chain_search()
{
    SearchConfig c;
    c.population = 16;
    c.generations = 6;
    c.tournament = 3;
    c.elites = 1;
    c.beam_width = 1;
    c.max_length = 20;
    c.init_max_length = 10;
    c.fit_restarts = 1;
    c.fit_iterations = 30;
    c.final_restarts = 2;
    c.eval_budget = 100;
    c.time_budget_secs = 5.0;
    return c;
}

namespace {

std::optional<DialogueRecord> render_kind(TemplateKind kind, const CorpusRecord& rec, const DialogueConfig& cfg,
                                          std::uint64_t stream, Rng& rng)
{
    const std::size_t dims = std::max(rec.dims, rec.tree.variable_span());
    TemplateParams params;
    params.kind = kind;
    switch (kind) {
    case TemplateKind::Property: {
        auto labels = detect_properties(rec.tree, rec.constants, rec.spec, dims);
        if (labels.empty()) return std::nullopt;
        params.label = labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)];
        break;
    }
    case TemplateKind::MustContain:
        if (rec.tree.size() < 2) return std::nullopt;
        break;
    case TemplateKind::NoisyRobust: {
        if (cfg.noise_levels.empty()) return std::nullopt;
        params.noise_sigma = cfg.noise_levels[std::uniform_int_distribution<std::size_t>(0, cfg.noise_levels.size() - 1)(rng)];
        if (!(params.noise_sigma > 0.0)) return std::nullopt;
        auto r = render_single_turn(rec.tree, rec.constants, params, rec.spec, rng, dims);
        r.inline_data = add_noise(rec.materialize(), params.noise_sigma, rng);
        return r;
    }
    case TemplateKind::MultiTurn: {
        Dataset ds = rec.materialize();
        SearchConfig sc = cfg.chain_search;
        sc.seed = derive_seed(cfg.seed ^ 0xc0ffee, stream);
        InferenceChain chain;
        try {
            chain = search(ds, sc).chain;
        } catch (const BudgetExhausted&) {
        }
        // one turn per distinct structure; the target closes the chain
        InferenceChain distinct;
        for (const auto& e : chain.entries) {
            auto same = [&](const ChainEntry& o) { return o.tree == e.tree; };
            if (e.tree == rec.tree || std::any_of(distinct.entries.begin(), distinct.entries.end(), same)) continue;
            distinct.entries.push_back(e);
        }
        chain = std::move(distinct);
        chain.entries.push_back({chain.entries.size(), rec.tree, rec.constants, reward(rec.tree, rec.constants, ds)});
        std::size_t T = cfg.T;
        if (!cfg.T_jitter.empty()) T = cfg.T_jitter[std::uniform_int_distribution<std::size_t>(0, cfg.T_jitter.size() - 1)(rng)];
        auto r = render_multi_turn(build_ocoi(chain, std::max<std::size_t>(1, T)), rec.spec, rng, dims);
        r.data_ref = rec.id;
        r.noise_sigma = rec.noise_sigma;
        return r;
    }
    default: break;
    }
    try {
        auto r = render_single_turn(rec.tree, rec.constants, params, rec.spec, rng, dims);
        r.data_ref = rec.id;
        if (kind != TemplateKind::NoisyRobust) r.noise_sigma = rec.noise_sigma;
        return r;
    } catch (const InconsistentParams&) {
        return std::nullopt;
    }
}

} // namespace

std::vector<DialogueRecord> build_dialogues(const std::vector<CorpusRecord>& corpus, const DialogueConfig& cfg,
                                            DialogueStats* stats)
{
    std::vector<TemplateKind> kinds = cfg.kinds;
    if (kinds.empty()) {
        kinds = single_turn_kinds();
        kinds.push_back(TemplateKind::MultiTurn);
    }
    const std::size_t per = cfg.per_expression;
    const std::size_t jobs = corpus.size() * per;
    std::vector<std::optional<DialogueRecord>> made(jobs);
    parallel_for(jobs, cfg.workers, [&](std::size_t idx) {
        const auto& rec = corpus[idx / per];
        Rng rng = make_rng(cfg.seed, idx);
        for (std::size_t t = 0; t < kinds.size() && !made[idx]; ++t) {
            made[idx] = render_kind(kinds[(idx + t) % kinds.size()], rec, cfg, idx, rng);
        }
    });

    DialogueStats st;
    std::vector<DialogueRecord> out;
    out.reserve(jobs);
    for (auto& m : made) {
        if (!m) {
            ++st.skipped;
            continue;
        }
        m->id = fmt::format("dlg-{:07d}", out.size());
        ++st.per_kind[m->kinds.front()];
        out.push_back(std::move(*m));
    }
    st.emitted = out.size();
    if (stats) *stats = st;
    return out;
}

} // namespace srforge
