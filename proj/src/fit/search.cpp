// SPDX-License-Identifier: Apache-2.0
#include "srforge/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "srforge/constraints.hpp"
#include "srforge/error.hpp"
#include "srforge/generator.hpp"
#include "srforge/rng.hpp"

namespace srforge {

std::string SearchFilter::to_string() const
{
    if (kind == Kind::Property) return label.to_string();
    std::string out = "must-contain{";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) out += ", ";
        out += symbols[i].name();
    }
    return out + "}";
}

std::vector<SearchFilter> parse_filters(const nlohmann::json& j, const OperatorRegistry& registry)
{
    if (j.is_null()) return {};
    if (!j.is_array()) throw ConfigError("filters must be a JSON list");
    std::vector<SearchFilter> out;
    for (const auto& item : j) {
        SearchFilter f;
        if (item.is_string()) {
            f.label = PropertyLabel::parse(item.get<std::string>());
        } else if (item.is_object() && item.contains("property")) {
            f.label = PropertyLabel::parse(item.at("property").get<std::string>());
        } else if (item.is_object() && item.contains("must_contain")) {
            f.kind = SearchFilter::Kind::MustContain;
            for (const auto& name : item.at("must_contain")) {
                f.symbols.push_back(token_from_name(name.get<std::string>(), registry));
            }
            if (f.symbols.empty()) throw ConfigError("must_contain needs at least one symbol");
        } else {
            throw ConfigError(fmt::format("unrecognized filter {}", item.dump()));
        }
        out.push_back(std::move(f));
    }
    return out;
}

nlohmann::ordered_json to_json(const std::vector<SearchFilter>& filters)
{
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : filters) {
        if (f.kind == SearchFilter::Kind::Property) {
            arr.push_back({{"property", f.label.to_string()}});
        } else {
            auto names = nlohmann::ordered_json::array();
            for (const auto& t : f.symbols) names.push_back(t.name());
            arr.push_back({{"must_contain", names}});
        }
    }
    return arr;
}

bool contains_symbols(const ExprTree& tree, std::span<const Token> symbols)
{
    for (const auto& s : symbols) {
        if (std::find(tree.preorder().begin(), tree.preorder().end(), s) == tree.preorder().end()) return false;
    }
    return true;
}

bool filter_satisfied(const ExprTree& tree, std::span<const double> constants, const SearchFilter& filter,
                      const SamplingSpec& domain, std::size_t dims)
{
    if (filter.kind == SearchFilter::Kind::MustContain) return contains_symbols(tree, filter.symbols);
    try {
        return check_property(tree, constants, filter.label, domain, dims).holds();
    } catch (const UnsupportedDomain&) {
        return false;
    }
}

void SearchConfig::validate() const
{
    if (population < 2) throw ConfigError("population must be at least 2");
    if (generations == 0) throw ConfigError("generations must be positive");
    if (eval_budget == 0) throw ConfigError("evaluation budget must be positive");
    if (!(time_budget_secs > 0.0)) throw ConfigError("time budget must be positive");
    if (tournament == 0 || tournament > population) throw ConfigError("tournament size out of range");
    if (elites >= population) throw ConfigError("elites must be fewer than the population");
    for (double r : {crossover_rate, subtree_mutation_rate, point_mutation_rate}) {
        if (r < 0.0 || r > 1.0) throw ConfigError("operator rates must lie in [0, 1]");
    }
    if (crossover_rate + subtree_mutation_rate + point_mutation_rate > 1.0 + 1e-12)
        throw ConfigError("operator rates sum past 1");
    if (parsimony < 0.0) throw ConfigError("parsimony must be nonnegative");
    if (max_length < 1 || init_max_length < 1) throw ConfigError("length limits must be positive");
    if (fit_restarts < 1 || final_restarts < 1 || fit_iterations < 1) throw ConfigError("fit settings must be positive");
}

SearchConfig search_config_from_json(const nlohmann::json& j)
{
    SearchConfig c;
    c.population = j.value("population", c.population);
    c.generations = j.value("generations", c.generations);
    c.crossover_rate = j.value("crossover_rate", c.crossover_rate);
    c.subtree_mutation_rate = j.value("subtree_mutation_rate", c.subtree_mutation_rate);
    c.point_mutation_rate = j.value("point_mutation_rate", c.point_mutation_rate);
    c.tournament = j.value("tournament", c.tournament);
    c.elites = j.value("elites", c.elites);
    c.stagnation_generations = j.value("stagnation_generations", c.stagnation_generations);
    c.parsimony = j.value("parsimony", c.parsimony);
    c.beam_width = j.value("beam_width", c.beam_width);
    c.max_length = j.value("max_length", c.max_length);
    c.init_max_length = j.value("init_max_length", c.init_max_length);
    c.max_constants = j.value("max_constants", c.max_constants);
    c.fit_restarts = j.value("fit_restarts", c.fit_restarts);
    c.fit_iterations = j.value("fit_iterations", c.fit_iterations);
    c.final_restarts = j.value("final_restarts", c.final_restarts);
    c.eval_budget = j.value("eval_budget", c.eval_budget);
    c.time_budget_secs = j.value("time_budget_secs", c.time_budget_secs);
    c.target_r2 = j.value("target_r2", c.target_r2);
    c.seed = j.value("seed", c.seed);
    if (j.contains("operators"))
        c.registry = OperatorRegistry::from_names(j.at("operators").get<std::vector<std::string>>());
    if (j.contains("filters")) c.filters = parse_filters(j.at("filters"), OperatorRegistry::extended());
    if (j.contains("property_domain")) c.property_domain = sampling_spec_from_json(j.at("property_domain"));
    c.validate();
    return c;
}

nlohmann::ordered_json to_json(const SearchConfig& c)
{
    nlohmann::ordered_json j;
    j["population"] = c.population;
    j["generations"] = c.generations;
    j["crossover_rate"] = c.crossover_rate;
    j["subtree_mutation_rate"] = c.subtree_mutation_rate;
    j["point_mutation_rate"] = c.point_mutation_rate;
    j["tournament"] = c.tournament;
    j["elites"] = c.elites;
    j["stagnation_generations"] = c.stagnation_generations;
    j["parsimony"] = c.parsimony;
    j["beam_width"] = c.beam_width;
    j["max_length"] = c.max_length;
    j["init_max_length"] = c.init_max_length;
    j["max_constants"] = c.max_constants;
    j["fit_restarts"] = c.fit_restarts;
    j["fit_iterations"] = c.fit_iterations;
    j["final_restarts"] = c.final_restarts;
    j["eval_budget"] = c.eval_budget;
    j["time_budget_secs"] = c.time_budget_secs;
    j["target_r2"] = c.target_r2;
    j["seed"] = c.seed;
    j["operators"] = c.registry.names();
    j["filters"] = to_json(c.filters);
    if (c.property_domain) j["property_domain"] = to_json(*c.property_domain);
    return j;
}

FitOptions search_fit_options(const SearchConfig& cfg, const ExprTree& tree)
{
    FitOptions o;
    o.restarts = cfg.fit_restarts;
    o.max_iterations = cfg.fit_iterations;
    o.screen = 1;
    o.seed = derive_seed(cfg.seed, hash_string(tree.key()));
    return o;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Individual {
    ExprTree tree;
    std::vector<double> constants;
    double reward = 0.0;
    double r2 = 0.0;
};

// Higher reward first, then shorter.
bool better(const Individual& a, const Individual& b)
{
    if (a.reward != b.reward) return a.reward > b.reward;
    return a.tree.size() < b.tree.size();
}

class Engine {
public:
    Engine(const Dataset& ds, const SearchConfig& cfg)
        : ds_(ds), cfg_(cfg), dims_(std::max<std::size_t>(1, ds.dims())), rng_(derive_seed(cfg.seed, 0x5ea7c4)),
          signs_(SignContext::from_spec(ds.spec, dims_)), domain_(cfg.property_domain.value_or(ds.spec)),
          start_(Clock::now())
    {
        gen_ = GenConfig::defaults(cfg.registry, dims_);
        gen_.spec = ds.spec;
        gen_.max_constants = cfg.max_constants;
        gen_.max_length = cfg.init_max_length;
        for (const auto& w : gen_.weights) {
            const auto& t = w.token;
            if (t.kind == TokenKind::BinaryOp) binary_.push_back(t);
            else if (t.kind == TokenKind::UnaryOp) unary_.push_back(t);
            else terminals_.push_back(t);
        }
    }

    SearchResult run()
    {
        SearchResult result;
        std::vector<Individual> pop = initial_population();
        if (pop.empty()) throw BudgetExhausted("no admissible initial candidate within budget");

        Individual best = *std::min_element(pop.begin(), pop.end(), better);
        std::size_t last_gain = 0;
        for (std::size_t gen = 0; gen < cfg_.generations; ++gen) {
            if (gen > 0) {
                if (cfg_.stagnation_generations && gen - last_gain >= cfg_.stagnation_generations) {
                    pop = restart(pop);
                    last_gain = gen;
                } else {
                    pop = next_generation(pop);
                }
            }
            const auto& round_best = *std::min_element(pop.begin(), pop.end(), better);
            result.chain.entries.push_back({gen, round_best.tree, round_best.constants, round_best.reward});
            if (better(round_best, best)) {
                if (round_best.reward > best.reward) last_gain = gen;
                best = round_best;
            }
            result.generations = gen + 1;
            if (best.r2 >= cfg_.target_r2) break;
            if (out_of_budget()) {
                result.budget_exhausted = true;
                break;
            }
        }

        best = refine(pop, best);
        result.best = best.tree;
        result.constants = best.constants;
        result.reward = best.reward;
        result.r2 = best.r2;
        result.evaluations = evaluations_;
        return result;
    }

private:
    bool out_of_budget()
    {
        if (evaluations_ >= cfg_.eval_budget) return true;
        return std::chrono::duration<double>(Clock::now() - start_).count() >= cfg_.time_budget_secs;
    }

    bool admissible(const ExprTree& t) const
    {
        if (t.size() > cfg_.max_length || t.constant_count() > cfg_.max_constants) return false;
        if (t.variable_span() > dims_) return false;
        for (const auto& tok : t.preorder()) {
            if (tok.kind == TokenKind::Literal) return false;
            if ((tok.kind == TokenKind::BinaryOp || tok.kind == TokenKind::UnaryOp) && !cfg_.registry.contains(tok.op))
                return false;
        }
        if (!check_constraints(t, signs_).valid()) return false;
        for (const auto& f : cfg_.filters) {
            if (f.kind == SearchFilter::Kind::MustContain && !contains_symbols(t, f.symbols)) return false;
        }
        return true;
    }

    // Fits and scores a structure; nullopt when it faults everywhere, fails
    // a property filter, or the budget is spent.
    std::optional<Individual> score(const ExprTree& t)
    {
        auto key = t.key();
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        if (evaluations_ >= cfg_.eval_budget) return std::nullopt;
        ++evaluations_;
        std::optional<Individual> out;
        try {
            auto fit = fit_constants(t, ds_, search_fit_options(cfg_, t));
            Individual ind{t, fit.constants, reward(t, fit.constants, ds_), fit.r2};
            if (passes_properties(ind)) out = std::move(ind);
        } catch (const AllRestartsFaulted&) {
        }
        cache_.emplace(std::move(key), out);
        return out;
    }

    bool passes_properties(const Individual& ind) const
    {
        for (const auto& f : cfg_.filters) {
            if (f.kind == SearchFilter::Kind::Property && !filter_satisfied(ind.tree, ind.constants, f, domain_, dims_))
                return false;
        }
        return true;
    }

    std::vector<Individual> initial_population(std::vector<Individual> pop = {})
    {
        std::unordered_set<std::string> seen;
        for (const auto& ind : pop) seen.insert(ind.tree.key());
        const std::size_t attempts = cfg_.population * 50;
        for (std::size_t a = 0; a < attempts && pop.size() < cfg_.population && !out_of_budget(); ++a) {
            ExprTree t;
            try {
                t = generate_expression(gen_, rng_);
            } catch (const BudgetExhausted&) {
                continue;
            }
            if (!admissible(t) || !seen.insert(t.key()).second) continue;
            if (auto ind = score(t)) pop.push_back(std::move(*ind));
        }
        return pop;
    }

    // Keeps the elites and redraws everything else.
    std::vector<Individual> restart(const std::vector<Individual>& pop)
    {
        std::vector<Individual> sorted = pop;
        std::stable_sort(sorted.begin(), sorted.end(), better);
        sorted.resize(std::min(cfg_.elites, sorted.size()));
        auto next = initial_population(std::move(sorted));
        while (next.size() < cfg_.population) next.push_back(pop[next.size() % pop.size()]);
        return next;
    }

    double fitness(const Individual& ind) const
    {
        return ind.reward - cfg_.parsimony * static_cast<double>(ind.tree.size());
    }

    const Individual& select(const std::vector<Individual>& pop)
    {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        const Individual* winner = &pop[pick(rng_)];
        for (std::size_t k = 1; k < cfg_.tournament; ++k) {
            const Individual* c = &pop[pick(rng_)];
            if (fitness(*c) > fitness(*winner)) winner = c;
        }
        return *winner;
    }

    std::size_t random_node(const ExprTree& t)
    {
        return std::uniform_int_distribution<std::size_t>(0, t.size() - 1)(rng_);
    }

    ExprTree random_subtree(std::size_t max_len)
    {
        GenConfig g = gen_;
        g.max_length = std::max<std::size_t>(1, max_len);
        try {
            return generate_expression(g, rng_);
        } catch (const BudgetExhausted&) {
            return ExprTree::leaf(terminals_.front());
        }
    }

    Token resample_token(const Token& t)
    {
        const std::vector<Token>& pool =
            t.kind == TokenKind::BinaryOp ? binary_ : t.kind == TokenKind::UnaryOp ? unary_ : terminals_;
        if (pool.size() < 2) return t;
        for (int tries = 0; tries < 8; ++tries) {
            const Token& c = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng_)];
            if (!(c == t)) return c;
        }
        return t;
    }

    ExprTree vary(const std::vector<Individual>& pop)
    {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        const ExprTree& p1 = select(pop).tree;
        if (u < cfg_.crossover_rate) {
            const ExprTree& p2 = select(pop).tree;
            return p1.with_subtree(random_node(p1), p2.subtree(random_node(p2)));
        }
        if (u < cfg_.crossover_rate + cfg_.subtree_mutation_rate) {
            const std::size_t i = random_node(p1);
            const std::size_t room = cfg_.max_length - (p1.size() - p1.subtree_size(i));
            return p1.with_subtree(i, random_subtree(std::min<std::size_t>(room, 10)));
        }
        if (u < cfg_.crossover_rate + cfg_.subtree_mutation_rate + cfg_.point_mutation_rate) {
            const std::size_t i = random_node(p1);
            return p1.with_token(i, resample_token(p1[i]));
        }
        return p1;
    }

    std::vector<Individual> next_generation(const std::vector<Individual>& pop)
    {
        std::vector<Individual> sorted = pop;
        std::stable_sort(sorted.begin(), sorted.end(), better);
        std::vector<Individual> next(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(std::min(cfg_.elites, sorted.size())));
        while (next.size() < cfg_.population) {
            std::optional<Individual> child;
            for (int tries = 0; tries < 10 && !child; ++tries) {
                ExprTree t = vary(pop);
                if (admissible(t)) child = score(t);
            }
            next.push_back(child ? std::move(*child) : select(pop));
        }
        return next;
    }

    // Refits the best few distinct structures with more restarts.
    Individual refine(const std::vector<Individual>& pop, Individual best)
    {
        std::vector<Individual> pool = pop;
        pool.push_back(best);
        std::stable_sort(pool.begin(), pool.end(), better);
        std::unordered_set<std::string> seen;
        std::size_t taken = 0;
        for (const auto& cand : pool) {
            if (taken >= cfg_.beam_width) break;
            if (!seen.insert(cand.tree.key()).second) continue;
            ++taken;
            if (cand.tree.constant_count() == 0) continue;
            FitOptions o = search_fit_options(cfg_, cand.tree);
            o.restarts = cfg_.final_restarts;
            o.max_iterations = std::max(o.max_iterations, 200);
            o.initial = cand.constants;
            try {
                auto fit = fit_constants(cand.tree, ds_, o);
                Individual ind{cand.tree, fit.constants, reward(cand.tree, fit.constants, ds_), fit.r2};
                if (better(ind, best) && passes_properties(ind)) best = std::move(ind);
            } catch (const AllRestartsFaulted&) {
            }
        }
        return best;
    }

    const Dataset& ds_;
    const SearchConfig& cfg_;
    std::size_t dims_;
    Rng rng_;
    SignContext signs_;
    SamplingSpec domain_;
    Clock::time_point start_;
    GenConfig gen_;
    std::vector<Token> binary_, unary_, terminals_;
    std::unordered_map<std::string, std::optional<Individual>> cache_;
    std::size_t evaluations_ = 0;
};

} // namespace

SearchResult search(const Dataset& ds, const SearchConfig& cfg)
{
    cfg.validate();
    validate(ds);
    return Engine(ds, cfg).run();
}

} // namespace srforge
