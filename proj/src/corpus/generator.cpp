// SPDX-License-Identifier: Apache-2.0
#include "srforge/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/eval.hpp"

namespace srforge {

GenConfig GenConfig::defaults(const OperatorRegistry& registry, std::size_t dims)
{
    GenConfig cfg;
    cfg.dims = std::max<std::size_t>(dims, 1);
    for (Op op : registry.ops()) {
        if (op == Op::Neg || op == Op::Harmonic) continue;
        cfg.weights.push_back({Token::operation(op), op_info(op).arity == 2 ? 1.0 : 0.5});
    }
    for (std::size_t v = 0; v < cfg.dims; ++v)
        cfg.weights.push_back({Token::variable(static_cast<std::uint16_t>(v)), 4.0 / static_cast<double>(cfg.dims)});
    cfg.weights.push_back({Token::constant(), 2.0});
    return cfg;
}

void GenConfig::validate() const
{
    if (max_length < 1) throw ConfigError("max_length must be at least 1");
    if (dims < 1) throw ConfigError("dims must be at least 1");
    bool terminal = false;
    for (const auto& w : weights) {
        if (!(w.weight >= 0.0) || !std::isfinite(w.weight))
            throw ConfigError(fmt::format("weight for '{}' must be nonnegative", w.token.name()));
        if (w.token.kind == TokenKind::Literal) throw ConfigError("generated expressions use C, not literals");
        if (w.token.kind == TokenKind::Variable && w.token.var >= dims)
            throw ConfigError(fmt::format("variable {} exceeds dims = {}", w.token.name(), dims));
        if (w.token.is_terminal() && w.weight > 0.0) terminal = true;
    }
    if (!terminal) throw ConfigError("at least one terminal (variable or C) needs positive weight");
    for (double s : noise_levels) {
        if (!(s >= 0.0)) throw ConfigError("noise levels must be nonnegative");
    }
    if (!(constant_range > constant_min_magnitude && constant_min_magnitude >= 0.0))
        throw ConfigError("constant range must exceed the minimum magnitude");
}

GenConfig gen_config_from_json(const nlohmann::json& j, const OperatorRegistry& registry)
{
    std::size_t dims = j.value("dims", std::size_t{1});
    auto cfg = GenConfig::defaults(registry, dims);
    cfg.max_length = j.value("max_length", cfg.max_length);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.max_constants = j.value("max_constants", cfg.max_constants);
    cfg.resample_cap = j.value("resample_cap", cfg.resample_cap);
    cfg.constant_range = j.value("constant_range", cfg.constant_range);
    cfg.constant_min_magnitude = j.value("constant_min_magnitude", cfg.constant_min_magnitude);
    if (j.contains("spec")) cfg.spec = sampling_spec_from_json(j.at("spec"));
    if (j.contains("noise_levels")) cfg.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    if (j.contains("weights")) {
        for (const auto& [name, w] : j.at("weights").items()) {
            Token t = token_from_name(name, registry);
            auto it = std::find_if(cfg.weights.begin(), cfg.weights.end(),
                                   [&](const SymbolWeight& sw) { return sw.token == t; });
            if (it == cfg.weights.end()) cfg.weights.push_back({t, w.get<double>()});
            else it->weight = w.get<double>();
        }
    }
    cfg.validate();
    return cfg;
}

nlohmann::ordered_json to_json(const GenConfig& cfg)
{
    nlohmann::ordered_json j;
    j["max_length"] = cfg.max_length;
    j["dims"] = cfg.dims;
    j["seed"] = cfg.seed;
    j["spec"] = to_json(cfg.spec);
    j["noise_levels"] = cfg.noise_levels;
    j["max_constants"] = cfg.max_constants;
    j["resample_cap"] = cfg.resample_cap;
    j["constant_range"] = cfg.constant_range;
    j["constant_min_magnitude"] = cfg.constant_min_magnitude;
    nlohmann::ordered_json w;
    for (const auto& sw : cfg.weights) w[sw.token.name()] = sw.weight;
    j["weights"] = w;
    return j;
}

Assembly assemble_preorder(const SymbolPicker& pick, std::size_t max_length)
{
    if (max_length < 1) throw ConfigError("max_length must be at least 1");
    Assembly out;
    int count = 1;
    while (count > 0) {
        // after a symbol of arity a the shortest completion has
        // size + 1 + (count - 1 + a) tokens
        auto room = static_cast<long>(max_length) - static_cast<long>(out.preorder.size()) - count;
        int max_arity = static_cast<int>(std::clamp(room, 0L, 2L));
        Token s = pick(max_arity);
        if (s.arity() > max_arity) throw ConfigError("symbol picker exceeded the arity bound");
        count = count - 1 + s.arity();
        out.preorder.push_back(s);
        out.counts.push_back(count);
    }
    return out;
}

SymbolPicker weighted_picker(const GenConfig& cfg, Rng& rng)
{
    return [&cfg, &rng](int max_arity) {
        std::vector<double> w(cfg.weights.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = cfg.weights[i].token.arity() <= max_arity ? cfg.weights[i].weight : 0.0;
        std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
        return cfg.weights[dist(rng)].token;
    };
}

ExprTree generate_expression(const GenConfig& cfg, Rng& rng)
{
    auto picker = weighted_picker(cfg, rng);
    auto ctx = SignContext::from_spec(cfg.spec, cfg.dims);
    for (std::size_t attempt = 0; attempt < cfg.resample_cap; ++attempt) {
        auto assembly = assemble_preorder(picker, cfg.max_length);
        auto tree = ExprTree::from_preorder(assembly.preorder);
        if (tree.constant_count() > cfg.max_constants) continue;
        if (!check_constraints(tree, ctx).valid()) continue;
        return tree;
    }
    throw BudgetExhausted(fmt::format("no valid expression after {} draws", cfg.resample_cap));
}

std::vector<double> draw_constants(const GenConfig& cfg, std::size_t count, Rng& rng)
{
    std::uniform_real_distribution<double> u(-cfg.constant_range, cfg.constant_range);
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count) {
        double c = u(rng);
        if (std::fabs(c) >= cfg.constant_min_magnitude) out.push_back(c);
    }
    return out;
}

Matrix sample_inputs(const SamplingSpec& spec, std::size_t dims, Rng& rng)
{
    if (spec.dist == Distribution::Uniform) {
        Matrix X(spec.n, dims);
        for (std::size_t r = 0; r < spec.n; ++r) {
            for (std::size_t c = 0; c < dims; ++c) {
                auto range = spec.range(c);
                X(r, c) = std::uniform_real_distribution<double>(range.low, range.high)(rng);
            }
        }
        return X;
    }
    std::size_t per_axis = spec.n;
    if (dims > 1) {
        per_axis = static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(spec.n), 1.0 / static_cast<double>(dims))));
        per_axis = std::max<std::size_t>(per_axis, 2);
    }
    std::size_t rows = 1;
    for (std::size_t c = 0; c < dims; ++c) rows *= per_axis;
    Matrix X(rows, dims);
    auto grid = [&](std::size_t c, std::size_t k) {
        auto range = spec.range(c);
        if (per_axis == 1) return range.low;
        return range.low + (range.high - range.low) * static_cast<double>(k) / static_cast<double>(per_axis - 1);
    };
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t rest = r;
        for (std::size_t c = dims; c-- > 0;) {
            X(r, c) = grid(c, rest % per_axis);
            rest /= per_axis;
        }
    }
    return X;
}

Dataset sample_dataset(const ExprTree& tree, const SamplingSpec& spec, std::span<const double> constants, Rng& rng,
                       std::size_t dims, std::size_t resample_cap)
{
    if (dims == 0) dims = std::max<std::size_t>({tree.variable_span(), spec.ranges.size() > 1 ? spec.ranges.size() : 1});
    Dataset ds;
    ds.spec = spec;
    ds.X = sample_inputs(spec, dims, rng);
    auto result = evaluate(tree, ds.X, constants);
    if (spec.dist == Distribution::Uniform) {
        for (std::size_t pass = 0; !result.ok(); ++pass) {
            if (pass >= resample_cap)
                throw DomainUnsatisfiable(fmt::format("{} of {} rows still faulted after {} redraws of {}",
                                                      result.fault_count, spec.n, resample_cap, tree.to_string()));
            std::vector<std::size_t> bad;
            for (std::size_t r = 0; r < result.faulted.size(); ++r) {
                if (result.faulted[r]) bad.push_back(r);
            }
            SamplingSpec redraw = spec;
            redraw.n = bad.size();
            Matrix fresh = sample_inputs(redraw, dims, rng);
            for (std::size_t k = 0; k < bad.size(); ++k) {
                for (std::size_t c = 0; c < dims; ++c) ds.X(bad[k], c) = fresh(k, c);
            }
            auto partial = evaluate(tree, fresh, constants);
            for (std::size_t k = 0; k < bad.size(); ++k) {
                result.values[bad[k]] = partial.values[k];
                result.faulted[bad[k]] = partial.faulted[k];
            }
            result.fault_count = partial.fault_count;
        }
        ds.y = std::move(result.values);
        return ds;
    }
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < result.faulted.size(); ++r) {
        if (!result.faulted[r]) keep.push_back(r);
    }
    if (keep.empty()) throw DomainUnsatisfiable(fmt::format("every grid point faults for {}", tree.to_string()));
    if (keep.size() != ds.X.rows()) {
        ds.X = ds.X.select_rows(keep);
        std::vector<double> y;
        y.reserve(keep.size());
        for (auto r : keep) y.push_back(result.values[r]);
        ds.y = std::move(y);
    } else {
        ds.y = std::move(result.values);
    }
    return ds;
}

double mean(std::span<const double> v)
{
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v)
{
    if (v.empty()) return 0.0;
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

Dataset add_noise(const Dataset& ds, double sigma, Rng& rng)
{
    if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
    Dataset out = ds;
    out.noise_sigma = sigma;
    if (sigma == 0.0) return out;
    const double scale = sigma * stddev(ds.y);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : out.y) v += scale * normal(rng);
    return out;
}

} // namespace srforge
