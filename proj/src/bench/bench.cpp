// SPDX-License-Identifier: Apache-2.0
#include "srforge/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/fit.hpp"
#include "srforge/generator.hpp"
#include "srforge/parallel.hpp"
#include "srforge/parse.hpp"

namespace srforge {

namespace {

// Every literal becomes a placeholder too, seeded with its own value, so a
// candidate is judged by its structure alone.
std::pair<ExprTree, std::vector<double>> open_constants(const ExprTree& tree, std::span<const double> constants)
{
    ExprTree skel = skeletonize(tree);
    std::vector<double> init;
    std::size_t k = 0;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        if (skel[i].kind != TokenKind::Constant) continue;
        if (tree[i].kind == TokenKind::Constant) init.push_back(k < constants.size() ? constants[k++] : 1.0);
        else init.push_back(tree[i].value);
    }
    return {std::move(skel), std::move(init)};
}

double heldout_r2(const ExprTree& tree, std::span<const double> constants, const Dataset& test)
{
    auto r = evaluate(tree, test.X, constants);
    if (!r.ok()) return 0.0; // faulted prediction counts as a fit failure
    try {
        return r_squared(test.y, r.values);
    } catch (const ZeroVariance&) {
        return rmse(test.y, r.values) == 0.0 ? 1.0 : 0.0;
    }
}

std::size_t refit_rows(const BenchmarkCase& c) { return std::clamp<std::size_t>(c.spec.n, 100, 2000); }

bool case_selected(const BenchOptions& o, const std::string& name)
{
    return o.cases.empty() || std::find(o.cases.begin(), o.cases.end(), name) != o.cases.end();
}

std::optional<bool> check_labels(const BenchmarkCase& c, const ExprTree& tree, std::span<const double> constants)
{
    if (c.labels.empty()) return std::nullopt;
    for (const auto& label : c.labels) {
        try {
            if (!check_property(tree, constants, label, c.spec, c.dims).holds()) return false;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

struct Job {
    std::size_t case_index;
    std::size_t run;
    const ExternalCandidate* external = nullptr;
};

RunRow run_one(const BenchmarkCase& c, const Job& job, const BenchOptions& opt)
{
    RunRow row;
    row.run = job.run;
    row.seed = derive_seed(derive_seed(opt.seed, hash_string(c.suite + "/" + c.name)), job.run);
    Rng rng(row.seed);
    try {
        Dataset train = sample_case(c, rng);
        Dataset test = sample_holdout(c, rng);
        ExprTree tree;
        std::vector<double> constants;
        switch (opt.regressor) {
        case RegressorKind::GroundTruth:
            tree = c.truth;
            break;
        case RegressorKind::Search: {
            SearchConfig sc = opt.search;
            sc.seed = row.seed;
            auto res = search(train, sc);
            tree = res.best;
            constants = res.constants;
            break;
        }
        case RegressorKind::External: {
            tree = job.external->tree;
            if (tree.constant_count() > 0) {
                FitOptions fo;
                fo.restarts = opt.fit_restarts;
                fo.seed = row.seed;
                if (job.external->constants.size() == tree.constant_count()) fo.initial = job.external->constants;
                constants = fit_constants(tree, train, fo).constants;
            }
            break;
        }
        }
        row.preorder = tree.to_string();
        row.infix = tree.to_infix(constants);
        row.constants = constants;
        row.nodes = node_count(tree);
        row.r2 = heldout_r2(tree, constants, test);
        row.recovered = recovery_check(tree, constants, c, derive_seed(row.seed, 0x7ec0), opt.fit_restarts).recovered;
        row.property_ok = check_labels(c, tree, constants);
    } catch (const Error& e) {
        row.error = e.what();
        row.r2 = 0.0;
        if (!c.labels.empty()) row.property_ok = false;
    }
    return row;
}

CaseReport summarize(const BenchmarkCase& c, std::vector<RunRow> rows)
{
    CaseReport cr;
    cr.name = c.name;
    cr.runs = rows.size();
    std::vector<double> r2s;
    double nodes = 0.0, recovered = 0.0, success = 0.0;
    for (const auto& r : rows) {
        r2s.push_back(r.r2);
        nodes += static_cast<double>(r.nodes);
        recovered += r.recovered ? 1.0 : 0.0;
        if (r.property_ok && *r.property_ok) success += 1.0;
    }
    const double n = static_cast<double>(std::max<std::size_t>(1, rows.size()));
    cr.r2 = mean_ci(r2s);
    cr.nodes_mean = nodes / n;
    cr.recovery_rate = recovered / n;
    if (!c.labels.empty()) cr.success_rate = success / n;
    cr.rows = std::move(rows);
    return cr;
}

} // namespace

RecoveryResult recovery_check(const ExprTree& candidate, std::span<const double> constants, const BenchmarkCase& truth,
                              std::uint64_t seed, int restarts)
{
    RecoveryResult out;
    Rng rng(seed);
    try {
        Dataset refit = sample_holdout(truth, rng, refit_rows(truth));
        Dataset test = sample_holdout(truth, rng, 256);
        auto [skel, init] = open_constants(candidate, constants);
        if (skel.constant_count() > 0) {
            FitOptions fo;
            fo.restarts = restarts;
            fo.seed = derive_seed(seed, 1);
            fo.initial = init;
            out.constants = fit_constants(skel, refit, fo).constants;
        }
        out.heldout_r2 = heldout_r2(skel, out.constants, test);
        out.recovered = out.heldout_r2 >= kRecoveryThreshold;
    } catch (const Error&) {
        out.recovered = false;
    }
    return out;
}

std::string to_string(RegressorKind k)
{
    switch (k) {
    case RegressorKind::GroundTruth: return "ground-truth";
    case RegressorKind::Search: return "search";
    case RegressorKind::External: return "external";
    }
    return "?";
}

ExternalFile read_external(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure(fmt::format("cannot open candidates file {}", path.string()));
    ExternalFile out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++out.lines;
        try {
            auto j = nlohmann::json::parse(line);
            ExternalCandidate c;
            c.case_name = j.at("case").get<std::string>();
            const auto& pre = j.at("preorder");
            c.tree = pre.is_string() ? parse_bracketed(pre.get<std::string>())
                                     : parse_token_names(pre.get<std::vector<std::string>>());
            c.constants = j.value("constants", std::vector<double>{});
            out.candidates.push_back(std::move(c));
        } catch (const std::exception& e) {
            ++out.skipped;
            out.errors.push_back(fmt::format("line {}: {}", out.lines, e.what()));
        }
    }
    return out;
}

MetricsReport run_benchmark(const Suite& suite, const BenchOptions& opt, const ExternalFile* external)
{
    if (opt.runs == 0) throw ConfigError("runs must be at least 1");
    if (opt.regressor == RegressorKind::External && !external)
        throw ConfigError("the external regressor needs a candidates file");
    if (opt.regressor == RegressorKind::Search) opt.search.validate();

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < suite.cases.size(); ++i) {
        if (case_selected(opt, suite.cases[i].name)) selected.push_back(i);
    }

    std::vector<Job> jobs;
    for (auto ci : selected) {
        if (opt.regressor == RegressorKind::External) {
            std::size_t run = 0;
            for (const auto& cand : external->candidates) {
                if (cand.case_name == suite.cases[ci].name) jobs.push_back({ci, run++, &cand});
            }
        } else {
            for (std::size_t r = 0; r < opt.runs; ++r) jobs.push_back({ci, r, nullptr});
        }
    }

    std::vector<RunRow> rows(jobs.size());
    parallel_for(jobs.size(), opt.workers,
                 [&](std::size_t k) { rows[k] = run_one(suite.cases[jobs[k].case_index], jobs[k], opt); });

    MetricsReport rep;
    rep.suite = suite.name;
    rep.regressor = to_string(opt.regressor);
    rep.runs_per_case = opt.regressor == RegressorKind::External ? 0 : opt.runs;
    rep.seed = opt.seed;
    rep.skipped_lines = external ? external->skipped : 0;

    std::size_t k = 0;
    for (auto ci : selected) {
        std::vector<RunRow> mine;
        while (k < jobs.size() && jobs[k].case_index == ci) mine.push_back(std::move(rows[k++]));
        if (mine.empty()) continue;
        rep.cases.push_back(summarize(suite.cases[ci], std::move(mine)));
    }

    std::vector<double> case_r2;
    double nodes = 0.0, recovery = 0.0, success = 0.0;
    std::size_t with_success = 0;
    for (const auto& c : rep.cases) {
        case_r2.push_back(c.r2.mean);
        nodes += c.nodes_mean;
        recovery += c.recovery_rate;
        if (c.success_rate) {
            success += *c.success_rate;
            ++with_success;
        }
    }
    if (!rep.cases.empty()) {
        const double n = static_cast<double>(rep.cases.size());
        rep.r2 = mean_ci(case_r2);
        rep.nodes_mean = nodes / n;
        rep.recovery_rate = recovery / n;
    }
    if (with_success) rep.success_rate = success / static_cast<double>(with_success);
    return rep;
}

MetricsReport external_candidates(const std::filesystem::path& path, const Suite& suite, BenchOptions options)
{
    auto file = read_external(path);
    options.regressor = RegressorKind::External;
    return run_benchmark(suite, options, &file);
}

nlohmann::ordered_json to_json(const MetricsReport& rep)
{
    auto ci_json = [](const MeanCi& ci) {
        nlohmann::ordered_json j;
        j["mean"] = ci.mean;
        j["ci95_low"] = ci.low();
        j["ci95_high"] = ci.high();
        return j;
    };
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["regressor"] = rep.regressor;
    j["runs_per_case"] = rep.runs_per_case;
    j["seed"] = rep.seed;
    j["skipped_lines"] = rep.skipped_lines;
    auto cases = nlohmann::ordered_json::array();
    for (const auto& c : rep.cases) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["runs"] = c.runs;
        cj["r2"] = ci_json(c.r2);
        cj["nodes_mean"] = c.nodes_mean;
        cj["recovery_rate"] = c.recovery_rate;
        cj["success_rate"] = c.success_rate ? nlohmann::ordered_json(*c.success_rate) : nlohmann::ordered_json();
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : c.rows) {
            nlohmann::ordered_json rj;
            rj["run"] = r.run;
            rj["seed"] = r.seed;
            rj["preorder"] = r.preorder;
            rj["infix"] = r.infix;
            rj["constants"] = r.constants;
            rj["r2"] = r.r2;
            rj["nodes"] = r.nodes;
            rj["recovered"] = r.recovered;
            rj["property_ok"] = r.property_ok ? nlohmann::ordered_json(*r.property_ok) : nlohmann::ordered_json();
            if (!r.error.empty()) rj["error"] = r.error;
            rows.push_back(std::move(rj));
        }
        cj["rows"] = std::move(rows);
        cases.push_back(std::move(cj));
    }
    j["cases"] = std::move(cases);
    nlohmann::ordered_json agg;
    agg["r2"] = ci_json(rep.r2);
    agg["nodes_mean"] = rep.nodes_mean;
    agg["recovery_rate"] = rep.recovery_rate;
    agg["success_rate"] = rep.success_rate ? nlohmann::ordered_json(*rep.success_rate) : nlohmann::ordered_json();
    j["aggregate"] = std::move(agg);
    return j;
}

std::string render_table(const MetricsReport& rep)
{
    std::size_t w = 9;
    for (const auto& c : rep.cases) w = std::max(w, c.name.size());
    auto pct = [](std::optional<double> v) { return v ? fmt::format("{:.1f}%", 100.0 * *v) : std::string("-"); };
    std::string out = fmt::format("{} ({}, seed {})\n", rep.suite, rep.regressor, rep.seed);
    out += fmt::format("{:<{}}  {:>4}  {:>22}  {:>7}  {:>8}  {:>8}\n", "case", w, "runs", "R2 (95% CI)", "Nodes",
                       "Recover", "Success");
    auto line = [&](const std::string& name, std::size_t runs, const MeanCi& r2, double nodes, double rec,
                    std::optional<double> succ) {
        out += fmt::format("{:<{}}  {:>4}  {:>22}  {:>7.2f}  {:>8}  {:>8}\n", name, w, runs,
                           fmt::format("{:.4f} ± {:.4f}", r2.mean, r2.half_width), nodes, pct(rec), pct(succ));
    };
    std::size_t total = 0;
    for (const auto& c : rep.cases) {
        line(c.name, c.runs, c.r2, c.nodes_mean, c.recovery_rate, c.success_rate);
        total += c.runs;
    }
    line("aggregate", total, rep.r2, rep.nodes_mean, rep.recovery_rate, rep.success_rate);
    if (rep.skipped_lines) out += fmt::format("skipped {} malformed candidate lines\n", rep.skipped_lines);
    return out;
}

PropertyAgreement property_agreement(const Suite& suite, const PropertyOptions& options)
{
    static constexpr PropertyKind kDetectable[] = {
        PropertyKind::SymmetricEven, PropertyKind::SymmetricOddOrigin, PropertyKind::MonotoneIncreasing,
        PropertyKind::MonotoneDecreasing, PropertyKind::Convex, PropertyKind::Concave,
    };
    PropertyAgreement out;
    for (const auto& c : suite.cases) {
        for (const auto& label : c.labels) {
            ++out.checked;
            PropertyReport rep;
            try {
                rep = check_property(c.truth, {}, label, c.spec, c.dims, options);
            } catch (const UnsupportedDomain& e) {
                rep.label = label;
                rep.evidence = e.what();
            }
            if (rep.holds()) {
                ++out.agreed;
                continue;
            }
            auto detected = nlohmann::ordered_json::array();
            for (auto kind : kDetectable) {
                try {
                    if (check_property(c.truth, {}, PropertyLabel{kind, std::nullopt}, c.spec, c.dims, options).holds())
                        detected.push_back(PropertyLabel{kind, std::nullopt}.to_string());
                } catch (const UnsupportedDomain&) {
                }
            }
            nlohmann::ordered_json d;
            d["case"] = c.name;
            d["expression"] = c.expr;
            d["label"] = label.to_string();
            d["listed_as"] = c.group;
            d["verdict"] = to_string(rep.verdict);
            d["evidence"] = rep.evidence;
            d["witness"] = rep.witnesses.empty() ? nlohmann::ordered_json() : to_json(rep.witnesses.front());
            d["detected"] = std::move(detected);
            d["domain"] = c.spec.to_string();
            out.discrepancies.push_back(std::move(d));
        }
    }
    return out;
}

} // namespace srforge
