// SPDX-License-Identifier: Apache-2.0
// srforge command line: corpus and dialogue generation, fitting, search,
// benchmarking and property checks.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "srforge/bench.hpp"
#include "srforge/corpus.hpp"
#include "srforge/dialogue.hpp"
#include "srforge/error.hpp"
#include "srforge/fit.hpp"
#include "srforge/parallel.hpp"
#include "srforge/parse.hpp"
#include "srforge/property.hpp"
#include "srforge/search.hpp"
#include "srforge/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace srforge;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<std::size_t> workers;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--seed", c.seed, "global seed (falls back to the config, then SRFORGE_SEED)");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--workers", c.workers, "worker threads (default: available parallelism)");
}

json load_config(const Common& c)
{
    if (c.config_path.empty()) return json::object();
    std::ifstream in(c.config_path);
    if (!in) throw IoFailure(fmt::format("cannot open config {}", c.config_path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError(fmt::format("{} is not a JSON object", c.config_path));
    return j;
}

std::uint64_t resolve_seed(const Common& c, const json& cfg, std::uint64_t fallback)
{
    if (c.seed) return *c.seed;
    if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
    if (const char* env = std::getenv("SRFORGE_SEED"); env && *env) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("SRFORGE_SEED='{}' is not an integer", env));
        }
    }
    return fallback;
}

std::size_t resolve_workers(const Common& c, const json& cfg)
{
    std::size_t w = c.workers ? *c.workers : cfg.value("workers", default_workers());
    if (w == 0) throw ConfigError("--workers must be at least 1");
    return w;
}

fs::path prepare_out(const Common& c, const json& cfg)
{
    fs::path out = c.out != "out" || !cfg.contains("out") ? fs::path(c.out) : fs::path(cfg.at("out").get<std::string>());
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoFailure(fmt::format("cannot create {}: {}", out.string(), ec.message()));
    return out;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure(fmt::format("cannot write {}", path.string()));
    f << text;
}

void write_provenance(const fs::path& out, const std::string& command, ordered_json resolved)
{
    ordered_json j;
    j["command"] = command;
    j["config"] = std::move(resolved);
    write_text(out / "config.json", j.dump(2) + "\n");
}

json parse_json_or_file(const std::string& text)
{
    json j = json::parse(text, nullptr, false);
    if (!j.is_discarded()) return j;
    std::ifstream in(text);
    if (!in) throw ConfigError(fmt::format("'{}' is neither JSON nor a readable file", text));
    j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(fmt::format("{} does not hold valid JSON", text));
    return j;
}

// ---- gen-corpus

struct GenCorpusArgs {
    Common common;
    std::optional<std::size_t> n;
    std::vector<std::string> operators;
    std::optional<std::size_t> max_length;
    std::optional<std::size_t> dims;
};

int cmd_gen_corpus(const GenCorpusArgs& a)
{
    json cfg = load_config(a.common);
    if (a.max_length) cfg["max_length"] = *a.max_length;
    if (a.dims) cfg["dims"] = *a.dims;
    std::vector<std::string> ops = !a.operators.empty() ? a.operators
                                   : cfg.contains("operators") ? cfg.at("operators").get<std::vector<std::string>>()
                                                               : OperatorRegistry::primitives().names();
    auto registry = OperatorRegistry::from_names(ops);
    cfg["seed"] = resolve_seed(a.common, cfg, 42);
    GenConfig gen = gen_config_from_json(cfg, registry);
    std::size_t n = a.n ? *a.n : cfg.value("n", std::size_t{1000});
    std::size_t workers = resolve_workers(a.common, cfg);
    fs::path out = prepare_out(a.common, cfg);

    CorpusStats stats;
    auto records = generate_corpus(gen, n, workers, &stats);
    write_corpus(records, out / "corpus.jsonl");

    ordered_json st;
    st["requested"] = stats.requested;
    st["emitted"] = stats.emitted;
    st["duplicates"] = stats.duplicates;
    st["rejected"] = stats.rejected;
    write_text(out / "stats.json", st.dump(2) + "\n");

    ordered_json resolved;
    resolved["n"] = n;
    resolved["operators"] = registry.names();
    resolved["generator"] = to_json(gen);
    resolved["workers"] = workers;
    write_provenance(out, "gen-corpus", resolved);
    fmt::print("wrote {} expressions to {}\n", stats.emitted, (out / "corpus.jsonl").string());
    return 0;
}

// ---- gen-dialogues

struct GenDialoguesArgs {
    Common common;
    std::string corpus;
    std::vector<std::string> kinds;
    std::optional<std::size_t> per_expression;
    std::optional<std::size_t> T;
};

int cmd_gen_dialogues(const GenDialoguesArgs& a)
{
    json cfg = load_config(a.common);
    DialogueConfig dc;
    std::string corpus_path = !a.corpus.empty() ? a.corpus : cfg.value("corpus", std::string{});
    if (corpus_path.empty()) throw ConfigError("gen-dialogues needs --corpus");
    if (!fs::exists(corpus_path)) throw IoFailure(fmt::format("corpus {} does not exist", corpus_path));

    std::vector<std::string> kinds = !a.kinds.empty() ? a.kinds : cfg.value("kinds", std::vector<std::string>{});
    for (const auto& k : kinds) {
        if (k == "all") {
            dc.kinds.clear();
            break;
        }
        dc.kinds.push_back(template_kind_from_string(k));
    }
    dc.per_expression = a.per_expression ? *a.per_expression : cfg.value("per_expression", dc.per_expression);
    if (dc.per_expression == 0) throw ConfigError("--per-expression must be at least 1");
    dc.T = a.T ? *a.T : cfg.value("T", dc.T);
    dc.T_jitter = cfg.value("T_jitter", a.T ? std::vector<std::size_t>{} : dc.T_jitter);
    dc.noise_levels = cfg.value("noise_levels", dc.noise_levels);
    dc.seed = resolve_seed(a.common, cfg, dc.seed);
    dc.workers = resolve_workers(a.common, cfg);
    if (cfg.contains("chain_search")) {
        json merged = to_json(dc.chain_search);
        merged.update(cfg.at("chain_search"));
        dc.chain_search = search_config_from_json(merged);
    }
    fs::path out = prepare_out(a.common, cfg);

    auto corpus = read_corpus(corpus_path);
    DialogueStats stats;
    auto records = build_dialogues(corpus, dc, &stats);
    for (const auto& r : records) {
        auto v = validate_record(r);
        if (!v.ok()) throw ConfigError(fmt::format("record {} failed validation: {}", r.id, v.problems.front()));
    }
    emit_corpus(records, out / "dialogues.jsonl");

    ordered_json st;
    st["expressions"] = corpus.size();
    st["emitted"] = stats.emitted;
    st["skipped"] = stats.skipped;
    st["per_kind"] = stats.per_kind;
    write_text(out / "stats.json", st.dump(2) + "\n");

    ordered_json resolved;
    resolved["corpus"] = corpus_path;
    auto kj = ordered_json::array();
    for (auto k : dc.kinds) kj.push_back(to_string(k));
    resolved["kinds"] = kj.empty() ? ordered_json("all") : kj;
    resolved["per_expression"] = dc.per_expression;
    resolved["T"] = dc.T;
    resolved["T_jitter"] = dc.T_jitter;
    resolved["noise_levels"] = dc.noise_levels;
    resolved["seed"] = dc.seed;
    resolved["workers"] = dc.workers;
    resolved["chain_search"] = to_json(dc.chain_search);
    write_provenance(out, "gen-dialogues", resolved);
    fmt::print("wrote {} dialogues ({} skipped) to {}\n", stats.emitted, stats.skipped,
               (out / "dialogues.jsonl").string());
    return 0;
}

// ---- data sources shared by fit and search

struct DataArgs {
    std::string data;
    std::string suite;
    std::string case_name;
};

void add_data_options(CLI::App* cmd, DataArgs& d)
{
    cmd->add_option("--data", d.data, "CSV with columns x1..xd,y");
    cmd->add_option("--suite", d.suite, "benchmark suite to sample from (with --case)");
    cmd->add_option("--case", d.case_name, "benchmark case name");
}

Dataset resolve_data(const DataArgs& d, const json& cfg, std::uint64_t seed, ordered_json& resolved)
{
    std::string data = !d.data.empty() ? d.data : cfg.value("data", std::string{});
    std::string suite = !d.suite.empty() ? d.suite : cfg.value("suite", std::string{});
    std::string case_name = !d.case_name.empty() ? d.case_name : cfg.value("case", std::string{});
    if (!data.empty()) {
        std::ifstream in(data, std::ios::binary);
        if (!in) throw IoFailure(fmt::format("cannot open data {}", data));
        std::stringstream ss;
        ss << in.rdbuf();
        resolved["data"] = data;
        return dataset_from_csv(ss.str());
    }
    if (suite.empty() || case_name.empty()) throw ConfigError("give --data, or --suite with --case");
    Suite s = load_suite(suite);
    for (const auto& c : s.cases) {
        if (c.name == case_name) {
            Rng rng = make_rng(seed, hash_string(s.name + "/" + c.name));
            resolved["suite"] = s.name;
            resolved["case"] = c.name;
            return sample_case(c, rng);
        }
    }
    throw ConfigError(fmt::format("suite {} has no case '{}'", s.name, case_name));
}

// ---- fit

struct FitArgs {
    Common common;
    DataArgs data;
    std::string expr;
    std::optional<int> restarts;
};

int cmd_fit(const FitArgs& a)
{
    json cfg = load_config(a.common);
    std::string expr = !a.expr.empty() ? a.expr : cfg.value("expr", std::string{});
    if (expr.empty()) throw ConfigError("fit needs --expr");
    std::uint64_t seed = resolve_seed(a.common, cfg, 0);
    const ExprTree tree = parse_expression(expr);
    FitOptions fo;
    fo.seed = seed;
    fo.restarts = a.restarts ? *a.restarts : cfg.value("restarts", fo.restarts);
    if (fo.restarts < 1) throw ConfigError("--restarts must be at least 1");
    fs::path out = prepare_out(a.common, cfg);

    ordered_json resolved;
    resolved["expr"] = expr;
    resolved["restarts"] = fo.restarts;
    resolved["seed"] = seed;
    Dataset ds = resolve_data(a.data, cfg, seed, resolved);
    std::vector<double> literals;
    ExprTree skeleton = skeletonize(tree, &literals);
    fo.initial = literals;
    FitResult fr = fit_constants(skeleton, ds, fo);

    ordered_json r;
    r["preorder"] = skeleton.to_string();
    r["infix"] = skeleton.to_infix(fr.constants);
    r["constants"] = fr.constants;
    r["r2"] = fr.r2;
    r["mse"] = fr.mse;
    r["reward"] = reward(skeleton, fr.constants, ds);
    r["converged"] = fr.converged;
    write_text(out / "fit.json", r.dump(2) + "\n");
    write_provenance(out, "fit", resolved);
    fmt::print("{}  R2={:.12g}\n", r["infix"].get<std::string>(), fr.r2);
    return 0;
}

// ---- search

struct SearchArgs {
    Common common;
    DataArgs data;
    std::optional<double> budget_secs;
    std::string filters;
    std::vector<std::string> operators;
};

SearchConfig resolve_search(const json& cfg, std::uint64_t seed, std::optional<double> budget_secs,
                            const std::string& filters, const std::vector<std::string>& operators)
{
    json sj = cfg.value("search", json::object());
    sj["seed"] = seed;
    if (budget_secs) sj["time_budget_secs"] = *budget_secs;
    if (!filters.empty()) sj["filters"] = parse_json_or_file(filters);
    if (!operators.empty()) sj["operators"] = operators;
    return search_config_from_json(sj);
}

int cmd_search(const SearchArgs& a)
{
    json cfg = load_config(a.common);
    std::uint64_t seed = resolve_seed(a.common, cfg, 1);
    SearchConfig sc = resolve_search(cfg, seed, a.budget_secs, a.filters, a.operators);
    fs::path out = prepare_out(a.common, cfg);
    ordered_json resolved;
    resolved["search"] = to_json(sc);
    Dataset ds = resolve_data(a.data, cfg, seed, resolved);

    SearchResult res = search(ds, sc);
    write_chain(res.chain, out / "chain.jsonl");
    ordered_json r;
    r["preorder"] = res.best.to_string();
    r["infix"] = res.best.to_infix(res.constants);
    r["constants"] = res.constants;
    r["reward"] = res.reward;
    r["r2"] = res.r2;
    r["generations"] = res.generations;
    r["evaluations"] = res.evaluations;
    r["budget_exhausted"] = res.budget_exhausted;
    write_text(out / "result.json", r.dump(2) + "\n");
    write_provenance(out, "search", resolved);
    fmt::print("{}  R2={:.12g}\n", r["infix"].get<std::string>(), res.r2);
    return 0;
}

// ---- bench

struct BenchArgs {
    Common common;
    std::string suite;
    std::optional<std::size_t> runs;
    std::string regressor;
    std::string candidates;
    std::vector<std::string> cases;
    std::optional<double> budget_secs;
    std::string filters;
};

RegressorKind regressor_from_string(const std::string& s)
{
    for (auto k : {RegressorKind::GroundTruth, RegressorKind::Search, RegressorKind::External}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError(fmt::format("unknown regressor '{}'", s));
}

int cmd_bench(const BenchArgs& a)
{
    json cfg = load_config(a.common);
    std::string suite_name = !a.suite.empty() ? a.suite : cfg.value("suite", std::string{});
    if (suite_name.empty()) throw ConfigError("bench needs --suite");
    BenchOptions bo;
    bo.runs = a.runs ? *a.runs : cfg.value("runs", bo.runs);
    if (bo.runs == 0) throw ConfigError("--runs must be at least 1");
    std::string candidates = !a.candidates.empty() ? a.candidates : cfg.value("candidates", std::string{});
    std::string regressor = !a.regressor.empty() ? a.regressor
                            : cfg.contains("regressor")   ? cfg.at("regressor").get<std::string>()
                            : !candidates.empty()         ? to_string(RegressorKind::External)
                                                          : to_string(RegressorKind::Search);
    bo.regressor = regressor_from_string(regressor);
    bo.seed = resolve_seed(a.common, cfg, 0);
    bo.workers = resolve_workers(a.common, cfg);
    bo.cases = !a.cases.empty() ? a.cases : cfg.value("cases", std::vector<std::string>{});
    bo.fit_restarts = cfg.value("fit_restarts", bo.fit_restarts);
    bo.search = resolve_search(cfg, bo.seed, a.budget_secs, a.filters, {});
    Suite suite = load_suite(suite_name);
    fs::path out = prepare_out(a.common, cfg);

    MetricsReport report;
    if (bo.regressor == RegressorKind::External) {
        if (candidates.empty()) throw ConfigError("the external regressor needs --candidates");
        report = external_candidates(candidates, suite, bo);
    } else {
        report = run_benchmark(suite, bo);
    }
    write_text(out / "report.json", to_json(report).dump(2) + "\n");
    const std::string table = render_table(report);
    write_text(out / "report.txt", table);

    ordered_json resolved;
    resolved["suite"] = suite.name;
    resolved["regressor"] = to_string(bo.regressor);
    if (!candidates.empty()) resolved["candidates"] = candidates;
    resolved["runs"] = bo.runs;
    resolved["seed"] = bo.seed;
    resolved["workers"] = bo.workers;
    resolved["cases"] = bo.cases;
    resolved["fit_restarts"] = bo.fit_restarts;
    if (bo.regressor == RegressorKind::Search) resolved["search"] = to_json(bo.search);
    write_provenance(out, "bench", resolved);
    fmt::print("{}", table);
    return 0;
}

// ---- check-props

struct CheckPropsArgs {
    Common common;
    std::string suite;
    std::string expr;
    std::vector<std::string> properties;
    std::string domain;
    std::optional<std::size_t> grid;
};

int cmd_check_props(const CheckPropsArgs& a)
{
    json cfg = load_config(a.common);
    PropertyOptions po;
    po.grid = a.grid ? *a.grid : cfg.value("grid", po.grid);
    po.tolerance = cfg.value("tolerance", po.tolerance);
    po.anchors = cfg.value("anchors", po.anchors);
    po.anchor_seed = resolve_seed(a.common, cfg, po.anchor_seed);
    fs::path out = prepare_out(a.common, cfg);
    std::string expr = !a.expr.empty() ? a.expr : cfg.value("expr", std::string{});
    std::string suite_name = !a.suite.empty() ? a.suite : cfg.value("suite", std::string{});

    ordered_json resolved;
    resolved["grid"] = po.grid;
    resolved["tolerance"] = po.tolerance;
    resolved["anchors"] = po.anchors;
    resolved["seed"] = po.anchor_seed;
    ordered_json result;
    if (!expr.empty()) {
        ExprTree tree = parse_expression(expr);
        SamplingSpec domain = parse_sampling_spec(!a.domain.empty() ? a.domain : cfg.value("domain", std::string("U(-1, 1, 100)")));
        auto props = !a.properties.empty() ? a.properties : cfg.value("properties", std::vector<std::string>{});
        if (props.empty()) throw ConfigError("check-props needs --property with --expr");
        resolved["expr"] = expr;
        resolved["domain"] = domain.to_string();
        resolved["properties"] = props;
        result = ordered_json::array();
        for (const auto& p : props) {
            auto label = PropertyLabel::parse(p);
            ordered_json r;
            r["property"] = label.to_string();
            try {
                auto rep = check_property(tree, {}, label, domain, 0, po);
                r["verdict"] = to_string(rep.verdict);
                r["evidence"] = rep.evidence;
                r["witness"] = rep.witnesses.empty() ? ordered_json() : to_json(rep.witnesses.front());
            } catch (const UnsupportedDomain& e) {
                r["verdict"] = to_string(Verdict::Inconclusive);
                r["evidence"] = e.what();
            }
            fmt::print("{}: {}\n", label.to_string(), r["verdict"].get<std::string>());
            result.push_back(std::move(r));
        }
    } else {
        if (suite_name.empty()) suite_name = "knowledge";
        Suite suite = load_suite(suite_name);
        resolved["suite"] = suite.name;
        auto agreement = property_agreement(suite, po);
        result["suite"] = suite.name;
        result["checked"] = agreement.checked;
        result["agreed"] = agreement.agreed;
        result["discrepancies"] = agreement.discrepancies;
        fmt::print("{}: {}/{} labels confirmed, {} discrepancies\n", suite.name, agreement.agreed, agreement.checked,
                   agreement.discrepancies.size());
    }
    write_text(out / "properties.json", result.dump(2) + "\n");
    write_provenance(out, "check-props", resolved);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"srforge: symbolic regression corpus, search and benchmark pipelines"};
    app.require_subcommand(1);

    GenCorpusArgs gc;
    auto* gen_corpus = app.add_subcommand("gen-corpus", "generate a corpus of random expressions with data specs");
    add_common(gen_corpus, gc.common);
    gen_corpus->add_option("--n", gc.n, "number of expressions");
    gen_corpus->add_option("--operators", gc.operators, "operator names, e.g. + - * / sin cos");
    gen_corpus->add_option("--max-length", gc.max_length, "maximum preorder length");
    gen_corpus->add_option("--dims", gc.dims, "number of input variables");

    GenDialoguesArgs gd;
    auto* gen_dialogues = app.add_subcommand("gen-dialogues", "render a corpus into instruction dialogues");
    add_common(gen_dialogues, gd.common);
    gen_dialogues->add_option("--corpus", gd.corpus, "corpus JSONL from gen-corpus");
    gen_dialogues->add_option("--kinds", gd.kinds, "template kinds, or 'all'");
    gen_dialogues->add_option("--per-expression", gd.per_expression, "records per expression");
    gen_dialogues->add_option("--T", gd.T, "OCOI length for multi-turn records");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit the constants of one expression");
    add_common(fit, fa.common);
    add_data_options(fit, fa.data);
    fit->add_option("--expr", fa.expr, "expression, infix or bracketed preorder");
    fit->add_option("--restarts", fa.restarts, "BFGS restarts");

    SearchArgs sa;
    auto* srch = app.add_subcommand("search", "run the internal regressor on one dataset");
    add_common(srch, sa.common);
    add_data_options(srch, sa.data);
    srch->add_option("--budget-secs", sa.budget_secs, "wall-clock budget");
    srch->add_option("--filters", sa.filters, "JSON list of filters, or a file holding one");
    srch->add_option("--operators", sa.operators, "operator names");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "benchmark a regressor on a suite");
    add_common(bench, ba.common);
    bench->add_option("--suite", ba.suite, "suite name");
    bench->add_option("--runs", ba.runs, "runs per case");
    bench->add_option("--regressor", ba.regressor, "ground-truth, search or external");
    bench->add_option("--candidates", ba.candidates, "JSONL of external candidates");
    bench->add_option("--cases", ba.cases, "case subset");
    bench->add_option("--budget-secs", ba.budget_secs, "search budget per run");
    bench->add_option("--filters", ba.filters, "JSON filters for the search regressor");

    CheckPropsArgs cp;
    auto* check = app.add_subcommand("check-props", "check property labels on a suite or one expression");
    add_common(check, cp.common);
    check->add_option("--suite", cp.suite, "labelled suite (default knowledge)");
    check->add_option("--expr", cp.expr, "expression to check instead of a suite");
    check->add_option("--property", cp.properties, "property names, e.g. convex periodic-in(x1)");
    check->add_option("--domain", cp.domain, "domain as U(low, high, n)");
    check->add_option("--grid", cp.grid, "grid points per line");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_corpus) return cmd_gen_corpus(gc);
        if (*gen_dialogues) return cmd_gen_dialogues(gd);
        if (*fit) return cmd_fit(fa);
        if (*srch) return cmd_search(sa);
        if (*bench) return cmd_bench(ba);
        if (*check) return cmd_check_props(cp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
