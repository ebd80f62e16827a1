// SPDX-License-Identifier: Apache-2.0
#include "srforge/suite.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "srforge/error.hpp"
#include "srforge/generator.hpp"
#include "srforge/parse.hpp"

namespace srforge {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::filesystem::path default_data_dir()
{
    if (const char* env = std::getenv("SRFORGE_DATA_DIR"); env && *env) return env;
    return SRFORGE_DATA_DIR;
}

std::vector<std::string> suite_names(const std::filesystem::path& data_dir)
{
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(data_dir / "suites", ec)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        try {
            out.push_back(nlohmann::json::parse(in).at("suite").get<std::string>());
        } catch (const nlohmann::json::exception&) {
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Suite load_suite_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoFailure(fmt::format("cannot open suite file {}", path.string()));
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
    Suite s;
    s.name = j.at("suite").get<std::string>();
    for (const auto& cj : j.at("cases")) {
        BenchmarkCase c;
        c.suite = s.name;
        c.name = cj.at("name").get<std::string>();
        c.expr = cj.at("expr").get<std::string>();
        c.dims = cj.value("d", std::size_t{1});
        c.spec = sampling_spec_from_json(cj.at("spec"));
        c.notes = cj.value("notes", std::string{});
        c.group = cj.value("group", std::string{});
        c.variable_names = cj.value("vars", std::vector<std::string>{});
        for (const auto& l : cj.value("labels", std::vector<std::string>{})) c.labels.push_back(PropertyLabel::parse(l));
        ParseOptions po;
        po.variable_names = c.variable_names;
        try {
            c.truth = parse_expression(c.expr, po);
        } catch (const ParseFailure& e) {
            throw ParseFailure(fmt::format("{} / {}: {}", s.name, c.name, e.what()));
        }
        if (c.truth.variable_span() > c.dims)
            throw ConfigError(fmt::format("{}: expression uses x{} but d = {}", c.name, c.truth.variable_span(), c.dims));
        s.cases.push_back(std::move(c));
    }
    return s;
}

Suite load_suite(const std::string& name, const std::filesystem::path& data_dir)
{
    const auto want = lower(name);
    auto direct = data_dir / "suites" / (want + ".json");
    if (std::filesystem::exists(direct)) return load_suite_file(direct);
    for (const auto& known : suite_names(data_dir)) {
        if (lower(known) == want) return load_suite_file(data_dir / "suites" / (lower(known) + ".json"));
    }
    throw UnknownSuite(fmt::format("no suite named '{}' under {}", name, (data_dir / "suites").string()));
}

Dataset sample_case(const BenchmarkCase& c, Rng& rng)
{
    return sample_dataset(c.truth, c.spec, {}, rng, c.dims);
}

Dataset sample_holdout(const BenchmarkCase& c, Rng& rng, std::size_t n)
{
    SamplingSpec spec = c.spec;
    spec.dist = Distribution::Uniform;
    spec.n = n;
    return sample_dataset(c.truth, spec, {}, rng, c.dims);
}

} // namespace srforge
