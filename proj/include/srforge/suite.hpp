// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "srforge/dataset.hpp"
#include "srforge/property.hpp"
#include "srforge/rng.hpp"
#include "srforge/tree.hpp"

namespace srforge {

struct BenchmarkCase {
    std::string suite;
    std::string name;
    std::string expr;                // infix as transcribed
    std::size_t dims = 1;
    SamplingSpec spec;
    std::vector<PropertyLabel> labels;
    std::vector<std::string> variable_names; // empty: x1..xd
    std::string group; // table the case is listed in, labelled cases only
    std::string notes;
    ExprTree truth;                  // parsed, literals kept
};

struct Suite {
    std::string name;
    std::vector<BenchmarkCase> cases;
};

std::filesystem::path default_data_dir();

// Suite files live in <data_dir>/suites/<lowercase name>.json.
std::vector<std::string> suite_names(const std::filesystem::path& data_dir = default_data_dir());
// Matches names case-insensitively; throws UnknownSuite.
Suite load_suite(const std::string& name, const std::filesystem::path& data_dir = default_data_dir());
Suite load_suite_file(const std::filesystem::path& path);

// Training sample drawn as the case's spec prescribes.
Dataset sample_case(const BenchmarkCase& c, Rng& rng);
// n fresh iid uniform points over the case's box, for held-out scoring.
Dataset sample_holdout(const BenchmarkCase& c, Rng& rng, std::size_t n = 256);

} // namespace srforge
