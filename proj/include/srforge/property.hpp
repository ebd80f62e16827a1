// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "srforge/dataset.hpp"
#include "srforge/tree.hpp"

namespace srforge {

enum class PropertyKind {
    PeriodicIn,
    SymmetricEven,
    SymmetricOddOrigin,
    MonotoneIncreasing,
    MonotoneDecreasing,
    Convex,
    Concave,
    Bounded,
};

struct PropertyLabel {
    PropertyKind kind = PropertyKind::Bounded;
    // Variable scope; nullopt means every variable. periodic-in always has one.
    std::optional<std::uint16_t> var;

    // "periodic-in(x1)", "monotone-increasing", "convex(x2)"
    std::string to_string() const;
    static PropertyLabel parse(std::string_view text);

    friend bool operator==(const PropertyLabel&, const PropertyLabel&) = default;
};

enum class Verdict { Holds, Fails, Inconclusive };
std::string to_string(Verdict v);

// Concrete evidence of a violated defining inequality. `points` are the input
// rows involved, `values` the function values there, `excess` how far the
// inequality is violated beyond tolerance * scale.
struct Witness {
    std::vector<std::vector<double>> points;
    std::vector<double> values;
    std::string relation;
    double excess = 0.0;
};

struct PropertyReport {
    PropertyLabel label;
    Verdict verdict = Verdict::Inconclusive;
    std::string evidence;
    std::vector<Witness> witnesses;
    double tolerance = 0.0;
    double scale = 1.0;
    std::optional<double> period;

    bool holds() const noexcept { return verdict == Verdict::Holds; }
};

nlohmann::ordered_json to_json(const Witness& w);

struct PropertyOptions {
    std::size_t grid = 2001;
    double tolerance = 1e-6;
    std::size_t anchors = 5;
    std::uint64_t anchor_seed = 0x5eed;
};

// Structural sufficient condition for periodicity in `var`: every occurrence
// sits inside sin/cos/tan whose argument is affine in var with a constant
// slope, and the slopes are commensurate. Returns the common period.
std::optional<double> structural_period(const ExprTree& tree, std::span<const double> constants, std::uint16_t var);

// Throws UnsupportedDomain for symmetry checks on a domain that is not
// symmetric about zero in the affected variables.
PropertyReport check_property(const ExprTree& tree, std::span<const double> constants, const PropertyLabel& label,
                              const SamplingSpec& domain, std::size_t dims = 0, const PropertyOptions& options = {});

// Re-evaluates the witness points and confirms the stated inequality.
bool witness_confirms(const ExprTree& tree, std::span<const double> constants, const PropertyReport& report,
                      const Witness& witness);

struct Candidate {
    ExprTree tree;
    std::vector<double> constants;
};

// Fraction of candidates whose verdict is holds; inconclusive counts against.
double success_rate(std::span<const Candidate> candidates, const PropertyLabel& label, const SamplingSpec& domain,
                    std::size_t dims = 0, const PropertyOptions& options = {});

} // namespace srforge
