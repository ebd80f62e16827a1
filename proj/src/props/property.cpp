// SPDX-License-Identifier: Apache-2.0
#include "srforge/property.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/eval.hpp"
#include "srforge/rng.hpp"

namespace srforge {

namespace {

struct KindName {
    PropertyKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {PropertyKind::PeriodicIn, "periodic-in"},
    {PropertyKind::SymmetricEven, "symmetric-even"},
    {PropertyKind::SymmetricOddOrigin, "symmetric-odd-origin"},
    {PropertyKind::MonotoneIncreasing, "monotone-increasing"},
    {PropertyKind::MonotoneDecreasing, "monotone-decreasing"},
    {PropertyKind::Convex, "convex"},
    {PropertyKind::Concave, "concave"},
    {PropertyKind::Bounded, "bounded"},
};

std::string_view kind_name(PropertyKind k)
{
    for (const auto& kn : kKindNames) {
        if (kn.kind == k) return kn.name;
    }
    return "?";
}

} // namespace

std::string PropertyLabel::to_string() const
{
    if (var) return fmt::format("{}(x{})", kind_name(kind), *var + 1);
    return std::string(kind_name(kind));
}

PropertyLabel PropertyLabel::parse(std::string_view text)
{
    std::string_view head = text;
    std::optional<std::uint16_t> var;
    if (auto open = text.find('('); open != std::string_view::npos) {
        if (text.back() != ')') throw ConfigError(fmt::format("bad property label '{}'", text));
        head = text.substr(0, open);
        auto inner = text.substr(open + 1, text.size() - open - 2);
        auto tok = token_from_name(inner, OperatorRegistry{});
        if (tok.kind != TokenKind::Variable) throw ConfigError(fmt::format("bad property scope '{}'", inner));
        var = tok.var;
    }
    for (const auto& kn : kKindNames) {
        if (kn.name == head) {
            if (kn.kind == PropertyKind::PeriodicIn && !var)
                throw ConfigError("periodic-in needs a variable, e.g. periodic-in(x1)");
            return {kn.kind, var};
        }
    }
    throw ConfigError(fmt::format("unknown property '{}'", text));
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

nlohmann::ordered_json to_json(const Witness& w)
{
    nlohmann::ordered_json j;
    j["points"] = w.points;
    j["values"] = w.values;
    j["relation"] = w.relation;
    j["excess"] = w.excess;
    return j;
}

// ---------------------------------------------------------------------------
// structural periodicity

namespace {

struct Affine {
    bool ok = false;
    double slope = 0.0;
};

bool constant_only(const ExprTree& t, std::size_t i) { return !t.has_variables(i); }

Affine affine_in(const ExprTree& t, std::size_t i, std::uint16_t var, std::span<const double> constants)
{
    if (!t.contains_variable(i, var)) return {true, 0.0};
    const Token& tok = t[i];
    if (tok.kind == TokenKind::Variable) return {true, 1.0};
    if (tok.kind == TokenKind::UnaryOp && tok.op == Op::Neg) {
        auto a = affine_in(t, t.child(i, 0), var, constants);
        return {a.ok, -a.slope};
    }
    if (tok.kind != TokenKind::BinaryOp) return {};
    std::size_t l = t.child(i, 0), r = t.child(i, 1);
    switch (tok.op) {
    case Op::Add:
    case Op::Sub: {
        auto a = affine_in(t, l, var, constants);
        auto b = affine_in(t, r, var, constants);
        if (!a.ok || !b.ok) return {};
        return {true, tok.op == Op::Add ? a.slope + b.slope : a.slope - b.slope};
    }
    case Op::Mul: {
        if (constant_only(t, l)) {
            double c = evaluate_constant_subtree(t, l, constants);
            auto b = affine_in(t, r, var, constants);
            if (!b.ok || !std::isfinite(c)) return {};
            return {true, c * b.slope};
        }
        if (constant_only(t, r)) {
            double c = evaluate_constant_subtree(t, r, constants);
            auto a = affine_in(t, l, var, constants);
            if (!a.ok || !std::isfinite(c)) return {};
            return {true, c * a.slope};
        }
        return {};
    }
    case Op::Div: {
        if (!constant_only(t, r)) return {};
        double c = evaluate_constant_subtree(t, r, constants);
        auto a = affine_in(t, l, var, constants);
        if (!a.ok || !std::isfinite(c) || std::fabs(c) < kDivisionGuard) return {};
        return {true, a.slope / c};
    }
    default: return {};
    }
}

bool periodic_occurrences(const ExprTree& t, std::size_t i, std::uint16_t var, std::span<const double> constants,
                          std::vector<double>& periods)
{
    if (!t.contains_variable(i, var)) return true;
    const Token& tok = t[i];
    if (tok.kind == TokenKind::Variable) return false;
    if (tok.kind == TokenKind::UnaryOp && is_trig(tok.op)) {
        auto a = affine_in(t, t.child(i, 0), var, constants);
        if (a.ok && std::isfinite(a.slope)) {
            if (a.slope != 0.0) periods.push_back((tok.op == Op::Tan ? M_PI : 2.0 * M_PI) / std::fabs(a.slope));
            return true;
        }
    }
    for (int k = 0; k < tok.arity(); ++k) {
        if (!periodic_occurrences(t, t.child(i, k), var, constants, periods)) return false;
    }
    return true;
}

// p/q with q <= max_den approximating x, via continued fractions.
std::optional<std::pair<long, long>> rational(double x, long max_den)
{
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a = std::floor(v);
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::fabs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= 1e-9 * std::fabs(x))
            return std::make_pair(p1, q1);
        double frac = v - a;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

} // namespace

std::optional<double> structural_period(const ExprTree& tree, std::span<const double> constants, std::uint16_t var)
{
    if (tree.empty() || !tree.contains_variable(0, var)) return std::nullopt;
    std::vector<double> periods;
    if (!periodic_occurrences(tree, 0, var, constants, periods) || periods.empty()) return std::nullopt;
    const double base = periods.front();
    long num_lcm = 1;
    long den_gcd = 0;
    for (double p : periods) {
        auto frac = rational(p / base, 1000);
        if (!frac) return std::nullopt;
        num_lcm = std::lcm(num_lcm, frac->first);
        den_gcd = std::gcd(den_gcd, frac->second);
        if (num_lcm > 1000000) return std::nullopt;
    }
    return base * static_cast<double>(num_lcm) / static_cast<double>(den_gcd);
}

// ---------------------------------------------------------------------------
// numerical checks

namespace {

struct Line {
    std::uint16_t var;
    Matrix points;
};

std::vector<std::uint16_t> scope_vars(const PropertyLabel& label, std::size_t dims)
{
    if (label.var) return {*label.var};
    std::vector<std::uint16_t> out(dims);
    std::iota(out.begin(), out.end(), std::uint16_t{0});
    return out;
}

std::vector<Line> build_lines(const SamplingSpec& domain, std::size_t dims, std::span<const std::uint16_t> vars,
                              const PropertyOptions& opt)
{
    std::vector<std::vector<double>> anchors;
    if (dims == 1) {
        anchors.push_back({0.0});
    } else {
        Rng rng(opt.anchor_seed);
        for (std::size_t a = 0; a < opt.anchors; ++a) {
            std::vector<double> p(dims);
            for (std::size_t c = 0; c < dims; ++c) {
                auto r = domain.range(c);
                p[c] = std::uniform_real_distribution<double>(r.low, r.high)(rng);
            }
            anchors.push_back(std::move(p));
        }
    }
    std::vector<Line> lines;
    for (const auto& anchor : anchors) {
        for (auto v : vars) {
            Line line{v, Matrix(opt.grid, dims)};
            auto r = domain.range(v);
            for (std::size_t k = 0; k < opt.grid; ++k) {
                for (std::size_t c = 0; c < dims; ++c) line.points(k, c) = anchor[c];
                line.points(k, v) = opt.grid == 1 ? r.low
                                                  : r.low + (r.high - r.low) * static_cast<double>(k) /
                                                                static_cast<double>(opt.grid - 1);
            }
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

double violation_excess(PropertyKind kind, std::span<const double> v, double bound)
{
    switch (kind) {
    case PropertyKind::MonotoneIncreasing: return (v[0] - v[1]) - bound;      // f(b) >= f(a)
    case PropertyKind::MonotoneDecreasing: return (v[1] - v[0]) - bound;      // f(b) <= f(a)
    case PropertyKind::Convex: return -(v[0] - 2.0 * v[1] + v[2]) - bound;    // f(m) <= (f(a)+f(b))/2
    case PropertyKind::Concave: return (v[0] - 2.0 * v[1] + v[2]) - bound;    // f(m) >= (f(a)+f(b))/2
    case PropertyKind::SymmetricOddOrigin: return std::fabs(v[0] + v[1]) - bound; // f(-x) = -f(x)
    case PropertyKind::SymmetricEven:
    case PropertyKind::PeriodicIn: return std::fabs(v[0] - v[1]) - bound;     // f(x') = f(x)
    case PropertyKind::Bounded: return -1.0;
    }
    return -1.0;
}

std::string_view relation_text(PropertyKind kind)
{
    switch (kind) {
    case PropertyKind::MonotoneIncreasing: return "f(p1) >= f(p0) for p0 < p1";
    case PropertyKind::MonotoneDecreasing: return "f(p1) <= f(p0) for p0 < p1";
    case PropertyKind::Convex: return "f(p1) <= (f(p0) + f(p2)) / 2";
    case PropertyKind::Concave: return "f(p1) >= (f(p0) + f(p2)) / 2";
    case PropertyKind::SymmetricOddOrigin: return "f(p1) = -f(p0) with p1 = -p0";
    case PropertyKind::SymmetricEven: return "f(p1) = f(p0) with p1 = -p0";
    case PropertyKind::PeriodicIn: return "f(p1) = f(p0) with p1 = p0 + period";
    case PropertyKind::Bounded: return "";
    }
    return "";
}

class Checker {
public:
    Checker(const ExprTree& tree, std::span<const double> constants, PropertyReport& report)
        : tree_(tree), constants_(constants), report_(report) {}

    EvalResult eval(const Matrix& X) const { return evaluate(tree_, X, constants_); }

    void consider(std::vector<std::vector<double>> points, std::vector<double> values, double bound)
    {
        double excess = violation_excess(report_.label.kind, values, bound);
        if (excess <= 0.0) return;
        if (!worst_ || excess > worst_->excess) {
            worst_ = Witness{std::move(points), std::move(values), std::string(relation_text(report_.label.kind)), excess};
        }
    }

    std::optional<Witness>& worst() { return worst_; }

private:
    const ExprTree& tree_;
    std::span<const double> constants_;
    PropertyReport& report_;
    std::optional<Witness> worst_;
};

double sampled_scale(const std::vector<EvalResult>& results)
{
    double scale = 1.0;
    for (const auto& r : results) {
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            if (!r.faulted[k]) scale = std::max(scale, std::fabs(r.values[k]));
        }
    }
    return scale;
}

bool symmetric_about_zero(Range r) { return std::fabs(r.low + r.high) <= 1e-12 * std::max(1.0, std::fabs(r.high)); }

} // namespace

PropertyReport check_property(const ExprTree& tree, std::span<const double> constants, const PropertyLabel& label,
                              const SamplingSpec& domain, std::size_t dims, const PropertyOptions& opt)
{
    if (dims == 0) dims = std::max<std::size_t>({tree.variable_span(), domain.ranges.size(), 1});
    if (label.var && *label.var >= dims)
        throw ConfigError(fmt::format("property scope x{} exceeds {} variables", *label.var + 1, dims));
    if (opt.grid < 3) throw ConfigError("property grid needs at least 3 points");

    PropertyReport report;
    report.label = label;
    report.tolerance = opt.tolerance;

    const auto vars = scope_vars(label, dims);
    const bool symmetry = label.kind == PropertyKind::SymmetricEven || label.kind == PropertyKind::SymmetricOddOrigin;
    if (symmetry) {
        for (auto v : vars) {
            if (!symmetric_about_zero(domain.range(v)))
                throw UnsupportedDomain(fmt::format("{} needs a domain symmetric about 0 in x{}, got [{}, {}]",
                                                    label.to_string(), v + 1, domain.range(v).low, domain.range(v).high));
        }
    }

    std::optional<double> period;
    if (label.kind == PropertyKind::PeriodicIn) {
        if (!tree.contains_variable(0, *label.var)) {
            report.evidence = "variable-absent";
            return report;
        }
        period = structural_period(tree, constants, *label.var);
        if (!period) {
            report.evidence = "no-structural-certificate";
            return report;
        }
        report.period = period;
    }

    auto lines = build_lines(domain, dims, vars, opt);
    std::vector<EvalResult> results;
    results.reserve(lines.size());
    for (const auto& line : lines) results.push_back(evaluate(tree, line.points, constants));
    report.scale = sampled_scale(results);
    const double bound = opt.tolerance * report.scale;

    Checker checker(tree, constants, report);
    bool any_fault = false;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& line = lines[li];
        const auto& res = results[li];
        const std::size_t n = res.values.size();
        if (!res.ok()) any_fault = true;
        auto valid = [&](std::size_t k) { return !res.faulted[k]; };
        switch (label.kind) {
        case PropertyKind::MonotoneIncreasing:
        case PropertyKind::MonotoneDecreasing:
            for (std::size_t s = 1; s < n; s *= 2) {
                for (std::size_t k = 0; k + s < n; ++k) {
                    if (valid(k) && valid(k + s))
                        checker.consider({line.points.row(k), line.points.row(k + s)}, {res.values[k], res.values[k + s]}, bound);
                }
            }
            break;
        case PropertyKind::Convex:
        case PropertyKind::Concave:
            for (std::size_t s = 1; 2 * s < n; s *= 2) {
                for (std::size_t k = s; k + s < n; ++k) {
                    if (valid(k - s) && valid(k) && valid(k + s))
                        checker.consider({line.points.row(k - s), line.points.row(k), line.points.row(k + s)},
                                         {res.values[k - s], res.values[k], res.values[k + s]}, bound);
                }
            }
            break;
        case PropertyKind::SymmetricEven:
        case PropertyKind::SymmetricOddOrigin:
        case PropertyKind::PeriodicIn: {
            Matrix moved = line.points;
            for (std::size_t k = 0; k < n; ++k) {
                if (label.kind == PropertyKind::PeriodicIn) moved(k, *label.var) += *period;
                else for (auto v : vars) moved(k, v) = -moved(k, v);
            }
            auto other = evaluate(tree, moved, constants);
            if (!other.ok()) any_fault = true;
            for (std::size_t k = 0; k < n; ++k) {
                if (valid(k) && !other.faulted[k])
                    checker.consider({line.points.row(k), moved.row(k)}, {res.values[k], other.values[k]}, bound);
            }
            break;
        }
        case PropertyKind::Bounded: break;
        }
    }

    if (auto& w = checker.worst()) {
        report.verdict = Verdict::Fails;
        report.evidence = "numerical-witness";
        report.witnesses.push_back(std::move(*w));
    } else if (any_fault) {
        report.verdict = Verdict::Inconclusive;
        report.evidence = "domain-restricted-grid";
    } else {
        report.verdict = Verdict::Holds;
        report.evidence = label.kind == PropertyKind::PeriodicIn
                              ? fmt::format("structural-period={}", *period)
                              : fmt::format("grid-{}x{}", lines.size(), opt.grid);
    }
    return report;
}

bool witness_confirms(const ExprTree& tree, std::span<const double> constants, const PropertyReport& report,
                      const Witness& witness)
{
    if (witness.points.empty()) return false;
    auto X = Matrix::from_rows(witness.points);
    auto r = evaluate(tree, X, constants);
    if (!r.ok()) return false;
    return violation_excess(report.label.kind, r.values, report.tolerance * report.scale) > 0.0;
}

double success_rate(std::span<const Candidate> candidates, const PropertyLabel& label, const SamplingSpec& domain,
                    std::size_t dims, const PropertyOptions& options)
{
    if (candidates.empty()) throw ConfigError("success_rate needs at least one candidate");
    std::size_t holds = 0;
    for (const auto& c : candidates) {
        if (check_property(c.tree, c.constants, label, domain, dims, options).holds()) ++holds;
    }
    return static_cast<double>(holds) / static_cast<double>(candidates.size());
}

} // namespace srforge
