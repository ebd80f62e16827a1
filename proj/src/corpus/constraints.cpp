// SPDX-License-Identifier: Apache-2.0
#include "srforge/constraints.hpp"

#include <cmath>

namespace srforge {

SignContext SignContext::from_spec(const SamplingSpec& spec, std::size_t dims)
{
    SignContext ctx;
    for (std::size_t v = 0; v < dims; ++v) ctx.variable_lows.push_back(spec.range(v).low);
    return ctx;
}

bool SignContext::variable_nonnegative(std::uint16_t var) const
{
    return var < variable_lows.size() && variable_lows[var] >= 0.0;
}

bool SignContext::variable_positive(std::uint16_t var) const
{
    return var < variable_lows.size() && variable_lows[var] > 0.0;
}

namespace {

bool nonneg(Sign s) { return s != Sign::Unknown; }

bool same_subtree(const ExprTree& t, std::size_t a, std::size_t b)
{
    if (t.subtree_size(a) != t.subtree_size(b)) return false;
    for (std::size_t k = 0; k < t.subtree_size(a); ++k) {
        if (!(t[a + k] == t[b + k])) return false;
    }
    return true;
}

} // namespace

Sign structural_sign(const ExprTree& tree, std::size_t node, const SignContext& ctx)
{
    const Token& t = tree[node];
    switch (t.kind) {
    case TokenKind::Literal:
        if (t.value > 0.0) return Sign::Positive;
        return t.value == 0.0 ? Sign::Nonnegative : Sign::Unknown;
    case TokenKind::Constant: return Sign::Unknown;
    case TokenKind::Variable:
        if (ctx.variable_positive(t.var)) return Sign::Positive;
        return ctx.variable_nonnegative(t.var) ? Sign::Nonnegative : Sign::Unknown;
    case TokenKind::UnaryOp: {
        Sign arg = structural_sign(tree, tree.child(node, 0), ctx);
        switch (t.op) {
        case Op::Exp:
        case Op::Cosh: return Sign::Positive;
        case Op::Abs: return arg == Sign::Positive ? Sign::Positive : Sign::Nonnegative;
        case Op::Sqrt: return arg == Sign::Positive ? Sign::Positive : Sign::Nonnegative;
        case Op::Tanh:
        case Op::Sinh:
        case Op::Arctan:
        case Op::Arcsin: return arg;
        default: return Sign::Unknown;
        }
    }
    case TokenKind::BinaryOp: {
        std::size_t l = tree.child(node, 0);
        std::size_t r = tree.child(node, 1);
        Sign a = structural_sign(tree, l, ctx);
        Sign b = structural_sign(tree, r, ctx);
        switch (t.op) {
        case Op::Add:
            if (nonneg(a) && nonneg(b))
                return (a == Sign::Positive || b == Sign::Positive) ? Sign::Positive : Sign::Nonnegative;
            return Sign::Unknown;
        case Op::Mul:
            if (same_subtree(tree, l, r)) return a == Sign::Positive ? Sign::Positive : Sign::Nonnegative;
            [[fallthrough]];
        case Op::Div:
            if (nonneg(a) && nonneg(b))
                return (a == Sign::Positive && b == Sign::Positive) ? Sign::Positive : Sign::Nonnegative;
            return Sign::Unknown;
        case Op::Pow: {
            if (nonneg(a)) return a;
            const Token& e = tree[r];
            if (e.kind == TokenKind::Literal && std::fmod(e.value, 2.0) == 0.0) return Sign::Nonnegative;
            return Sign::Unknown;
        }
        default: return Sign::Unknown;
        }
    }
    }
    return Sign::Unknown;
}

ConstraintReport check_constraints(const ExprTree& tree, const SignContext& ctx)
{
    ConstraintReport report;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const Token& t = tree[i];
        if (t.kind != TokenKind::UnaryOp) continue;
        if (is_trig(t.op)) {
            for (std::size_t k = i + 1; k < i + tree.subtree_size(i); ++k) {
                if (tree[k].kind == TokenKind::UnaryOp && is_trig(tree[k].op)) {
                    report.violations.push_back({ConstraintRule::NestedTrig, tree.path_to(i), tree.subtree(i).to_string()});
                    break;
                }
            }
        }
        if (t.op == Op::Log || t.op == Op::Sqrt) {
            if (structural_sign(tree, tree.child(i, 0), ctx) == Sign::Unknown)
                report.violations.push_back(
                    {ConstraintRule::NegativeArgument, tree.path_to(i), tree.subtree(i).to_string()});
        }
    }
    return report;
}

std::string to_string(ConstraintRule rule)
{
    switch (rule) {
    case ConstraintRule::NestedTrig: return "nested-trig";
    case ConstraintRule::NegativeArgument: return "possibly-negative-argument";
    }
    return "?";
}

} // namespace srforge
