// SPDX-License-Identifier: Apache-2.0
#include "srforge/eval.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <fmt/format.h>

#include "srforge/error.hpp"

namespace srforge {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEulerGamma = 0.57721566490153286061;
} // namespace

double apply_unary(Op op, double a, bool& fault)
{
    double r = kNaN;
    switch (op) {
    case Op::Sin: r = std::sin(a); break;
    case Op::Cos: r = std::cos(a); break;
    case Op::Tan: r = std::tan(a); break;
    case Op::Log:
        if (a <= 0.0) { fault = true; return kNaN; }
        r = std::log(a);
        break;
    case Op::Sqrt:
        if (a < 0.0) { fault = true; return kNaN; }
        r = std::sqrt(a);
        break;
    case Op::Exp: r = std::exp(a); break;
    case Op::Tanh: r = std::tanh(a); break;
    case Op::Arcsin:
        if (a < -1.0 || a > 1.0) { fault = true; return kNaN; }
        r = std::asin(a);
        break;
    case Op::Arctan: r = std::atan(a); break;
    case Op::Abs: r = std::fabs(a); break;
    case Op::Neg: r = -a; break;
    case Op::Sinh: r = std::sinh(a); break;
    case Op::Cosh: r = std::cosh(a); break;
    case Op::Harmonic:
        // H(x) = digamma(x + 1) + gamma, the analytic continuation of sum_{k<=x} 1/k
        if (a <= -1.0 && std::nearbyint(a) == a) { fault = true; return kNaN; }
        r = boost::math::digamma(a + 1.0) + kEulerGamma;
        break;
    default: fault = true; return kNaN;
    }
    if (!std::isfinite(r)) { fault = true; return kNaN; }
    return r;
}

double apply_binary(Op op, double a, double b, bool& fault)
{
    double r = kNaN;
    switch (op) {
    case Op::Add: r = a + b; break;
    case Op::Sub: r = a - b; break;
    case Op::Mul: r = a * b; break;
    case Op::Div:
        if (std::fabs(b) < kDivisionGuard) { fault = true; return kNaN; }
        r = a / b;
        break;
    case Op::Pow:
        if (a < 0.0 && std::nearbyint(b) != b) { fault = true; return kNaN; }
        if (a == 0.0 && b < 0.0) { fault = true; return kNaN; }
        r = std::pow(a, b);
        break;
    default: fault = true; return kNaN;
    }
    if (!std::isfinite(r)) { fault = true; return kNaN; }
    return r;
}

EvalResult evaluate(const ExprTree& tree, const Matrix& X, std::span<const double> constants)
{
    const std::size_t n_const = tree.constant_count();
    if (constants.size() != n_const)
        throw ConstantCountMismatch(fmt::format("tree has {} placeholders but {} constants were given", n_const,
                                                constants.size()));
    const std::size_t n = X.rows();
    EvalResult result;
    result.faulted.assign(n, 0);
    if (tree.empty()) return result;

    std::vector<std::vector<double>> stack;
    stack.reserve(tree.size());
    std::vector<std::vector<double>> pool;
    auto take = [&] {
        if (pool.empty()) return std::vector<double>(n);
        auto v = std::move(pool.back());
        pool.pop_back();
        return v;
    };

    std::size_t slot = n_const;
    const auto& nodes = tree.preorder();
    for (std::size_t k = nodes.size(); k-- > 0;) {
        const Token& t = nodes[k];
        switch (t.kind) {
        case TokenKind::Variable: {
            auto v = take();
            if (t.var >= X.cols())
                throw ConfigError(fmt::format("variable x{} is outside the {}-column input", t.var + 1, X.cols()));
            auto col = X.col(t.var);
            std::copy(col.begin(), col.end(), v.begin());
            stack.push_back(std::move(v));
            break;
        }
        case TokenKind::Constant:
        case TokenKind::Literal: {
            double c = t.kind == TokenKind::Literal ? t.value : constants[--slot];
            auto v = take();
            std::fill(v.begin(), v.end(), c);
            stack.push_back(std::move(v));
            break;
        }
        case TokenKind::UnaryOp: {
            auto& a = stack.back();
            for (std::size_t r = 0; r < n; ++r) {
                bool fault = false;
                a[r] = apply_unary(t.op, a[r], fault);
                if (fault) result.faulted[r] = 1;
            }
            break;
        }
        case TokenKind::BinaryOp: {
            auto lhs = std::move(stack.back()); // first child sits on top
            stack.pop_back();
            auto& rhs = stack.back();
            for (std::size_t r = 0; r < n; ++r) {
                bool fault = false;
                rhs[r] = apply_binary(t.op, lhs[r], rhs[r], fault);
                if (fault) result.faulted[r] = 1;
            }
            pool.push_back(std::move(lhs));
            break;
        }
        }
    }
    result.values = std::move(stack.back());
    for (std::size_t r = 0; r < n; ++r) {
        if (result.faulted[r]) {
            result.values[r] = kNaN;
            ++result.fault_count;
        }
    }
    return result;
}

double evaluate_constant_subtree(const ExprTree& tree, std::size_t node, std::span<const double> constants)
{
    auto sub = tree.subtree(node);
    std::size_t offset = tree.constant_offset(node);
    std::size_t count = sub.constant_count();
    if (offset + count > constants.size()) throw ConstantCountMismatch("not enough constants for subtree");
    Matrix one(1, sub.variable_span());
    auto r = evaluate(sub, one, constants.subspan(offset, count));
    return r.ok() ? r.values[0] : kNaN;
}

} // namespace srforge
