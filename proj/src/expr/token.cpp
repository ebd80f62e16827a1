// SPDX-License-Identifier: Apache-2.0
#include "srforge/token.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "srforge/error.hpp"

namespace srforge {

namespace {

constexpr std::array<OpInfo, kOpCount> kOps{{
    {Op::Add, "+", 2},
    {Op::Sub, "-", 2},
    {Op::Mul, "*", 2},
    {Op::Div, "/", 2},
    {Op::Pow, "pow", 2},
    {Op::Sin, "sin", 1},
    {Op::Cos, "cos", 1},
    {Op::Tan, "tan", 1},
    {Op::Log, "log", 1},
    {Op::Sqrt, "sqrt", 1},
    {Op::Exp, "exp", 1},
    {Op::Tanh, "tanh", 1},
    {Op::Arcsin, "arcsin", 1},
    {Op::Arctan, "arctan", 1},
    {Op::Abs, "abs", 1},
    {Op::Neg, "neg", 1},
    {Op::Sinh, "sinh", 1},
    {Op::Cosh, "cosh", 1},
    {Op::Harmonic, "harmonic", 1},
}};

struct Alias {
    std::string_view name;
    Op op;
};

constexpr std::array<Alias, 12> kAliases{{
    {"×", Op::Mul}, {"mul", Op::Mul}, {"÷", Op::Div}, {"div", Op::Div},
    {"add", Op::Add}, {"sub", Op::Sub}, {"^", Op::Pow}, {"ln", Op::Log},
    {"√", Op::Sqrt}, {"asin", Op::Arcsin}, {"atan", Op::Arctan}, {"−", Op::Sub},
}};

} // namespace

std::span<const OpInfo> all_ops() { return kOps; }

const OpInfo& op_info(Op op) { return kOps.at(static_cast<std::size_t>(op)); }

std::optional<Op> op_from_name(std::string_view name)
{
    for (const auto& info : kOps) {
        if (info.name == name) return info.op;
    }
    for (const auto& alias : kAliases) {
        if (alias.name == name) return alias.op;
    }
    return std::nullopt;
}

bool is_trig(Op op) { return op == Op::Sin || op == Op::Cos || op == Op::Tan; }

Token Token::operation(Op op)
{
    return op_info(op).arity == 2 ? binary(op) : unary(op);
}

std::string format_number(double v)
{
    return fmt::format("{}", v);
}

std::string Token::name() const
{
    switch (kind) {
    case TokenKind::BinaryOp:
    case TokenKind::UnaryOp: return std::string(op_info(op).name);
    case TokenKind::Variable: return fmt::format("x{}", var + 1);
    case TokenKind::Constant: return "C";
    case TokenKind::Literal: return format_number(value);
    }
    return "?";
}

bool operator==(const Token& a, const Token& b) noexcept
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case TokenKind::BinaryOp:
    case TokenKind::UnaryOp: return a.op == b.op;
    case TokenKind::Variable: return a.var == b.var;
    case TokenKind::Constant: return true;
    case TokenKind::Literal: return std::memcmp(&a.value, &b.value, sizeof(double)) == 0;
    }
    return false;
}

OperatorRegistry OperatorRegistry::primitives()
{
    OperatorRegistry r;
    for (Op op : {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sin, Op::Cos, Op::Log, Op::Sqrt}) r.enable(op);
    return r;
}

OperatorRegistry OperatorRegistry::extended()
{
    OperatorRegistry r;
    for (const auto& info : kOps) r.enable(info.op);
    return r;
}

OperatorRegistry OperatorRegistry::from_names(std::span<const std::string> names)
{
    OperatorRegistry r;
    for (const auto& name : names) {
        auto op = op_from_name(name);
        if (!op) throw ConfigError(fmt::format("unknown operator '{}' in registry", name));
        r.enable(*op);
    }
    return r;
}

std::vector<Op> OperatorRegistry::ops() const
{
    std::vector<Op> out;
    for (const auto& info : kOps) {
        if (contains(info.op)) out.push_back(info.op);
    }
    return out;
}

std::vector<std::string> OperatorRegistry::names() const
{
    std::vector<std::string> out;
    for (Op op : ops()) out.emplace_back(op_info(op).name);
    return out;
}

Token token_from_name(std::string_view name, const OperatorRegistry& registry)
{
    if (name.empty()) throw ParseFailure("empty token");
    if (name == "C" || name == "c") return Token::constant();
    if (name == "x") return Token::variable(0);
    if (name.size() > 1 && name[0] == 'x') {
        unsigned index = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (ec == std::errc{} && ptr == name.data() + name.size() && index >= 1 && index <= 0xffff)
            return Token::variable(static_cast<std::uint16_t>(index - 1));
    }
    if (auto op = op_from_name(name)) {
        if (!registry.contains(*op))
            throw ParseFailure(fmt::format("operator '{}' is not in the active registry", name));
        return Token::operation(*op);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
    if (ec == std::errc{} && ptr == name.data() + name.size() && std::isfinite(v)) return Token::literal(v);
    if (name == "pi" || name == "π") return Token::literal(M_PI);
    throw ParseFailure(fmt::format("unknown token '{}'", name));
}

} // namespace srforge
