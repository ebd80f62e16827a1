// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srforge {

enum class TokenKind : std::uint8_t { BinaryOp, UnaryOp, Variable, Constant, Literal };

// Every operator the evaluator knows. Which of them a run may use is decided
// by an OperatorRegistry.
enum class Op : std::uint8_t {
    Add, Sub, Mul, Div, Pow,
    Sin, Cos, Tan, Log, Sqrt, Exp, Tanh, Arcsin, Arctan, Abs, Neg, Sinh, Cosh, Harmonic,
    None
};

inline constexpr std::size_t kOpCount = static_cast<std::size_t>(Op::None);

struct OpInfo {
    Op op;
    std::string_view name;
    int arity;
};

std::span<const OpInfo> all_ops();
const OpInfo& op_info(Op op);
std::optional<Op> op_from_name(std::string_view name);

bool is_trig(Op op);

struct Token {
    TokenKind kind = TokenKind::Constant;
    Op op = Op::None;
    std::uint16_t var = 0; // zero-based, displayed as x{var+1}
    double value = 0.0;    // literals only

    static Token binary(Op op) { return {TokenKind::BinaryOp, op, 0, 0.0}; }
    static Token unary(Op op) { return {TokenKind::UnaryOp, op, 0, 0.0}; }
    static Token operation(Op op);
    static Token variable(std::uint16_t index) { return {TokenKind::Variable, Op::None, index, 0.0}; }
    static Token constant() { return {TokenKind::Constant, Op::None, 0, 0.0}; }
    static Token literal(double v) { return {TokenKind::Literal, Op::None, 0, v}; }

    int arity() const noexcept
    {
        switch (kind) {
        case TokenKind::BinaryOp: return 2;
        case TokenKind::UnaryOp: return 1;
        default: return 0;
        }
    }
    bool is_terminal() const noexcept { return arity() == 0; }
    std::string name() const;

    friend bool operator==(const Token& a, const Token& b) noexcept;
};

std::string format_number(double v);

// The set of operators a run is allowed to parse, generate and search over.
class OperatorRegistry {
public:
    OperatorRegistry() = default;

    // The primitive set {+, -, *, /, sin, cos, log, sqrt}.
    static OperatorRegistry primitives();
    // Every operator the evaluator implements.
    static OperatorRegistry extended();
    // Throws ConfigError on an unknown name.
    static OperatorRegistry from_names(std::span<const std::string> names);

    void enable(Op op) { enabled_.set(static_cast<std::size_t>(op)); }
    bool contains(Op op) const { return op != Op::None && enabled_.test(static_cast<std::size_t>(op)); }
    std::vector<Op> ops() const;
    std::vector<std::string> names() const;

private:
    std::bitset<kOpCount> enabled_;
};

// Resolve a display name ("sin", "x3", "C", "2.5", "x") to a token. Throws
// ParseFailure if the name is not a variable, constant, number or enabled op.
Token token_from_name(std::string_view name, const OperatorRegistry& registry);

} // namespace srforge
