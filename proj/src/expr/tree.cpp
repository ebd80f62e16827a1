// SPDX-License-Identifier: Apache-2.0
#include "srforge/tree.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "srforge/error.hpp"

namespace srforge {

std::vector<int> arity_trace(std::span<const Token> seq)
{
    std::vector<int> trace;
    trace.reserve(seq.size());
    int count = 1;
    for (const auto& t : seq) {
        count = count - 1 + t.arity();
        trace.push_back(count);
    }
    return trace;
}

bool is_complete_preorder(std::span<const Token> seq)
{
    if (seq.empty()) return false;
    int count = 1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        count = count - 1 + seq[i].arity();
        if (count == 0) return i + 1 == seq.size();
    }
    return false;
}

ExprTree::ExprTree(std::vector<Token> nodes) : nodes_(std::move(nodes)) { index(); }

ExprTree ExprTree::from_preorder(std::span<const Token> seq)
{
    if (seq.empty()) throw MalformedSequence("empty sequence");
    int count = 1;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        count = count - 1 + seq[i].arity();
        if (count == 0 && i + 1 != seq.size())
            throw MalformedSequence(fmt::format("{} trailing token(s) after a complete expression", seq.size() - i - 1));
    }
    if (count != 0) throw MalformedSequence(fmt::format("{} operand(s) missing at end of sequence", count));
    return ExprTree(std::vector<Token>(seq.begin(), seq.end()));
}

ExprTree ExprTree::leaf(Token t)
{
    if (!t.is_terminal()) throw MalformedSequence("leaf must be a terminal");
    return ExprTree(std::vector<Token>{t});
}

void ExprTree::index()
{
    sizes_.assign(nodes_.size(), 1);
    // reverse preorder: children are complete before their parent
    std::vector<std::uint32_t> stack;
    for (std::size_t k = nodes_.size(); k-- > 0;) {
        std::uint32_t size = 1;
        for (int a = 0; a < nodes_[k].arity(); ++a) {
            size += stack.back();
            stack.pop_back();
        }
        sizes_[k] = size;
        stack.push_back(size);
    }
}

std::size_t ExprTree::child(std::size_t i, int k) const
{
    std::size_t c = i + 1;
    if (k == 1) c += sizes_[c];
    return c;
}

std::size_t ExprTree::parent(std::size_t i) const
{
    for (std::size_t p = i; p-- > 0;) {
        if (p + sizes_[p] > i) return p;
    }
    return npos;
}

std::vector<int> ExprTree::path_to(std::size_t i) const
{
    std::vector<int> path;
    std::size_t at = 0;
    while (at != i) {
        std::size_t c0 = at + 1;
        if (i < c0 + sizes_[c0]) {
            path.push_back(0);
            at = c0;
        } else {
            path.push_back(1);
            at = c0 + sizes_[c0];
        }
    }
    return path;
}

ExprTree ExprTree::subtree(std::size_t i) const
{
    return ExprTree(std::vector<Token>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                       nodes_.begin() + static_cast<std::ptrdiff_t>(i + sizes_[i])));
}

ExprTree ExprTree::with_subtree(std::size_t i, const ExprTree& replacement) const
{
    std::vector<Token> out;
    out.reserve(nodes_.size() - sizes_[i] + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    out.insert(out.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(i + sizes_[i]), nodes_.end());
    return ExprTree(std::move(out));
}

ExprTree ExprTree::with_token(std::size_t i, Token t) const
{
    if (t.arity() != nodes_[i].arity()) throw MalformedSequence("replacement token arity differs");
    auto out = nodes_;
    out[i] = t;
    return ExprTree(std::move(out));
}

std::size_t ExprTree::constant_count() const
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Token& t) { return t.kind == TokenKind::Constant; }));
}

std::size_t ExprTree::constant_offset(std::size_t i) const
{
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                                  [](const Token& t) { return t.kind == TokenKind::Constant; }));
}

std::size_t ExprTree::variable_span() const
{
    std::size_t span = 0;
    for (const auto& t : nodes_) {
        if (t.kind == TokenKind::Variable) span = std::max<std::size_t>(span, t.var + 1u);
    }
    return span;
}

bool ExprTree::contains_variable(std::size_t i, std::uint16_t var) const
{
    for (std::size_t k = i; k < i + sizes_[i]; ++k) {
        if (nodes_[k].kind == TokenKind::Variable && nodes_[k].var == var) return true;
    }
    return false;
}

bool ExprTree::has_variables(std::size_t i) const
{
    for (std::size_t k = i; k < i + sizes_[i]; ++k) {
        if (nodes_[k].kind == TokenKind::Variable) return true;
    }
    return false;
}

std::string ExprTree::to_string() const
{
    std::string out = "[";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i) out += ", ";
        out += nodes_[i].name();
    }
    out += "]";
    return out;
}

std::string ExprTree::key() const
{
    std::string out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i) out += ' ';
        out += nodes_[i].name();
    }
    return out;
}

namespace {

std::string infix(const ExprTree& t, std::size_t i, std::span<const double> constants, std::size_t& slot)
{
    const Token& tok = t[i];
    switch (tok.kind) {
    case TokenKind::Variable:
    case TokenKind::Literal: return tok.name();
    case TokenKind::Constant: {
        std::size_t k = slot++;
        return k < constants.size() ? format_number(constants[k]) : "C";
    }
    case TokenKind::UnaryOp: {
        auto arg = infix(t, t.child(i, 0), constants, slot);
        if (tok.op == Op::Neg) return fmt::format("(-{})", arg);
        return fmt::format("{}({})", op_info(tok.op).name, arg);
    }
    case TokenKind::BinaryOp: {
        auto lhs = infix(t, t.child(i, 0), constants, slot);
        auto rhs = infix(t, t.child(i, 1), constants, slot);
        if (tok.op == Op::Pow) return fmt::format("pow({}, {})", lhs, rhs);
        return fmt::format("({} {} {})", lhs, op_info(tok.op).name, rhs);
    }
    }
    return "?";
}

} // namespace

std::string ExprTree::to_infix() const { return to_infix({}); }

std::string ExprTree::to_infix(std::span<const double> constants) const
{
    if (nodes_.empty()) return {};
    std::size_t slot = 0;
    return infix(*this, 0, constants, slot);
}

std::vector<Token> to_preorder(const ExprTree& tree) { return tree.preorder(); }

ExprTree from_preorder(std::span<const Token> seq) { return ExprTree::from_preorder(seq); }

ExprTree skeletonize(const ExprTree& tree, std::vector<double>* extracted)
{
    std::vector<Token> out = tree.preorder();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].kind != TokenKind::Literal) continue;
        std::size_t p = tree.parent(i);
        bool integer_exponent = p != ExprTree::npos && tree[p].kind == TokenKind::BinaryOp && tree[p].op == Op::Pow &&
                                tree.child(p, 1) == i && std::nearbyint(out[i].value) == out[i].value;
        if (integer_exponent) continue;
        if (extracted) extracted->push_back(out[i].value);
        out[i] = Token::constant();
    }
    return ExprTree::from_preorder(out);
}

} // namespace srforge
