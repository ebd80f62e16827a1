// SPDX-License-Identifier: Apache-2.0
#include "srforge/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "srforge/error.hpp"

namespace srforge {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Recursive-descent parser emitting preorder directly.
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary (('^'|'**') unary)?
//   primary := number | name | name '(' expr (',' expr)? ')' | '(' expr ')'
class InfixParser {
public:
    InfixParser(std::string_view text, const ParseOptions& options) : text_(text), options_(options) {}

    std::vector<Token> parse()
    {
        auto out = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseFailure(fmt::format("{} at offset {} in '{}'", what, pos_, text_));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view s)
    {
        skip_space();
        if (text_.substr(pos_, s.size()) == s) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(std::string_view(&c, 1))) fail(fmt::format("expected '{}'", c));
    }

    Token op(Op o) const
    {
        if (!options_.registry.contains(o))
            throw ParseFailure(fmt::format("operator '{}' is not in the active registry", op_info(o).name));
        return Token::operation(o);
    }

    static std::vector<Token> combine(Token head, std::vector<Token> lhs, const std::vector<Token>& rhs)
    {
        lhs.insert(lhs.begin(), head);
        lhs.insert(lhs.end(), rhs.begin(), rhs.end());
        return lhs;
    }

    std::vector<Token> expr()
    {
        auto lhs = term();
        for (;;) {
            if (accept("+")) lhs = combine(op(Op::Add), std::move(lhs), term());
            else if (peek_minus()) {
                ++pos_;
                lhs = combine(op(Op::Sub), std::move(lhs), term());
            } else return lhs;
        }
    }

    bool peek_minus()
    {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == '-';
    }

    std::vector<Token> term()
    {
        auto lhs = unary();
        for (;;) {
            skip_space();
            if (text_.substr(pos_, 2) == "**") return lhs;
            if (accept("*")) lhs = combine(op(Op::Mul), std::move(lhs), unary());
            else if (accept("/")) lhs = combine(op(Op::Div), std::move(lhs), unary());
            else return lhs;
        }
    }

    std::vector<Token> unary()
    {
        if (accept("+")) return unary();
        if (peek_minus()) {
            ++pos_;
            auto arg = unary();
            if (arg.size() == 1 && arg[0].kind == TokenKind::Literal) {
                arg[0].value = -arg[0].value;
                return arg;
            }
            arg.insert(arg.begin(), op(Op::Neg));
            return arg;
        }
        return power();
    }

    std::vector<Token> power()
    {
        auto base = primary();
        if (accept("^") || accept("**")) return combine(op(Op::Pow), std::move(base), unary());
        return base;
    }

    std::vector<Token> primary()
    {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return {number()};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == '(') return call(name);
            return {name_token(name)};
        }
        fail(fmt::format("unexpected character '{}'", c));
    }

    Token number()
    {
        const char* begin = text_.data() + pos_;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), v);
        if (ec != std::errc{}) fail("bad number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return Token::literal(v);
    }

    Token name_token(const std::string& name) const
    {
        const auto& names = options_.variable_names;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return Token::variable(static_cast<std::uint16_t>(i));
        }
        if (name == "pi") return Token::literal(M_PI);
        if (name == "C") return Token::constant();
        if (names.empty() || name[0] == 'x') {
            auto t = token_from_name(name, options_.registry);
            if (t.kind == TokenKind::Variable || t.kind == TokenKind::Constant) return t;
        }
        throw ParseFailure(fmt::format("unknown identifier '{}' in '{}'", name, text_));
    }

    std::vector<Token> call(const std::string& name)
    {
        expect('(');
        auto first = expr();
        if (name == "pow") {
            expect(',');
            auto second = expr();
            expect(')');
            return combine(op(Op::Pow), std::move(first), second);
        }
        expect(')');
        auto o = op_from_name(name);
        if (!o || op_info(*o).arity != 1) fail(fmt::format("unknown function '{}'", name));
        first.insert(first.begin(), op(*o));
        return first;
    }

    std::string_view text_;
    const ParseOptions& options_;
    std::size_t pos_ = 0;
};

} // namespace

ExprTree parse_infix(std::string_view text, const ParseOptions& options)
{
    InfixParser parser(text, options);
    try {
        return ExprTree::from_preorder(parser.parse());
    } catch (const MalformedSequence& e) {
        throw ParseFailure(e.what());
    }
}

ExprTree parse_bracketed(std::string_view text, const OperatorRegistry& registry)
{
    auto body = trim(text);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ParseFailure(fmt::format("expected bracketed preorder, got '{}'", text));
    body = body.substr(1, body.size() - 2);
    std::vector<Token> seq;
    while (true) {
        auto comma = body.find(',');
        auto item = trim(body.substr(0, comma));
        // accept "[+, sin, x, x; R = 0.6]" style annotations
        if (auto semi = item.find(';'); semi != std::string_view::npos) {
            item = trim(item.substr(0, semi));
            comma = std::string_view::npos;
        }
        seq.push_back(token_from_name(item, registry));
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
    }
    return ExprTree::from_preorder(seq);
}

ExprTree parse_token_names(std::span<const std::string> names, const OperatorRegistry& registry)
{
    std::vector<Token> seq;
    seq.reserve(names.size());
    for (const auto& n : names) seq.push_back(token_from_name(n, registry));
    return ExprTree::from_preorder(seq);
}

ExprTree parse_expression(std::string_view text, const ParseOptions& options)
{
    auto body = trim(text);
    if (!body.empty() && body.front() == '[') return parse_bracketed(body, options.registry);
    return parse_infix(body, options);
}

std::vector<ExprTree> find_bracketed(std::string_view text, const OperatorRegistry& registry)
{
    std::vector<ExprTree> out;
    std::size_t at = 0;
    while ((at = text.find('[', at)) != std::string_view::npos) {
        auto close = text.find(']', at);
        if (close == std::string_view::npos) break;
        try {
            out.push_back(parse_bracketed(text.substr(at, close - at + 1), registry));
        } catch (const Error&) {
        }
        at = close + 1;
    }
    return out;
}

} // namespace srforge
