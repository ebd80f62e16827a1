// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srforge/token.hpp"

namespace srforge {

// Expression tree stored as its preorder traversal. A subtree is always a
// contiguous range [i, i + subtree_size(i)), so splicing is a range replace.
class ExprTree {
public:
    ExprTree() = default;

    // Throws MalformedSequence unless the arity count reaches zero exactly at
    // the final token.
    static ExprTree from_preorder(std::span<const Token> seq);
    static ExprTree leaf(Token t);

    const std::vector<Token>& preorder() const noexcept { return nodes_; }
    const Token& operator[](std::size_t i) const { return nodes_[i]; }
    const Token& root() const { return nodes_.front(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::size_t subtree_size(std::size_t i) const { return sizes_[i]; }
    // Index of the k-th child (0 or 1) of node i.
    std::size_t child(std::size_t i, int k) const;
    // Parent index, or npos for the root.
    std::size_t parent(std::size_t i) const;
    // Child-index path from the root to node i.
    std::vector<int> path_to(std::size_t i) const;

    ExprTree subtree(std::size_t i) const;
    ExprTree with_subtree(std::size_t i, const ExprTree& replacement) const;
    ExprTree with_token(std::size_t i, Token t) const;

    std::size_t constant_count() const;
    // Number of placeholders strictly before node i in preorder.
    std::size_t constant_offset(std::size_t i) const;
    // 1 + largest variable index used; 0 when no variables occur.
    std::size_t variable_span() const;
    bool contains_variable(std::size_t i, std::uint16_t var) const;
    bool has_variables(std::size_t i) const;

    // "[+, sin, x1, cos, x1]"
    std::string to_string() const;
    std::string to_infix() const;
    std::string to_infix(std::span<const double> constants) const;
    // Space-joined token names; used as a structure key.
    std::string key() const;

    friend bool operator==(const ExprTree& a, const ExprTree& b) { return a.nodes_ == b.nodes_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    explicit ExprTree(std::vector<Token> nodes);
    void index();

    std::vector<Token> nodes_;
    std::vector<std::uint32_t> sizes_;
};

std::vector<Token> to_preorder(const ExprTree& tree);
ExprTree from_preorder(std::span<const Token> seq);
inline std::size_t node_count(const ExprTree& tree) { return tree.size(); }

// Running count trace (count <- count - 1 + arity) starting at 1; element k is
// the count after consuming token k.
std::vector<int> arity_trace(std::span<const Token> seq);
bool is_complete_preorder(std::span<const Token> seq);

// Replace every literal by C, except integer exponents of pow which are
// structural.
ExprTree skeletonize(const ExprTree& tree, std::vector<double>* extracted = nullptr);

} // namespace srforge
