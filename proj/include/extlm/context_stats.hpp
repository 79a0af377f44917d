#pragma once

// Suffix trie of context statistics.
//
// Contexts are stored reversed: the path root -> node spells the context
// from its most recent symbol backward, so a node's parent is the
// context's maximal proper suffix.  c(sigma|w) counts positions i with
// seq[i-|w| .. i-1] = w and seq[i] = sigma; a position contributes only
// when the full context fits (i >= |w|), so c(w) = sum_sigma c(sigma|w)
// holds exactly at every node.

#include <cstdint>
#include <span>
#include <vector>

#include "extlm/alphabet.hpp"

namespace extlm {

class ContextStats {
public:
    static constexpr std::uint32_t kNoNode = 0xffffffffu;

    struct Node {
        std::uint64_t count = 0;  // c(w)
        std::uint32_t parent = kNoNode;
        Sym via = 0;              // symbol extending the parent context on the left
        std::uint16_t depth = 0;  // |w|
        std::vector<std::pair<Sym, std::uint64_t>> successors;  // c(sigma|w), sorted
        std::vector<std::pair<Sym, std::uint32_t>> children;    // older symbol -> node, sorted
    };

    // Counts every context of length <= depth_bound.
    static ContextStats count(const SymbolSequence& seq, std::size_t depth_bound);

    // Level-synchronous variant that only descends below nodes with
    // c(w) > min_count.  Since c is monotone along the suffix chain,
    // retained nodes carry exactly the same counts as the full trie;
    // used by model selection where candidates need c(w) > c_min anyway.
    static ContextStats count_pruned(const SymbolSequence& seq, std::size_t depth_bound,
                                     std::uint64_t min_count);

    std::uint32_t root() const { return 0; }
    const Node& node(std::uint32_t idx) const { return nodes_[idx]; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t depth_bound() const { return depth_bound_; }
    std::uint64_t total_positions() const { return nodes_[0].count; }

    // Walks the reversed context; kNoNode when absent.
    std::uint32_t find(std::span<const Sym> context) const;
    std::uint32_t child(std::uint32_t idx, Sym older) const;
    std::uint64_t successor_count(std::uint32_t idx, Sym s) const;
    std::uint64_t distinct_successors(std::uint32_t idx) const {
        return nodes_[idx].successors.size();
    }

    // Reconstructs the context in natural (oldest-first) order.
    std::vector<Sym> context_of(std::uint32_t idx) const;

    std::vector<std::uint32_t> nodes_at_depth(std::size_t d) const;

private:
    std::vector<Node> nodes_;
    std::size_t depth_bound_ = 0;

    std::uint32_t find_or_add_child(std::uint32_t idx, Sym older);
    void bump_successor(std::uint32_t idx, Sym s);
};

}  // namespace extlm
