#include "extlm/context_stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace extlm {

namespace {

template <class V, class K>
auto lower_bound_first(V& vec, K key) {
    return std::lower_bound(vec.begin(), vec.end(), key,
                            [](const auto& p, K k) { return p.first < k; });
}

}  // namespace

std::uint32_t ContextStats::find_or_add_child(std::uint32_t idx, Sym older) {
    auto& ch = nodes_[idx].children;
    auto it = lower_bound_first(ch, older);
    if (it != ch.end() && it->first == older) return it->second;
    std::uint32_t fresh = static_cast<std::uint32_t>(nodes_.size());
    std::size_t pos = static_cast<std::size_t>(it - ch.begin());
    Node n;
    n.parent = idx;
    n.via = older;
    n.depth = static_cast<std::uint16_t>(nodes_[idx].depth + 1);
    nodes_.push_back(std::move(n));
    nodes_[idx].children.insert(nodes_[idx].children.begin() + pos, {older, fresh});
    return fresh;
}

void ContextStats::bump_successor(std::uint32_t idx, Sym s) {
    auto& suc = nodes_[idx].successors;
    auto it = lower_bound_first(suc, s);
    if (it != suc.end() && it->first == s) {
        ++it->second;
    } else {
        suc.insert(it, {s, 1});
    }
    ++nodes_[idx].count;
}

ContextStats ContextStats::count(const SymbolSequence& seq, std::size_t depth_bound) {
    ContextStats st;
    st.depth_bound_ = depth_bound;
    st.nodes_.emplace_back();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        std::uint32_t node = 0;
        st.bump_successor(node, seq[i]);
        std::size_t max_len = std::min(depth_bound, i);
        for (std::size_t len = 1; len <= max_len; ++len) {
            node = st.find_or_add_child(node, seq[i - len]);
            st.bump_successor(node, seq[i]);
        }
    }
    return st;
}

ContextStats ContextStats::count_pruned(const SymbolSequence& seq, std::size_t depth_bound,
                                        std::uint64_t min_count) {
    ContextStats st;
    st.depth_bound_ = depth_bound;
    st.nodes_.emplace_back();
    for (std::size_t i = 0; i < seq.size(); ++i) st.bump_successor(0, seq[i]);

    // cur[i] = node for the context of length d ending right before i,
    // kNoNode once the chain fell below the count threshold.
    std::vector<std::uint32_t> cur(seq.size(), 0), nxt(seq.size(), kNoNode);
    for (std::size_t d = 1; d <= depth_bound; ++d) {
        bool any = false;
        for (std::size_t i = d; i < seq.size(); ++i) {
            std::uint32_t parent = cur[i];
            if (parent == kNoNode || st.nodes_[parent].count <= min_count) {
                nxt[i] = kNoNode;
                continue;
            }
            std::uint32_t node = st.find_or_add_child(parent, seq[i - d]);
            st.bump_successor(node, seq[i]);
            nxt[i] = node;
            any = true;
        }
        std::swap(cur, nxt);
        if (!any) break;
    }
    return st;
}

std::uint32_t ContextStats::find(std::span<const Sym> context) const {
    std::uint32_t node = 0;
    for (std::size_t i = context.size(); i-- > 0;) {
        node = child(node, context[i]);
        if (node == kNoNode) return kNoNode;
    }
    return node;
}

std::uint32_t ContextStats::child(std::uint32_t idx, Sym older) const {
    const auto& ch = nodes_[idx].children;
    auto it = std::lower_bound(ch.begin(), ch.end(), older,
                               [](const auto& p, Sym k) { return p.first < k; });
    if (it != ch.end() && it->first == older) return it->second;
    return kNoNode;
}

std::uint64_t ContextStats::successor_count(std::uint32_t idx, Sym s) const {
    const auto& suc = nodes_[idx].successors;
    auto it = std::lower_bound(suc.begin(), suc.end(), s,
                               [](const auto& p, Sym k) { return p.first < k; });
    if (it != suc.end() && it->first == s) return it->second;
    return 0;
}

std::vector<Sym> ContextStats::context_of(std::uint32_t idx) const {
    // The deepest edge carries the oldest symbol, so walking up the
    // parent chain yields the context already in natural order.
    std::vector<Sym> out;
    for (std::uint32_t n = idx; n != 0; n = nodes_[n].parent) out.push_back(nodes_[n].via);
    return out;
}

std::vector<std::uint32_t> ContextStats::nodes_at_depth(std::size_t d) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].depth == d) out.push_back(i);
    return out;
}

}  // namespace extlm
