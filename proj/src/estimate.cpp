#include "extlm/estimate.hpp"

#include <algorithm>
#include <stdexcept>

namespace extlm {

std::uint64_t novel_weight(std::uint64_t seen_count, std::uint64_t alphabet_size) {
    return std::min(seen_count, alphabet_size - seen_count);
}

EventPartition partition_events(const std::vector<std::uint64_t>& counts) {
    EventPartition p;
    for (auto c : counts)
        if (c > 0) ++p.seen_count;
    p.novel_count = counts.size() - p.seen_count;
    p.novel_weight = novel_weight(p.seen_count, counts.size());
    return p;
}

Rational64 lambda_single(std::uint64_t sigma_count, std::uint64_t context_count,
                         std::uint64_t novel_weight_w, std::uint64_t novel_count_w) {
    std::uint64_t denom = context_count + novel_weight_w;
    if (denom == 0) throw std::domain_error("method C: c(w) + #(w) = 0");
    if (sigma_count > 0) return {sigma_count, denom};
    if (novel_weight_w == 0 || novel_count_w == 0) return {0, 1};
    return {novel_weight_w, novel_count_w * denom};
}

std::vector<Rational64> method_c_lambda(const std::vector<std::uint64_t>& counts) {
    EventPartition p = partition_events(counts);
    std::uint64_t c_w = 0;
    for (auto c : counts) c_w += c;
    if (c_w + p.novel_weight == 0) throw std::domain_error("method C: c(w) + #(w) = 0");
    std::vector<Rational64> out(counts.size());
    for (std::size_t s = 0; s < counts.size(); ++s)
        out[s] = lambda_single(counts[s], c_w, p.novel_weight, p.novel_count);
    return out;
}

std::vector<std::uint64_t> dense_counts(const ContextStats& stats, std::uint32_t node,
                                        std::size_t alphabet_size) {
    std::vector<std::uint64_t> out(alphabet_size, 0);
    for (const auto& [sym, cnt] : stats.node(node).successors) out[sym] = cnt;
    return out;
}

std::vector<Rational64> estimate_lambda(const ContextStats& stats, std::uint32_t node,
                                        std::size_t alphabet_size) {
    return method_c_lambda(dense_counts(stats, node, alphabet_size));
}

}  // namespace extlm
