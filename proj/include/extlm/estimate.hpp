#pragma once

// Moffat's method C, specialized to a two-level partition: the symbols
// previously seen in a context share c(w)/(c(w)+#(w)) proportionally to
// their counts, and the novel symbols split #(w)/(c(w)+#(w)) uniformly,
// with #(w) = min(|q(w)|, |qbar(w)|).  No escape probabilities and no
// context blending.

#include <cstdint>
#include <vector>

#include "extlm/context_stats.hpp"

namespace extlm {

// Exact probability as a ratio of two 64-bit integers.
struct Rational64 {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational64&) const = default;
};

struct EventPartition {
    std::uint64_t seen_count = 0;   // |q(w)|
    std::uint64_t novel_count = 0;  // |qbar(w)|
    std::uint64_t novel_weight = 0; // #(w)
};

std::uint64_t novel_weight(std::uint64_t seen_count, std::uint64_t alphabet_size);

EventPartition partition_events(const std::vector<std::uint64_t>& counts);

// lambda(sigma|w) for every sigma, from the dense count vector of a
// context.  Throws std::domain_error when c(w) = 0 and #(w) = 0 (such
// contexts never pass the candidate filter).
std::vector<Rational64> method_c_lambda(const std::vector<std::uint64_t>& counts);

// Dense count vector for a stats node.
std::vector<std::uint64_t> dense_counts(const ContextStats& stats, std::uint32_t node,
                                        std::size_t alphabet_size);

std::vector<Rational64> estimate_lambda(const ContextStats& stats, std::uint32_t node,
                                        std::size_t alphabet_size);

// Single-symbol form used on hot paths: lambda for one sigma given the
// context totals, without materializing the dense vector.
Rational64 lambda_single(std::uint64_t sigma_count, std::uint64_t context_count,
                         std::uint64_t novel_weight_w, std::uint64_t novel_count_w);

}  // namespace extlm
