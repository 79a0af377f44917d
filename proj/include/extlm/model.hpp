#pragma once

// The extension model.
//
// A model is a dictionary D of contexts over a fixed alphabet.  Each
// context w carries a set E(w) of directly parameterized symbols (its
// extensions) with probabilities lambda(sigma|w).  A symbol sigma after
// a history h is predicted in the longest dictionary suffix of h whose
// extension set contains sigma; every longer dictionary suffix that
// lacks sigma multiplies in its expansion factor
//
//     delta(w) = (1 - lambda(E(w)|w)) / (1 - p(E(w)|suffix below w))
//
// which rescales the shorter context's prediction over the symbols w
// does not cover.  The dictionary need not be suffix-closed: a context
// can sit in the model while none of its intermediate suffixes do.
//
// A model is valid when the empty context is present with E(eps) equal
// to the whole alphabet, every context's extension probabilities sum to
// at most one, and to exactly one wherever E(w) covers the alphabet.
// Validity makes every conditional a probability distribution and every
// fixed-length string sum normalize to one.
//
// Probabilities are stored as exact count ratios and only converted to
// doubles for evaluation, so serialization round-trips are exact.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "extlm/alphabet.hpp"
#include "extlm/bigrat.hpp"
#include "extlm/estimate.hpp"

namespace extlm {

struct Extension {
    Sym symbol = 0;
    std::uint64_t count = 0;  // c(sigma|w) in the training corpus
    Rational64 lambda;
};

struct ContextEntry {
    std::vector<Sym> context;       // natural order, oldest symbol first
    std::uint64_t count = 0;        // c(w)
    std::uint64_t novel_weight = 0; // #(w)
    std::uint64_t seen_count = 0;   // |q(w)|
    std::vector<Extension> extensions;  // sorted by symbol
    bool count_backed = true;

    // Derived by finalize():
    int dict_parent = -1;    // entry index of the maximal proper suffix in D
    double delta = 0.0;      // expansion factor at this context
    std::vector<double> dist;  // full conditional distribution after stitching
};

struct Violation {
    std::string constraint;  // "4a", "4b", "4c", "lambda-range", "empty-extensions"
    std::string context;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool pass() const { return violations.empty(); }
    std::string to_string() const;
};

class ExtensionModel {
public:
    explicit ExtensionModel(Alphabet alphabet);

    // Count-backed context: lambda is derived from the counts via the
    // seen/novel partition.  An all-zero root (empty training corpus)
    // falls back to the uniform distribution.
    void add_context(std::vector<Sym> context, std::uint64_t count, std::uint64_t novel_w,
                     std::uint64_t seen_count,
                     const std::vector<std::pair<Sym, std::uint64_t>>& ext_counts);

    // Explicit lambdas; for hand-built models in tests and validation.
    void add_context_raw(std::vector<Sym> context, std::uint64_t count,
                         std::vector<Extension> extensions);

    // Sorts contexts canonically (length, then suffix-major symbol
    // order), builds the lookup trie and the per-context distributions.
    // Must be called before any query.  Throws on duplicate contexts.
    void finalize();

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t m() const { return alphabet_.size(); }
    std::size_t context_count() const { return entries_.size(); }       // |D|
    std::size_t parameter_count() const;                                 // |E|
    std::size_t max_context_length() const { return max_len_; }
    const ContextEntry& entry(std::size_t idx) const { return entries_[idx]; }
    const std::vector<ContextEntry>& entries() const { return entries_; }

    // Entry index, or -1 when the exact context is not in D.
    int find_context(std::span<const Sym> context) const;
    // Entry index of the longest dictionary suffix of the history.
    int longest_suffix_entry(std::span<const Sym> history) const;
    // ceil(w): entries whose maximal proper suffix is w.
    std::vector<int> dict_children(int entry_idx) const;

    double cond_prob(Sym sigma, std::span<const Sym> history) const;
    double expansion_factor(std::span<const Sym> history) const;
    // Full conditional distribution after the history (cached; size m).
    const std::vector<double>& predict(std::span<const Sym> history) const;
    // -log2 probability of the sequence continued from history h0.
    // Infinity when some conditional is zero (possible only for
    // hand-built models; estimated models are strictly positive).
    double log_prob_bits(const SymbolSequence& s, std::span<const Sym> h0 = {}) const;

    BigRat cond_prob_exact(Sym sigma, std::span<const Sym> history) const;
    BigRat expansion_factor_exact(std::span<const Sym> history) const;

    ValidationReport validate() const;

    // Line-oriented text format; deterministic (canonical order).
    // Lambdas are reconstructed from the stored counts on load, so only
    // count-backed models can be serialized.
    std::string serialize() const;
    static ExtensionModel deserialize(std::string_view text);
    std::array<std::uint8_t, 32> digest() const;

    // Dictionary trie exposed for the codelength accounting: includes
    // the intermediate vertices for suffixes that are not themselves
    // contexts.
    struct TrieNode {
        int entry = -1;  // model entry at this vertex, -1 if none
        int parent = -1;
        Sym via = 0;
        std::vector<std::pair<Sym, int>> children;  // sorted by symbol
    };
    const std::vector<TrieNode>& dict_trie() const { return trie_; }

private:
    Alphabet alphabet_;
    std::vector<ContextEntry> entries_;
    std::vector<TrieNode> trie_;
    std::size_t max_len_ = 0;
    bool finalized_ = false;

    void require_finalized() const;
    std::vector<BigRat> exact_dist(int entry_idx) const;
    BigRat lambda_exact(const ContextEntry& e, Sym sigma) const;
    double lambda_double(const ContextEntry& e, Sym sigma) const;
    const Extension* find_extension(const ContextEntry& e, Sym sigma) const;
};

}  // namespace extlm
