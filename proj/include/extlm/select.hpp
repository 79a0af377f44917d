#pragma once

// Divergence-heuristic model selection.
//
// A candidate context earns its place by saving more bits on the
// training data than its parameters cost in the model code.  The cost
// of attaching the extension set S to context w is approximated by four
// monotone terms,
//
//   log2 |D| + log2 C(m,|S|) + log2 c(floor(w)) + log2 C(c(w)+|S|, |S|),
//
// and the benefit is what the direct estimates save over the current
// model's predictions at w:
//
//   c(rest|w) * log2[(1-lambda(S|w)) / (1-p(S|w))]
//     + sum_{s in S} c(s|w) * log2[lambda(s|w) / p(s|w)].
//
// Extend() grows S greedily by the single most profitable symbol while
// the marginal profit stays positive.  Refine() sweeps candidate
// contexts breadth-first, level by level: candidates of length n are
// one-symbol left-extensions of the previous level's candidates with
// c(w) > c_min, all evaluated against the model frozen at the start of
// the level and merged afterwards.  Every considered step lands in the
// ledger so a fit can be audited afterwards.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "extlm/context_stats.hpp"
#include "extlm/model.hpp"

namespace extlm {

enum class CostMode {
    MdlApprox,  // four-term approximation above
    Constant,   // fixed bits per extension
    ExactMdl,   // recompute the full model codelength difference
};

struct SelectionConfig {
    std::size_t max_order = 10;
    std::uint64_t min_count = 8;
    CostMode cost_mode = CostMode::MdlApprox;
    double constant_bits = 2.0;
    std::size_t threads = 0;  // 0 = auto / EXTLM_THREADS

    static CostMode parse_cost_mode(const std::string& text, double* bits);
};

struct LedgerRow {
    std::size_t level = 0;
    std::vector<Sym> context;
    std::size_t step = 0;  // |S| when this symbol was considered
    Sym symbol = 0;
    double cost_bits = 0;     // marginal cost
    double benefit_bits = 0;  // marginal benefit
    bool accepted = false;
};

struct DeltaLedger {
    std::vector<LedgerRow> rows;
    void write_csv(std::ostream& out, const Alphabet& a) const;
    std::size_t accepted_count() const;
};

// Incremental cost of attaching ext_set to candidate context w, against
// the current model.  ext_set must be nonempty.
double delta_cost(std::span<const Sym> w, std::span<const Sym> ext_set,
                  const ExtensionModel& model, const ContextStats& stats,
                  const SelectionConfig& cfg);

// Incremental benefit of the same attachment; may be negative.
double delta_benefit(std::span<const Sym> w, std::span<const Sym> ext_set,
                     const ExtensionModel& model, const ContextStats& stats);

// Marginal profit of adding sigma on top of the current set (benefit
// minus cost); the empty current set yields the full singleton profit.
double delta_single(std::span<const Sym> w, std::span<const Sym> current, Sym sigma,
                    const ExtensionModel& model, const ContextStats& stats,
                    const SelectionConfig& cfg);

// Greedy profitable-extension search for one candidate context.
// Returns the selected symbols (possibly empty), sorted.
std::vector<Sym> extend(std::span<const Sym> w, const ExtensionModel& model,
                        const ContextStats& stats, const SelectionConfig& cfg,
                        DeltaLedger* ledger = nullptr, std::size_t level = 0);

// One breadth-first level: evaluates all candidates of length `level`
// against the frozen model and merges the profitable ones.  Returns the
// number of candidates seen (0 = level was empty).
std::size_t refine_level(ExtensionModel& model, const ContextStats& stats,
                         const SelectionConfig& cfg, std::size_t level, DeltaLedger& ledger);

struct FitResult {
    ExtensionModel model;
    DeltaLedger ledger;
    std::vector<std::string> warnings;
};

FitResult fit(const SymbolSequence& seq, const Alphabet& alphabet, const SelectionConfig& cfg);

}  // namespace extlm
