#pragma once

// Train/test protocol and model-class efficiency reporting: per-file
// prefix splits, held-out message entropy, a fixed-order n-gram
// baseline smoothed with the same seen/novel estimator, and the sweep
// that tabulates parameters / codelength / entropy per configuration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extlm/context_stats.hpp"
#include "extlm/mdl.hpp"
#include "extlm/model.hpp"
#include "extlm/select.hpp"

namespace extlm {

struct SplitSpec {
    double train_fraction = 0.9;
};

struct SplitResult {
    SymbolSequence train, test;
};

// Per-file prefix split: the first floor(fraction * len) symbols of
// each file go to train, the remainder to test, concatenated in input
// order.  Throws when no files are given.
SplitResult split(const std::vector<SymbolSequence>& files, const SplitSpec& spec);

// Held-out bits per symbol, histories starting empty.  Throws on an
// empty test sequence.
double message_entropy(const ExtensionModel& model, const SymbolSequence& test);

// Fixed-order Markov baseline.  Each state of length k is smoothed with
// the seen/novel partition estimator; states never observed in training
// fall back to the uniform distribution.  Positions with fewer than k
// preceding symbols use the shorter available state.
class NgramModel {
public:
    static NgramModel fit(const SymbolSequence& train, std::size_t order, std::size_t m);

    std::size_t order() const { return order_; }
    double log_prob_bits(const SymbolSequence& s) const;
    double entropy(const SymbolSequence& test) const;  // bits/symbol

    // Distinct full-order states seen in training.
    std::uint64_t observed_states() const;
    // Parameters actually instantiated: m per observed state.
    std::uint64_t realized_parameters() const;
    // Full table size m^(k+1); astronomically large for useful orders.
    double nominal_parameters() const;
    // Bits to transmit the realized frequency table.
    double table_bits() const;

private:
    std::size_t order_ = 0;
    std::size_t m_ = 0;
    ContextStats stats_;
};

struct EvalReport {
    std::string model_name;
    std::uint64_t parameter_count = 0;
    std::uint64_t context_count = 0;
    double test_bits = 0;
    double test_entropy = 0;  // test_bits / test_symbols
    std::uint64_t test_symbols = 0;
};

EvalReport evaluate(const ExtensionModel& model, std::string model_name,
                    const SymbolSequence& test);

struct SweepSetting {
    std::string model_class;  // "nem" or "ngram"
    std::size_t order = 0;
    std::string cost_mode = "mdl";  // nem only
};

struct SweepRow {
    std::string model_class;
    std::size_t order = 0;
    std::string cost_mode;
    std::uint64_t parameters = 0;
    double total_codelength = 0;  // model + train data, bits
    double test_entropy = 0;
};

std::vector<SweepRow> efficiency_sweep(const SymbolSequence& train, const SymbolSequence& test,
                                       const Alphabet& alphabet,
                                       const std::vector<SweepSetting>& settings,
                                       const SelectionConfig& base_cfg);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// Human-readable record of one context: extensions with their lambdas
// and counts, which of them became more/less likely than the suffix
// context predicted, the maximal proper suffix and the contexts it
// dominates.  Unknown contexts fall back to their longest suffix in D.
std::string inspect(const ExtensionModel& model, std::span<const Sym> context);

}  // namespace extlm
