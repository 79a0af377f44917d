#pragma once

// Two-part codelength accounting: total = model bits + data bits.
//
// The model is charged in three installments: the dictionary tree shape
// (enumerative code over ordered trees with a given branching profile),
// the extension sets per context, and the integer frequencies the
// parameters are estimated from.  The data pays -log2 of its model
// probability.  Everything here is an ideal (real-valued) codelength;
// nothing is rounded to whole bits and no bitstream is emitted for the
// model itself -- the codec module demonstrates achievability of the
// data part separately.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "extlm/model.hpp"

namespace extlm {

// Elias gamma length: 2*floor(log2 n) + 1 for n >= 1.  Zero is admitted
// by a one-off shift (0 costs what 1 costs); lengths only, never emitted.
double elias_gamma_length(std::uint64_t n);

// Uniform code over 0..bound: log2(bound + 1) bits.
double bounded_integer_length(std::uint64_t bound);

// log2 C(n, k); throws std::domain_error when k > n.
double log2_binomial(std::uint64_t n, std::uint64_t k);

// log2 of (sum(parts) - 1)! / prod(parts_i!) -- the number of ordered
// trees with parts_i vertices of branching factor i.  All-zero parts
// cost nothing.
double log2_tree_count(std::span<const std::uint64_t> parts);

// log2 of the multinomial coefficient total! / prod(parts_i!).
double log2_multinomial(std::uint64_t total, std::span<const std::uint64_t> parts);

// Shape of the dictionary suffix tree plus the extension-set histogram.
struct TreeShape {
    std::uint64_t internal_count = 0;            // n, root included
    std::vector<std::uint64_t> branching;        // n_i for i = 1..m
    std::uint64_t leaf_count = 0;                // n_0
    std::vector<std::uint64_t> ext_histogram;    // m_i for i = 0..m
    std::uint64_t floor_size = 0;                // |floor(D)|, eps included
    std::uint64_t floor_coded = 0;               // |floor(D)| without eps
    std::uint64_t dict_size = 0;                 // |D|
};

TreeShape tree_shape(const ExtensionModel& model);

struct CodelengthReport {
    double dict_bits = 0, ext_bits = 0, counts_bits = 0, data_bits = 0;
    double total = 0;
    std::vector<std::pair<std::string, double>> dict_terms, ext_terms, counts_terms;
};

double dictionary_codelength(const TreeShape& shape, std::size_t m,
                             std::vector<std::pair<std::string, double>>* terms = nullptr);
double extensions_codelength(const ExtensionModel& model,
                             std::vector<std::pair<std::string, double>>* terms = nullptr);
double counts_codelength(const ExtensionModel& model,
                         std::vector<std::pair<std::string, double>>* terms = nullptr);
double data_codelength(const ExtensionModel& model, const SymbolSequence& seq);
double model_codelength(const ExtensionModel& model);  // dict + ext + counts
CodelengthReport total_codelength(const ExtensionModel& model, const SymbolSequence& seq);

}  // namespace extlm
