#include "extlm/mdl.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace extlm {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double log2_factorial(std::uint64_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0) / kLn2;
}

}  // namespace

double elias_gamma_length(std::uint64_t n) {
    if (n == 0) n = 1;  // shift convention
    return static_cast<double>(2 * (std::bit_width(n) - 1) + 1);
}

double bounded_integer_length(std::uint64_t bound) {
    return std::log2(static_cast<double>(bound) + 1.0);
}

double log2_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw std::domain_error("log2_binomial: k > n");
    if (k == 0 || k == n) return 0.0;
    return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

double log2_tree_count(std::span<const std::uint64_t> parts) {
    std::uint64_t total = 0;
    for (auto p : parts) total += p;
    if (total == 0) return 0.0;
    double bits = log2_factorial(total - 1);
    for (auto p : parts) bits -= log2_factorial(p);
    return bits;
}

double log2_multinomial(std::uint64_t total, std::span<const std::uint64_t> parts) {
    double bits = log2_factorial(total);
    for (auto p : parts) bits -= log2_factorial(p);
    return bits;
}

TreeShape tree_shape(const ExtensionModel& model) {
    TreeShape shape;
    std::size_t m = model.m();
    shape.branching.assign(m + 1, 0);  // index by branching factor, 1..m used
    shape.ext_histogram.assign(m + 1, 0);
    shape.dict_size = model.context_count();

    const auto& trie = model.dict_trie();
    for (const auto& node : trie) {
        std::size_t deg = node.children.size();
        if (deg == 0) {
            ++shape.leaf_count;
        } else {
            ++shape.internal_count;
            ++shape.branching[deg];
        }
        if (node.entry >= 0 && deg > 0) {
            // In-dictionary context at an interior vertex: a proper
            // suffix of some longer context.
            ++shape.floor_size;
            if (node.parent >= 0) ++shape.floor_coded;  // root (eps) is known a priori
        }
    }
    for (const auto& e : model.entries()) ++shape.ext_histogram[e.extensions.size()];
    return shape;
}

double dictionary_codelength(const TreeShape& shape, std::size_t m,
                             std::vector<std::pair<std::string, double>>* terms) {
    std::uint64_t n = shape.internal_count;
    double t_size = elias_gamma_length(n);
    double t_branching = log2_binomial(n + m - 1, m - 1);
    std::vector<std::uint64_t> parts;
    parts.push_back(shape.leaf_count);
    for (std::size_t i = 1; i <= m; ++i) parts.push_back(shape.branching[i]);
    double t_tree = log2_tree_count(parts);
    double t_labels = 0.0;
    for (std::size_t i = 1; i <= m; ++i)
        if (shape.branching[i])
            t_labels += static_cast<double>(shape.branching[i]) *
                        log2_binomial(static_cast<std::uint64_t>(m), i);
    double t_floor_size = bounded_integer_length(n);
    std::uint64_t f = shape.floor_coded;
    double t_floor_ident = f == 0 ? 0.0 : log2_binomial(n + f - 1, f - 1);
    if (terms) {
        terms->push_back({"internal-vertex-count", t_size});
        terms->push_back({"branching-profile", t_branching});
        terms->push_back({"tree-shape", t_tree});
        terms->push_back({"edge-labels", t_labels});
        terms->push_back({"suffix-context-count", t_floor_size});
        terms->push_back({"suffix-context-identity", t_floor_ident});
    }
    return t_size + t_branching + t_tree + t_labels + t_floor_size + t_floor_ident;
}

double extensions_codelength(const ExtensionModel& model,
                             std::vector<std::pair<std::string, double>>* terms) {
    std::size_t m = model.m();
    std::uint64_t d = model.context_count();
    std::vector<std::uint64_t> hist(m + 1, 0);
    for (const auto& e : model.entries()) ++hist[e.extensions.size()];
    double t_hist = log2_binomial(d + m - 1, m - 1);
    double t_assign = log2_multinomial(d, hist);
    double t_subsets = 0.0;
    for (std::size_t i = 0; i <= m; ++i)
        if (hist[i])
            t_subsets += static_cast<double>(hist[i]) *
                         log2_binomial(static_cast<std::uint64_t>(m), i);
    if (terms) {
        terms->push_back({"extension-size-histogram", t_hist});
        terms->push_back({"size-assignment", t_assign});
        terms->push_back({"subset-choices", t_subsets});
    }
    return t_hist + t_assign + t_subsets;
}

double counts_codelength(const ExtensionModel& model,
                         std::vector<std::pair<std::string, double>>* terms) {
    int eps = model.find_context({});
    std::uint64_t total = eps >= 0 ? model.entry(eps).count : 0;
    // Nothing was observed, nothing to transmit.
    double t_total = total == 0 ? 0.0 : elias_gamma_length(total);
    double t_partition = 0.0, t_alloc = 0.0;
    std::vector<std::size_t> child_count(model.context_count(), 0);
    for (const auto& e : model.entries())
        if (e.dict_parent >= 0) ++child_count[e.dict_parent];
    for (std::size_t i = 0; i < model.context_count(); ++i) {
        const auto& e = model.entry(i);
        t_partition += log2_binomial(e.count + child_count[i], e.count);
        t_alloc += log2_binomial(e.count + e.extensions.size(), e.extensions.size());
    }
    if (terms) {
        terms->push_back({"corpus-size", t_total});
        terms->push_back({"suffix-partition", t_partition});
        terms->push_back({"extension-allocation", t_alloc});
    }
    return t_total + t_partition + t_alloc;
}

double data_codelength(const ExtensionModel& model, const SymbolSequence& seq) {
    return model.log_prob_bits(seq);
}

double model_codelength(const ExtensionModel& model) {
    TreeShape shape = tree_shape(model);
    return dictionary_codelength(shape, model.m()) + extensions_codelength(model) +
           counts_codelength(model);
}

CodelengthReport total_codelength(const ExtensionModel& model, const SymbolSequence& seq) {
    CodelengthReport report;
    TreeShape shape = tree_shape(model);
    report.dict_bits = dictionary_codelength(shape, model.m(), &report.dict_terms);
    report.ext_bits = extensions_codelength(model, &report.ext_terms);
    report.counts_bits = counts_codelength(model, &report.counts_terms);
    report.data_bits = data_codelength(model, seq);
    report.total = report.dict_bits + report.ext_bits + report.counts_bits + report.data_bits;
    return report;
}

}  // namespace extlm
