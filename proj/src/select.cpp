#include "extlm/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "extlm/estimate.hpp"
#include "extlm/mdl.hpp"
#include "extlm/parallel.hpp"

namespace extlm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Everything the deltas need about one candidate context, computed once.
struct Candidate {
    std::vector<Sym> ctx;
    std::uint64_t c_w = 0;
    std::vector<std::uint64_t> counts;   // dense c(sigma|w)
    std::vector<Rational64> lambda;      // method C at w from raw counts
    std::vector<double> ptilde;          // current-model prediction at history w
    std::uint64_t c_floor = 0;           // c(maximal proper suffix of w in D)
    std::size_t dict_size = 0;           // |D| at evaluation time
};

Candidate make_candidate(std::span<const Sym> w, const ExtensionModel& model,
                         const ContextStats& stats) {
    std::uint32_t node = stats.find(w);
    if (node == ContextStats::kNoNode)
        throw std::invalid_argument("candidate context not present in statistics");
    Candidate c;
    c.ctx.assign(w.begin(), w.end());
    c.counts = dense_counts(stats, node, model.m());
    for (auto v : c.counts) c.c_w += v;
    c.lambda = method_c_lambda(c.counts);
    c.ptilde = model.predict(w);
    int floor_entry = model.longest_suffix_entry(w);
    if (floor_entry >= 0 && model.entry(floor_entry).context.size() == w.size())
        floor_entry = model.entry(floor_entry).dict_parent;  // w itself is in D already
    c.c_floor = floor_entry >= 0 ? model.entry(floor_entry).count : 0;
    c.dict_size = model.context_count();
    return c;
}

// Running state of the benefit formula over a growing extension set.
struct BenefitState {
    double lam_sum = 0;    // lambda(S|w)
    double pt_sum = 0;     // p(S|w)
    double direct_sum = 0; // sum over S of c(s|w) log2(lambda/p)
    std::uint64_t c_ext = 0;

    double total(const Candidate& c) const {
        double rest = static_cast<double>(c.c_w - c_ext);
        double out = direct_sum;
        if (rest > 0) {
            if (lam_sum >= 1.0) return -kInf;  // occurring symbols left with zero mass
            out += rest * std::log2((1.0 - lam_sum) / (1.0 - pt_sum));
        }
        return out;
    }

    BenefitState with(const Candidate& c, Sym s) const {
        BenefitState n = *this;
        n.lam_sum += c.lambda[s].value();
        n.pt_sum += c.ptilde[s];
        n.c_ext += c.counts[s];
        if (c.counts[s] > 0) {
            double p = c.ptilde[s];
            if (!(p > 0.0)) {
                n.direct_sum = kInf;  // unreachable for estimated models
            } else {
                n.direct_sum +=
                    static_cast<double>(c.counts[s]) * std::log2(c.lambda[s].value() / p);
            }
        }
        return n;
    }
};

double approx_cost(const Candidate& c, std::size_t set_size, std::size_t m) {
    if (set_size == 0) return 0.0;
    double bits = std::log2(static_cast<double>(c.dict_size)) +
                  log2_binomial(m, set_size) +
                  std::log2(static_cast<double>(std::max<std::uint64_t>(c.c_floor, 1))) +
                  log2_binomial(c.c_w + set_size, set_size);
    return bits;
}

// Cost of the set under the configured mode; exact mode rebuilds the
// model code, so it is only sensible for small dictionaries.
struct CostEval {
    const Candidate& cand;
    const ExtensionModel& model;
    const SelectionConfig& cfg;
    double base_model_bits = 0;  // L(model) cached for exact mode

    CostEval(const Candidate& c, const ExtensionModel& mo, const SelectionConfig& cf)
        : cand(c), model(mo), cfg(cf) {
        if (cfg.cost_mode == CostMode::ExactMdl) base_model_bits = model_codelength(model);
    }

    double set_cost(const std::vector<Sym>& set) const {
        switch (cfg.cost_mode) {
            case CostMode::Constant:
                return cfg.constant_bits * static_cast<double>(set.size());
            case CostMode::MdlApprox:
                return approx_cost(cand, set.size(), model.m());
            case CostMode::ExactMdl: {
                if (set.empty()) return 0.0;
                ExtensionModel probe = model;
                std::vector<std::pair<Sym, std::uint64_t>> ext_counts;
                for (Sym s : set) ext_counts.emplace_back(s, cand.counts[s]);
                std::uint64_t seen = 0;
                for (auto v : cand.counts)
                    if (v > 0) ++seen;
                probe.add_context(cand.ctx, cand.c_w, novel_weight(seen, model.m()), seen,
                                  ext_counts);
                probe.finalize();
                return model_codelength(probe) - base_model_bits;
            }
        }
        return 0.0;
    }
};

struct ExtendOutcome {
    std::vector<Sym> selected;
    std::vector<LedgerRow> rows;
};

ExtendOutcome run_extend(const Candidate& cand, const ExtensionModel& model,
                         const SelectionConfig& cfg, std::size_t level) {
    std::size_t m = model.m();
    CostEval cost(cand, model, cfg);
    ExtendOutcome out;
    std::vector<char> in_set(m, 0);
    std::vector<Sym> set;
    BenefitState state;
    double set_cost_bits = 0.0;

    for (std::size_t step = 0;; ++step) {
        double best_profit = -kInf, best_cost = 0, best_benefit = 0;
        int best_sym = -1;
        for (std::size_t s = 0; s < m; ++s) {
            if (in_set[s]) continue;
            BenefitState next = state.with(cand, static_cast<Sym>(s));
            double mben = next.total(cand) - state.total(cand);
            double mcost;
            if (cfg.cost_mode == CostMode::MdlApprox) {
                mcost = approx_cost(cand, set.size() + 1, m) - set_cost_bits;
            } else if (cfg.cost_mode == CostMode::Constant) {
                mcost = cfg.constant_bits;
            } else {
                std::vector<Sym> trial = set;
                trial.push_back(static_cast<Sym>(s));
                std::sort(trial.begin(), trial.end());
                mcost = cost.set_cost(trial) - set_cost_bits;
            }
            double profit = mben - mcost;
            if (profit > best_profit) {  // strict: ties go to the lowest symbol
                best_profit = profit;
                best_sym = static_cast<int>(s);
                best_cost = mcost;
                best_benefit = mben;
            }
        }
        if (best_sym < 0) break;  // alphabet exhausted
        bool accept = best_profit > 0.0;
        out.rows.push_back({level, cand.ctx, step, static_cast<Sym>(best_sym), best_cost,
                            best_benefit, accept});
        if (!accept) break;
        in_set[best_sym] = 1;
        set.push_back(static_cast<Sym>(best_sym));
        state = state.with(cand, static_cast<Sym>(best_sym));
        set_cost_bits += best_cost;
        if (set.size() == m) break;
    }
    std::sort(set.begin(), set.end());
    out.selected = std::move(set);
    return out;
}

}  // namespace

CostMode SelectionConfig::parse_cost_mode(const std::string& text, double* bits) {
    if (text == "mdl") return CostMode::MdlApprox;
    if (text == "exact") return CostMode::ExactMdl;
    if (text.rfind("const:", 0) == 0) {
        double b = std::stod(text.substr(6));
        if (!(b > 0)) throw std::invalid_argument("constant cost must be positive");
        if (bits) *bits = b;
        return CostMode::Constant;
    }
    throw std::invalid_argument("unknown cost mode: " + text + " (use mdl, const:<bits>, exact)");
}

void DeltaLedger::write_csv(std::ostream& out, const Alphabet& a) const {
    out << "level,context,step,symbol,cost_bits,benefit_bits,accepted\n";
    for (const auto& r : rows) {
        std::string raw;
        for (Sym s : r.context) raw.push_back(static_cast<char>(a.symbol_byte(s)));
        out << r.level << ',' << escape_bytes(raw) << ',' << r.step << ','
            << static_cast<unsigned>(r.symbol) << ',' << r.cost_bits << ',' << r.benefit_bits
            << ',' << (r.accepted ? 1 : 0) << '\n';
    }
}

std::size_t DeltaLedger::accepted_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.accepted;
    return n;
}

double delta_cost(std::span<const Sym> w, std::span<const Sym> ext_set,
                  const ExtensionModel& model, const ContextStats& stats,
                  const SelectionConfig& cfg) {
    if (ext_set.empty()) throw std::invalid_argument("delta_cost: empty extension set");
    Candidate cand = make_candidate(w, model, stats);
    CostEval cost(cand, model, cfg);
    std::vector<Sym> set(ext_set.begin(), ext_set.end());
    std::sort(set.begin(), set.end());
    return cost.set_cost(set);
}

double delta_benefit(std::span<const Sym> w, std::span<const Sym> ext_set,
                     const ExtensionModel& model, const ContextStats& stats) {
    Candidate cand = make_candidate(w, model, stats);
    BenefitState state;
    for (Sym s : ext_set) state = state.with(cand, s);
    return state.total(cand);
}

double delta_single(std::span<const Sym> w, std::span<const Sym> current, Sym sigma,
                    const ExtensionModel& model, const ContextStats& stats,
                    const SelectionConfig& cfg) {
    for (Sym s : current)
        if (s == sigma) throw std::invalid_argument("delta_single: sigma already in set");
    Candidate cand = make_candidate(w, model, stats);
    CostEval cost(cand, model, cfg);
    std::vector<Sym> base(current.begin(), current.end());
    std::sort(base.begin(), base.end());
    std::vector<Sym> grown = base;
    grown.push_back(sigma);
    std::sort(grown.begin(), grown.end());

    BenefitState state;
    for (Sym s : base) state = state.with(cand, s);
    BenefitState next = state.with(cand, sigma);
    double mben = next.total(cand) - state.total(cand);
    double mcost = cost.set_cost(grown) - (base.empty() ? 0.0 : cost.set_cost(base));
    return mben - mcost;
}

std::vector<Sym> extend(std::span<const Sym> w, const ExtensionModel& model,
                        const ContextStats& stats, const SelectionConfig& cfg,
                        DeltaLedger* ledger, std::size_t level) {
    Candidate cand = make_candidate(w, model, stats);
    ExtendOutcome out = run_extend(cand, model, cfg, level);
    if (ledger)
        ledger->rows.insert(ledger->rows.end(), out.rows.begin(), out.rows.end());
    return out.selected;
}

std::size_t refine_level(ExtensionModel& model, const ContextStats& stats,
                         const SelectionConfig& cfg, std::size_t level, DeltaLedger& ledger) {
    // Candidate contexts of this length: count above threshold.  Their
    // shorter suffixes qualified automatically (counts are monotone), so
    // depth alone identifies the breadth-first frontier.
    std::vector<std::uint32_t> nodes = stats.nodes_at_depth(level);
    std::vector<std::uint32_t> cands;
    for (auto n : nodes)
        if (stats.node(n).count > cfg.min_count) cands.push_back(n);
    if (cands.empty()) return 0;

    // Canonical order: most recent symbol outward, i.e. trie order.
    std::vector<std::vector<Sym>> keys(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        std::vector<Sym> ctx = stats.context_of(cands[i]);
        keys[i].assign(ctx.rbegin(), ctx.rend());
    }
    std::vector<std::size_t> order(cands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    std::vector<ExtendOutcome> results(cands.size());
    const ExtensionModel& frozen = model;
    parallel_for(order.size(), worker_count(cfg.threads), [&](std::size_t i) {
        std::uint32_t node = cands[order[i]];
        Candidate cand = make_candidate(stats.context_of(node), frozen, stats);
        results[i] = run_extend(cand, frozen, cfg, level);
    });

    // Merge in canonical order after the whole level is evaluated.
    bool grew = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& r = results[i];
        ledger.rows.insert(ledger.rows.end(), r.rows.begin(), r.rows.end());
        if (r.selected.empty()) continue;
        std::uint32_t node = cands[order[i]];
        std::vector<std::pair<Sym, std::uint64_t>> ext_counts;
        for (Sym s : r.selected) ext_counts.emplace_back(s, stats.successor_count(node, s));
        std::uint64_t seen = stats.distinct_successors(node);
        model.add_context(stats.context_of(node), stats.node(node).count,
                          novel_weight(seen, model.m()), seen, ext_counts);
        grew = true;
    }
    if (grew) model.finalize();
    return cands.size();
}

FitResult fit(const SymbolSequence& seq, const Alphabet& alphabet, const SelectionConfig& cfg) {
    ContextStats stats = ContextStats::count_pruned(seq, cfg.max_order, cfg.min_count);

    ExtensionModel model(alphabet);
    std::uint32_t root = stats.root();
    std::vector<std::pair<Sym, std::uint64_t>> root_counts;
    for (Sym s = 0; s < alphabet.size(); ++s)
        root_counts.emplace_back(s, stats.successor_count(root, s));
    std::uint64_t seen = stats.distinct_successors(root);
    model.add_context({}, stats.node(root).count, novel_weight(seen, alphabet.size()), seen,
                      root_counts);
    model.finalize();

    FitResult result{std::move(model), {}, {}};
    if (seq.empty()) {
        result.warnings.push_back("empty corpus: base model with zero counts");
        return result;
    }
    for (std::size_t n = 1; n <= cfg.max_order; ++n) {
        if (refine_level(result.model, stats, cfg, n, result.ledger) == 0) break;
    }
    ValidationReport report = result.model.validate();
    if (!report.pass())
        throw std::logic_error("fit produced an invalid model:\n" + report.to_string());
    return result;
}

}  // namespace extlm
