#include "extlm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "extlm/estimate.hpp"
#include "extlm/mdl.hpp"

namespace extlm {

SplitResult split(const std::vector<SymbolSequence>& files, const SplitSpec& spec) {
    if (files.empty()) throw std::invalid_argument("split: no input files");
    if (!(spec.train_fraction > 0.0) || spec.train_fraction > 1.0)
        throw std::invalid_argument("split: train fraction must be in (0, 1]");
    SplitResult out;
    for (const auto& f : files) {
        auto cut = static_cast<std::size_t>(std::floor(spec.train_fraction *
                                                       static_cast<double>(f.size())));
        out.train.insert(out.train.end(), f.begin(), f.begin() + cut);
        out.test.insert(out.test.end(), f.begin() + cut, f.end());
    }
    return out;
}

double message_entropy(const ExtensionModel& model, const SymbolSequence& test) {
    if (test.empty()) throw std::invalid_argument("message entropy of an empty test set");
    return model.log_prob_bits(test) / static_cast<double>(test.size());
}

EvalReport evaluate(const ExtensionModel& model, std::string model_name,
                    const SymbolSequence& test) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    EvalReport r;
    r.model_name = std::move(model_name);
    r.parameter_count = model.parameter_count();
    r.context_count = model.context_count();
    r.test_bits = model.log_prob_bits(test);
    r.test_symbols = test.size();
    r.test_entropy = r.test_bits / static_cast<double>(r.test_symbols);
    return r;
}

NgramModel NgramModel::fit(const SymbolSequence& train, std::size_t order, std::size_t m) {
    NgramModel model;
    model.order_ = order;
    model.m_ = m;
    model.stats_ = ContextStats::count(train, order);
    return model;
}

double NgramModel::log_prob_bits(const SymbolSequence& s) const {
    double bits = 0.0;
    double uniform = -std::log2(1.0 / static_cast<double>(m_));
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t len = std::min(order_, i);
        std::span<const Sym> state(s.data() + i - len, len);
        std::uint32_t node = stats_.find(state);
        if (node == ContextStats::kNoNode || stats_.node(node).count == 0) {
            bits += uniform;
            continue;
        }
        std::uint64_t c_w = stats_.node(node).count;
        std::uint64_t seen = stats_.distinct_successors(node);
        std::uint64_t nw = novel_weight(seen, m_);
        Rational64 lam =
            lambda_single(stats_.successor_count(node, s[i]), c_w, nw, m_ - seen);
        if (lam.num == 0) {
            bits += uniform;  // every symbol seen, sigma not among them: impossible
            continue;
        }
        bits -= std::log2(lam.value());
    }
    return bits;
}

double NgramModel::entropy(const SymbolSequence& test) const {
    if (test.empty()) throw std::invalid_argument("entropy of an empty test set");
    return log_prob_bits(test) / static_cast<double>(test.size());
}

std::uint64_t NgramModel::observed_states() const {
    std::uint64_t n = 0;
    for (std::uint32_t idx : stats_.nodes_at_depth(order_))
        if (stats_.node(idx).count > 0) ++n;
    return n;
}

std::uint64_t NgramModel::realized_parameters() const {
    // One full conditional distribution per observed state: the
    // seen/novel estimator gives every one of the m symbols its own
    // probability in that state.
    return observed_states() * m_;
}

double NgramModel::nominal_parameters() const {
    return std::pow(static_cast<double>(m_), static_cast<double>(order_ + 1));
}

double NgramModel::table_bits() const {
    // Frequency-table charge: identify each observed symbol and send
    // its count.  Crude next to the enumerative model code, but enough
    // to place the class on a codelength sweep.
    double bits = 0.0;
    double sym_bits = std::log2(static_cast<double>(m_));
    for (std::uint32_t idx : stats_.nodes_at_depth(order_))
        for (const auto& [sym, cnt] : stats_.node(idx).successors) {
            (void)sym;
            bits += sym_bits + elias_gamma_length(cnt);
        }
    return bits;
}

std::vector<SweepRow> efficiency_sweep(const SymbolSequence& train, const SymbolSequence& test,
                                       const Alphabet& alphabet,
                                       const std::vector<SweepSetting>& settings,
                                       const SelectionConfig& base_cfg) {
    std::vector<SweepRow> rows;
    for (const auto& s : settings) {
        SweepRow row;
        row.model_class = s.model_class;
        row.order = s.order;
        row.cost_mode = s.cost_mode;
        if (s.model_class == "nem") {
            SelectionConfig cfg = base_cfg;
            cfg.max_order = s.order;
            cfg.cost_mode = SelectionConfig::parse_cost_mode(s.cost_mode, &cfg.constant_bits);
            FitResult fitres = fit(train, alphabet, cfg);
            row.parameters = fitres.model.parameter_count();
            row.total_codelength =
                model_codelength(fitres.model) + data_codelength(fitres.model, train);
            row.test_entropy = message_entropy(fitres.model, test);
        } else if (s.model_class == "ngram") {
            NgramModel ng = NgramModel::fit(train, s.order, alphabet.size());
            row.cost_mode = "-";
            row.parameters = ng.realized_parameters();
            row.total_codelength = ng.table_bits() + ng.log_prob_bits(train);
            row.test_entropy = ng.entropy(test);
        } else {
            throw std::invalid_argument("unknown model class: " + s.model_class);
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "parameters,total_codelength_bits,test_entropy,order,model_class,cost_mode\n";
    for (const auto& r : rows)
        out << r.parameters << ',' << r.total_codelength << ',' << r.test_entropy << ','
            << r.order << ',' << r.model_class << ',' << r.cost_mode << '\n';
    return out.str();
}

std::string inspect(const ExtensionModel& model, std::span<const Sym> context) {
    const Alphabet& a = model.alphabet();
    std::ostringstream out;
    auto label = [&](std::span<const Sym> ctx) {
        if (ctx.empty()) return std::string("<eps>");
        std::string raw;
        for (Sym s : ctx) raw.push_back(static_cast<char>(a.symbol_byte(s)));
        return "\"" + escape_bytes(raw) + "\"";
    };

    int idx = model.find_context(context);
    if (idx < 0) {
        idx = model.longest_suffix_entry(context);
        out << "context " << label(context) << " not in dictionary; showing longest suffix "
            << label(model.entry(idx).context) << "\n";
    }
    const ContextEntry& e = model.entry(idx);
    out << "context " << label(e.context) << "  c=" << e.count << " novel=" << e.novel_weight
        << " seen=" << e.seen_count << "\n";

    const std::vector<double>* below = nullptr;
    if (e.dict_parent >= 0) below = &model.entry(e.dict_parent).dist;
    std::string pos, neg;
    out << "extensions:\n";
    for (const auto& x : e.extensions) {
        double lam = x.lambda.value();
        char cls = ' ';
        if (below) {
            double was = (*below)[x.symbol];
            if (lam > was) {
                cls = '+';
                pos += a.symbol_name(x.symbol) + " ";
            } else if (lam < was) {
                cls = '-';
                neg += a.symbol_name(x.symbol) + " ";
            } else {
                cls = '=';
            }
        }
        out << "  " << (cls == ' ' ? "" : std::string(1, cls) + " ") << a.symbol_name(x.symbol)
            << "  lambda=" << x.lambda.num << "/" << x.lambda.den << " (" << lam << ")"
            << "  c=" << x.count << "\n";
    }
    if (below) {
        out << "+E(w): " << (pos.empty() ? "(none)" : pos) << "\n";
        out << "-E(w): " << (neg.empty() ? "(none)" : neg) << "\n";
        out << "floor(w): " << label(model.entry(e.dict_parent).context) << "\n";
    }
    std::vector<int> kids = model.dict_children(idx);
    out << "ceil(w):";
    if (kids.empty()) out << " (none)";
    for (int k : kids) out << " " << label(model.entry(k).context);
    out << "\n";
    return out.str();
}

}  // namespace extlm
