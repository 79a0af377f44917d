#include "extlm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "extlm/sha256.hpp"

namespace extlm {

namespace {

// Canonical order: by length, then by symbol index comparing from the
// most recent symbol backward (suffix-major), matching trie order.
bool canonical_less(const std::vector<Sym>& a, const std::vector<Sym>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        Sym x = a[a.size() - 1 - i], y = b[b.size() - 1 - i];
        if (x != y) return x < y;
    }
    return false;
}

std::string context_label(const Alphabet& a, std::span<const Sym> ctx) {
    if (ctx.empty()) return "<eps>";
    std::string raw;
    for (Sym s : ctx) raw.push_back(static_cast<char>(a.symbol_byte(s)));
    return escape_bytes(raw);
}

}  // namespace

std::string ValidationReport::to_string() const {
    if (pass()) return "pass";
    std::string out;
    for (const auto& v : violations) {
        out += v.constraint;
        out += " at ";
        out += v.context;
        out += ": ";
        out += v.detail;
        out += '\n';
    }
    return out;
}

ExtensionModel::ExtensionModel(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

void ExtensionModel::add_context(std::vector<Sym> context, std::uint64_t count,
                                 std::uint64_t novel_w, std::uint64_t seen_count,
                                 const std::vector<std::pair<Sym, std::uint64_t>>& ext_counts) {
    ContextEntry e;
    e.context = std::move(context);
    e.count = count;
    e.novel_weight = novel_w;
    e.seen_count = seen_count;
    e.count_backed = true;
    std::uint64_t novel_count = alphabet_.size() - seen_count;
    for (const auto& [sym, c] : ext_counts) {
        Extension x;
        x.symbol = sym;
        x.count = c;
        if (count + novel_w == 0) {
            if (!e.context.empty())
                throw std::domain_error("context with c(w)=0 and #(w)=0");
            // Empty corpus: the root falls back to uniform.
            x.lambda = {1, static_cast<std::uint64_t>(alphabet_.size())};
        } else {
            x.lambda = lambda_single(c, count, novel_w, novel_count);
        }
        e.extensions.push_back(x);
    }
    std::sort(e.extensions.begin(), e.extensions.end(),
              [](const Extension& a, const Extension& b) { return a.symbol < b.symbol; });
    entries_.push_back(std::move(e));
    finalized_ = false;
}

void ExtensionModel::add_context_raw(std::vector<Sym> context, std::uint64_t count,
                                     std::vector<Extension> extensions) {
    ContextEntry e;
    e.context = std::move(context);
    e.count = count;
    e.count_backed = false;
    e.extensions = std::move(extensions);
    std::sort(e.extensions.begin(), e.extensions.end(),
              [](const Extension& a, const Extension& b) { return a.symbol < b.symbol; });
    entries_.push_back(std::move(e));
    finalized_ = false;
}

void ExtensionModel::finalize() {
    std::sort(entries_.begin(), entries_.end(),
              [](const ContextEntry& a, const ContextEntry& b) {
                  return canonical_less(a.context, b.context);
              });
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i].context == entries_[i - 1].context)
            throw std::invalid_argument("duplicate context in model");

    trie_.clear();
    trie_.emplace_back();  // root = empty context vertex
    max_len_ = 0;
    for (std::size_t idx = 0; idx < entries_.size(); ++idx) {
        const auto& ctx = entries_[idx].context;
        max_len_ = std::max(max_len_, ctx.size());
        int node = 0;
        for (std::size_t i = ctx.size(); i-- > 0;) {  // most recent symbol first
            Sym s = ctx[i];
            auto& ch = trie_[node].children;
            auto it = std::lower_bound(ch.begin(), ch.end(), s,
                                       [](const auto& p, Sym k) { return p.first < k; });
            if (it != ch.end() && it->first == s) {
                node = it->second;
            } else {
                int fresh = static_cast<int>(trie_.size());
                std::size_t pos = static_cast<std::size_t>(it - ch.begin());
                TrieNode t;
                t.parent = node;
                t.via = s;
                trie_.push_back(std::move(t));
                trie_[node].children.insert(trie_[node].children.begin() + pos, {s, fresh});
                node = fresh;
            }
        }
        trie_[node].entry = static_cast<int>(idx);
    }

    // Nearest in-dictionary ancestor of each entry, then the stitched
    // distributions in canonical order (suffixes come first).
    std::vector<int> nearest(trie_.size(), -1);
    // Trie nodes were appended during descent, so a parent always
    // precedes its children.
    for (std::size_t n = 1; n < trie_.size(); ++n) {
        int p = trie_[n].parent;
        nearest[n] = trie_[p].entry >= 0 ? trie_[p].entry : nearest[p];
    }
    for (std::size_t n = 0; n < trie_.size(); ++n) {
        if (trie_[n].entry >= 0) entries_[trie_[n].entry].dict_parent = nearest[n];
    }

    std::size_t m = alphabet_.size();
    for (auto& e : entries_) {
        e.dist.assign(m, 0.0);
        e.delta = 0.0;
        if (e.dict_parent < 0) {
            for (const auto& x : e.extensions) e.dist[x.symbol] = x.lambda.value();
            continue;
        }
        const auto& lower = entries_[e.dict_parent].dist;
        if (e.extensions.size() == m) {
            for (const auto& x : e.extensions) e.dist[x.symbol] = x.lambda.value();
            continue;
        }
        double lam_sum = 0.0, excl_mass = 0.0;
        for (const auto& x : e.extensions) {
            lam_sum += x.lambda.value();
            excl_mass += lower[x.symbol];
        }
        double denom = 1.0 - excl_mass;
        e.delta = denom > 0.0 ? (1.0 - lam_sum) / denom : 0.0;
        for (std::size_t s = 0; s < m; ++s) e.dist[s] = e.delta * lower[s];
        for (const auto& x : e.extensions) e.dist[x.symbol] = x.lambda.value();
    }
    finalized_ = true;
}

void ExtensionModel::require_finalized() const {
    if (!finalized_) throw std::logic_error("model not finalized");
}

std::size_t ExtensionModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.extensions.size();
    return n;
}

int ExtensionModel::find_context(std::span<const Sym> context) const {
    require_finalized();
    int node = 0;
    for (std::size_t i = context.size(); i-- > 0;) {
        const auto& ch = trie_[node].children;
        auto it = std::lower_bound(ch.begin(), ch.end(), context[i],
                                   [](const auto& p, Sym k) { return p.first < k; });
        if (it == ch.end() || it->first != context[i]) return -1;
        node = it->second;
    }
    return trie_[node].entry;
}

int ExtensionModel::longest_suffix_entry(std::span<const Sym> history) const {
    require_finalized();
    int node = 0;
    int best = trie_[0].entry;
    std::size_t steps = std::min(history.size(), max_len_);
    for (std::size_t i = 0; i < steps; ++i) {
        Sym s = history[history.size() - 1 - i];
        const auto& ch = trie_[node].children;
        auto it = std::lower_bound(ch.begin(), ch.end(), s,
                                   [](const auto& p, Sym k) { return p.first < k; });
        if (it == ch.end() || it->first != s) break;
        node = it->second;
        if (trie_[node].entry >= 0) best = trie_[node].entry;
    }
    return best;
}

std::vector<int> ExtensionModel::dict_children(int entry_idx) const {
    require_finalized();
    std::vector<int> out;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].dict_parent == entry_idx) out.push_back(static_cast<int>(i));
    return out;
}

const Extension* ExtensionModel::find_extension(const ContextEntry& e, Sym sigma) const {
    auto it = std::lower_bound(e.extensions.begin(), e.extensions.end(), sigma,
                               [](const Extension& x, Sym k) { return x.symbol < k; });
    if (it != e.extensions.end() && it->symbol == sigma) return &*it;
    return nullptr;
}

double ExtensionModel::lambda_double(const ContextEntry& e, Sym sigma) const {
    const Extension* x = find_extension(e, sigma);
    return x ? x->lambda.value() : 0.0;
}

BigRat ExtensionModel::lambda_exact(const ContextEntry& e, Sym sigma) const {
    const Extension* x = find_extension(e, sigma);
    return x ? BigRat(x->lambda.num, x->lambda.den) : BigRat::zero();
}

double ExtensionModel::cond_prob(Sym sigma, std::span<const Sym> history) const {
    require_finalized();
    double acc = 1.0;
    for (int e = longest_suffix_entry(history); e >= 0; e = entries_[e].dict_parent) {
        const ContextEntry& entry = entries_[e];
        if (const Extension* x = find_extension(entry, sigma)) return acc * x->lambda.value();
        acc *= entry.delta;
    }
    return 0.0;  // sigma escaped every context: only possible when 4a fails
}

double ExtensionModel::expansion_factor(std::span<const Sym> history) const {
    require_finalized();
    int e = longest_suffix_entry(history);
    if (e < 0) return 0.0;
    if (entries_[e].extensions.size() == m()) return 0.0;
    return entries_[e].delta;
}

const std::vector<double>& ExtensionModel::predict(std::span<const Sym> history) const {
    require_finalized();
    int e = longest_suffix_entry(history);
    if (e < 0) throw std::logic_error("model has no empty context");
    return entries_[e].dist;
}

double ExtensionModel::log_prob_bits(const SymbolSequence& s, std::span<const Sym> h0) const {
    require_finalized();
    std::vector<Sym> hist(h0.begin(), h0.end());
    hist.reserve(h0.size() + s.size());
    double bits = 0.0;
    for (Sym sym : s) {
        const auto& dist = predict(hist);
        double p = dist[sym];
        if (!(p > 0.0)) return std::numeric_limits<double>::infinity();
        bits -= std::log2(p);
        hist.push_back(sym);
    }
    return bits;
}

std::vector<BigRat> ExtensionModel::exact_dist(int entry_idx) const {
    const ContextEntry& e = entries_[entry_idx];
    std::size_t m = alphabet_.size();
    std::vector<BigRat> out(m, BigRat::zero());
    if (e.dict_parent < 0 || e.extensions.size() == m) {
        for (const auto& x : e.extensions) out[x.symbol] = BigRat(x.lambda.num, x.lambda.den);
        return out;
    }
    std::vector<BigRat> lower = exact_dist(e.dict_parent);
    BigRat lam_sum = BigRat::zero(), excl = BigRat::zero();
    for (const auto& x : e.extensions) {
        lam_sum += BigRat(x.lambda.num, x.lambda.den);
        excl += lower[x.symbol];
    }
    BigRat denom = BigRat::one() - excl;
    BigRat delta = (denom.is_zero() || denom.negative()) ? BigRat::zero()
                                                         : (BigRat::one() - lam_sum) / denom;
    for (std::size_t s = 0; s < m; ++s) out[s] = delta * lower[s];
    for (const auto& x : e.extensions) out[x.symbol] = BigRat(x.lambda.num, x.lambda.den);
    return out;
}

BigRat ExtensionModel::cond_prob_exact(Sym sigma, std::span<const Sym> history) const {
    require_finalized();
    BigRat acc = BigRat::one();
    for (int e = longest_suffix_entry(history); e >= 0; e = entries_[e].dict_parent) {
        const ContextEntry& entry = entries_[e];
        if (find_extension(entry, sigma) != nullptr) return acc * lambda_exact(entry, sigma);
        // delta at this context, exactly
        if (entry.dict_parent < 0) return BigRat::zero();
        std::vector<BigRat> lower = exact_dist(entry.dict_parent);
        BigRat lam_sum = BigRat::zero(), excl = BigRat::zero();
        for (const auto& x : entry.extensions) {
            lam_sum += lambda_exact(entry, x.symbol);
            excl += lower[x.symbol];
        }
        BigRat denom = BigRat::one() - excl;
        if (denom.is_zero() || denom.negative()) return BigRat::zero();
        acc *= (BigRat::one() - lam_sum) / denom;
    }
    return BigRat::zero();
}

BigRat ExtensionModel::expansion_factor_exact(std::span<const Sym> history) const {
    require_finalized();
    int e = longest_suffix_entry(history);
    if (e < 0) return BigRat::zero();
    const ContextEntry& entry = entries_[e];
    if (entry.extensions.size() == m()) return BigRat::zero();
    if (entry.dict_parent < 0) return BigRat::zero();
    std::vector<BigRat> lower = exact_dist(entry.dict_parent);
    BigRat lam_sum = BigRat::zero(), excl = BigRat::zero();
    for (const auto& x : entry.extensions) {
        lam_sum += lambda_exact(entry, x.symbol);
        excl += lower[x.symbol];
    }
    BigRat denom = BigRat::one() - excl;
    if (denom.is_zero() || denom.negative()) return BigRat::zero();
    return (BigRat::one() - lam_sum) / denom;
}

ValidationReport ExtensionModel::validate() const {
    ValidationReport report;
    std::size_t m = alphabet_.size();
    bool has_eps = false;
    for (const auto& e : entries_) {
        std::string label = context_label(alphabet_, e.context);
        if (e.context.empty()) {
            has_eps = true;
            if (e.extensions.size() != m)
                report.violations.push_back(
                    {"4a", label, "empty context must extend every symbol"});
        }
        if (e.extensions.empty())
            report.violations.push_back({"empty-extensions", label, "context with no extensions"});
        BigRat sum = BigRat::zero();
        for (const auto& x : e.extensions) {
            if (x.lambda.num > x.lambda.den)
                report.violations.push_back(
                    {"lambda-range", label,
                     "lambda(" + alphabet_.symbol_name(x.symbol) + ") > 1"});
            sum += BigRat(x.lambda.num, x.lambda.den);
        }
        if (sum > BigRat::one())
            report.violations.push_back({"4b", label, "extension mass " + sum.to_string() + " > 1"});
        if (e.extensions.size() == m && sum != BigRat::one())
            report.violations.push_back(
                {"4c", label, "full extension set sums to " + sum.to_string() + " != 1"});
    }
    if (!has_eps)
        report.violations.push_back({"4a", "<eps>", "empty context missing from dictionary"});
    return report;
}

std::string ExtensionModel::serialize() const {
    require_finalized();
    std::ostringstream out;
    out << "EXTMODEL v1\n";
    out << "alphabet " << alphabet_.spec_string() << "\n";
    for (const auto& e : entries_) {
        if (!e.count_backed)
            throw std::logic_error("cannot serialize a model with hand-set lambdas");
        std::string raw;
        for (Sym s : e.context) raw.push_back(static_cast<char>(alphabet_.symbol_byte(s)));
        out << "ctx " << escape_bytes(raw) << " c=" << e.count << " novel=" << e.novel_weight
            << " seen=" << e.seen_count << "\n";
        for (const auto& x : e.extensions)
            out << "  ext " << x.symbol << " c=" << x.count << "\n";
    }
    return out.str();
}

ExtensionModel ExtensionModel::deserialize(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "EXTMODEL v1")
        throw std::invalid_argument("model file: bad or unsupported header: " + line);
    if (!std::getline(in, line) || line.rfind("alphabet ", 0) != 0)
        throw std::invalid_argument("model file: missing alphabet line");
    Alphabet alphabet = Alphabet::from_spec(line.substr(9));
    ExtensionModel model(alphabet);

    auto field = [&](const std::string& tok, const char* key) -> std::uint64_t {
        std::string prefix = std::string(key) + "=";
        if (tok.rfind(prefix, 0) != 0)
            throw std::invalid_argument("model file: expected " + prefix + " got " + tok);
        return std::stoull(tok.substr(prefix.size()));
    };

    std::vector<Sym> ctx;
    std::uint64_t count = 0, novel = 0, seen = 0;
    std::vector<std::pair<Sym, std::uint64_t>> exts;
    bool open = false;
    auto flush = [&]() {
        if (open) model.add_context(ctx, count, novel, seen, exts);
        exts.clear();
        open = false;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "ctx") {
            flush();
            // The context field is empty for the root, so split by hand.
            std::string rest = line.substr(4);
            std::size_t sp = rest.find(' ');
            if (sp == std::string::npos)
                throw std::invalid_argument("model file: malformed ctx line: " + line);
            std::string raw = unescape_bytes(rest.substr(0, sp));
            ctx.clear();
            for (char c : raw) ctx.push_back(alphabet.map_byte(static_cast<std::uint8_t>(c)));
            std::istringstream fs(rest.substr(sp + 1));
            std::string t1, t2, t3;
            fs >> t1 >> t2 >> t3;
            count = field(t1, "c");
            novel = field(t2, "novel");
            seen = field(t3, "seen");
            open = true;
        } else if (tag == "ext") {
            if (!open) throw std::invalid_argument("model file: ext before ctx");
            std::string t1, t2;
            ls >> t1 >> t2;
            exts.emplace_back(static_cast<Sym>(std::stoul(t1)), field(t2, "c"));
        } else {
            throw std::invalid_argument("model file: unknown record: " + line);
        }
    }
    flush();
    model.finalize();
    ValidationReport report = model.validate();
    if (!report.pass())
        throw std::invalid_argument("model file: constraint violations:\n" + report.to_string());
    return model;
}

std::array<std::uint8_t, 32> ExtensionModel::digest() const {
    return Sha256::hash(serialize());
}

}  // namespace extlm
