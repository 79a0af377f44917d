#include "extlm/codec.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "extlm/sha256.hpp"

namespace extlm {

namespace {

constexpr std::uint32_t kTotalBits = 16;
constexpr std::uint32_t kTotal = 1u << kTotalBits;
constexpr std::uint64_t kRenormBound = 1ull << 56;
constexpr char kMagic[5] = {'E', 'X', 'M', 'C', '1'};

using u128 = unsigned __int128;

// Carry-aware range encoder: 64-bit range, byte renormalization, carries
// rippled into the already-emitted bytes.
class RangeEncoder {
public:
    explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

    void encode(std::uint32_t cum, std::uint32_t freq) {
        std::uint64_t r = range_ >> kTotalBits;
        low_ += static_cast<u128>(r) * cum;
        range_ = r * freq;
        carry();
        while (range_ < kRenormBound) {
            out_.push_back(static_cast<std::uint8_t>(low_ >> 56));
            low_ = (low_ << 8) & kLowMask;
            range_ <<= 8;
        }
    }

    void finish() {
        // Choose the value in [low, low+range) with the most trailing
        // zeros; only its leading bytes need to be written, the decoder
        // pads with zeros.
        for (int k = 63; k >= 0; --k) {
            u128 step = u128(1) << k;
            u128 target = (low_ + step - 1) & ~(step - 1);
            if (target < low_ + range_) {
                low_ = target;
                carry();
                int bytes = (64 - k + 7) / 8;
                for (int i = 0; i < bytes; ++i) {
                    out_.push_back(static_cast<std::uint8_t>(low_ >> 56));
                    low_ = (low_ << 8) & kLowMask;
                }
                return;
            }
        }
    }

private:
    static constexpr u128 kLowMask = (u128(1) << 64) - 1;

    void carry() {
        if (low_ >> 64) {
            for (std::size_t i = out_.size(); i-- > 0;) {
                if (++out_[i] != 0) break;
            }
            low_ &= kLowMask;
        }
    }

    std::vector<std::uint8_t>& out_;
    u128 low_ = 0;
    std::uint64_t range_ = ~0ull;
};

class RangeDecoder {
public:
    explicit RangeDecoder(const std::vector<std::uint8_t>& in) : in_(in) {
        for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
    }

    std::uint32_t decode_cum() {
        std::uint64_t r = range_ >> kTotalBits;
        std::uint64_t v = code_ / r;
        return static_cast<std::uint32_t>(std::min<std::uint64_t>(v, kTotal - 1));
    }

    void consume(std::uint32_t cum, std::uint32_t freq) {
        std::uint64_t r = range_ >> kTotalBits;
        code_ -= r * cum;
        range_ = r * freq;
        while (range_ < kRenormBound) {
            code_ = (code_ << 8) | next_byte();
            range_ <<= 8;
        }
    }

private:
    std::uint8_t next_byte() { return pos_ < in_.size() ? in_[pos_++] : 0; }

    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
    std::uint64_t code_ = 0;
    std::uint64_t range_ = ~0ull;
};

}  // namespace

std::vector<std::uint32_t> quantize_distribution(const std::vector<double>& dist) {
    std::size_t m = dist.size();
    if (m == 0 || m > kTotal) throw std::invalid_argument("quantize: bad alphabet size");
    std::vector<std::uint32_t> width(m);
    std::int64_t sum = 0;
    for (std::size_t s = 0; s < m; ++s) {
        double scaled = dist[s] * static_cast<double>(kTotal);
        auto w = static_cast<std::uint32_t>(scaled > 0.0 ? scaled : 0.0);
        if (w < 1) w = 1;  // every symbol stays decodable
        width[s] = w;
        sum += w;
    }
    // Settle the residue against the target total, largest deficit (or
    // excess) first, ties to the lowest symbol.
    while (sum != kTotal) {
        std::size_t pick = m;
        double best = 0.0;
        if (sum < kTotal) {
            best = -1e300;
            for (std::size_t s = 0; s < m; ++s) {
                double deficit = dist[s] * kTotal - static_cast<double>(width[s]);
                if (deficit > best) { best = deficit; pick = s; }
            }
            ++width[pick];
            ++sum;
        } else {
            best = -1e300;
            for (std::size_t s = 0; s < m; ++s) {
                if (width[s] <= 1) continue;
                double excess = static_cast<double>(width[s]) - dist[s] * kTotal;
                if (excess > best) { best = excess; pick = s; }
            }
            if (pick == m) throw std::logic_error("quantize: cannot settle total");
            --width[pick];
            --sum;
        }
    }
    std::vector<std::uint32_t> cum(m + 1, 0);
    for (std::size_t s = 0; s < m; ++s) cum[s + 1] = cum[s] + width[s];
    return cum;
}

namespace {

// Per-context cumulative tables, built lazily: the stitched conditional
// distribution depends only on the longest in-dictionary suffix.
class TableCache {
public:
    explicit TableCache(const ExtensionModel& model)
        : model_(model), tables_(model.context_count()) {}

    const std::vector<std::uint32_t>& table_for(std::span<const Sym> history) {
        int e = model_.longest_suffix_entry(history);
        auto& slot = tables_[e];
        if (slot.empty()) slot = quantize_distribution(model_.entry(e).dist);
        return slot;
    }

private:
    const ExtensionModel& model_;
    std::vector<std::vector<std::uint32_t>> tables_;
};

}  // namespace

CodedStream encode(const ExtensionModel& model, const SymbolSequence& seq) {
    for (Sym s : seq)
        if (s >= model.m()) throw std::invalid_argument("encode: symbol outside alphabet");
    CodedStream stream;
    stream.model_digest = model.digest();
    stream.symbol_count = seq.size();
    TableCache cache(model);
    RangeEncoder enc(stream.payload);
    std::size_t max_len = model.max_context_length();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        std::size_t lo = i > max_len ? i - max_len : 0;
        const auto& cum = cache.table_for(std::span<const Sym>(seq.data() + lo, i - lo));
        Sym s = seq[i];
        enc.encode(cum[s], cum[s + 1] - cum[s]);
    }
    if (!seq.empty()) enc.finish();
    return stream;
}

SymbolSequence decode(const ExtensionModel& model, const CodedStream& stream) {
    if (stream.model_digest != model.digest())
        throw std::invalid_argument("decode: stream was coded under a different model");
    SymbolSequence out;
    out.reserve(stream.symbol_count);
    TableCache cache(model);
    RangeDecoder dec(stream.payload);
    std::size_t max_len = model.max_context_length();
    for (std::uint64_t i = 0; i < stream.symbol_count; ++i) {
        std::size_t lo = out.size() > max_len ? out.size() - max_len : 0;
        const auto& cum = cache.table_for(std::span<const Sym>(out.data() + lo, out.size() - lo));
        std::uint32_t v = dec.decode_cum();
        auto it = std::upper_bound(cum.begin(), cum.end(), v);
        Sym s = static_cast<Sym>((it - cum.begin()) - 1);
        dec.consume(cum[s], cum[s + 1] - cum[s]);
        out.push_back(s);
    }
    return out;
}

void write_stream(std::ostream& out, const CodedStream& stream) {
    out.write(kMagic, 5);
    out.write(reinterpret_cast<const char*>(stream.model_digest.data()), 32);
    for (int i = 7; i >= 0; --i)
        out.put(static_cast<char>((stream.symbol_count >> (8 * i)) & 0xff));
    out.write(reinterpret_cast<const char*>(stream.payload.data()),
              static_cast<std::streamsize>(stream.payload.size()));
}

CodedStream read_stream(std::istream& in) {
    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
        throw std::invalid_argument("coded stream: bad magic");
    CodedStream stream;
    if (!in.read(reinterpret_cast<char*>(stream.model_digest.data()), 32))
        throw std::invalid_argument("coded stream: truncated header");
    stream.symbol_count = 0;
    for (int i = 0; i < 8; ++i) {
        int c = in.get();
        if (c == EOF) throw std::invalid_argument("coded stream: truncated header");
        stream.symbol_count = (stream.symbol_count << 8) | static_cast<std::uint8_t>(c);
    }
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        stream.payload.insert(stream.payload.end(), buf, buf + in.gcount());
        if (!in) break;
    }
    return stream;
}

}  // namespace extlm
