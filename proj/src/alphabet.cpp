#include "extlm/alphabet.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace extlm {

namespace {

std::string printable_name(std::uint8_t b) {
    if (b >= 0x21 && b <= 0x7e) return std::string(1, static_cast<char>(b));
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02x", b);
    return buf;
}

}  // namespace

Alphabet Alphabet::printable_ascii_casefolded_70() {
    Alphabet a;
    a.profile_ = "printable-ascii-casefolded-70";
    for (int b = 0x20; b <= 0x7e; ++b) {
        if (b >= 'A' && b <= 'Z') continue;
        a.byte_map_[b] = static_cast<Sym>(a.names_.size());
        a.sym_byte_.push_back(static_cast<std::uint8_t>(b));
        a.names_.push_back(printable_name(static_cast<std::uint8_t>(b)));
    }
    Sym fallback = static_cast<Sym>(a.names_.size());
    a.sym_byte_.push_back('\n');
    a.names_.push_back("<?>");
    a.fallback_ = fallback;
    for (int b = 0; b < 256; ++b) {
        if (b >= 'A' && b <= 'Z')
            a.byte_map_[b] = a.byte_map_[b - 'A' + 'a'];
        else if (!(b >= 0x20 && b <= 0x7e))
            a.byte_map_[b] = fallback;
    }
    return a;
}

Alphabet Alphabet::byte_256() {
    Alphabet a;
    a.profile_ = "byte-256";
    a.names_.reserve(256);
    for (int b = 0; b < 256; ++b) {
        a.byte_map_[b] = static_cast<Sym>(b);
        a.sym_byte_.push_back(static_cast<std::uint8_t>(b));
        a.names_.push_back(printable_name(static_cast<std::uint8_t>(b)));
    }
    a.fallback_ = 0;
    return a;
}

Alphabet Alphabet::custom(const std::vector<std::uint8_t>& symbols) {
    if (symbols.empty()) throw std::invalid_argument("custom alphabet: empty symbol list");
    std::set<std::uint8_t> uniq(symbols.begin(), symbols.end());
    if (uniq.size() != symbols.size())
        throw std::invalid_argument("custom alphabet: duplicate symbol");
    Alphabet a;
    a.profile_ = "custom";
    a.fallback_ = 0;
    a.byte_map_.fill(0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        a.sym_byte_.push_back(symbols[i]);
        a.names_.push_back(printable_name(symbols[i]));
    }
    for (std::size_t i = 0; i < symbols.size(); ++i)
        a.byte_map_[symbols[i]] = static_cast<Sym>(i);
    return a;
}

Alphabet Alphabet::from_spec(std::string_view spec) {
    std::istringstream in{std::string(spec)};
    std::string head;
    in >> head;
    if (head == "printable-ascii-casefolded-70") return printable_ascii_casefolded_70();
    if (head == "byte-256") return byte_256();
    if (head == "custom") {
        std::vector<std::uint8_t> symbols;
        std::string tok;
        while (in >> tok) {
            std::string raw = unescape_bytes(tok);
            for (char c : raw) symbols.push_back(static_cast<std::uint8_t>(c));
        }
        return custom(symbols);
    }
    throw std::invalid_argument("unknown alphabet profile: " + head);
}

std::string Alphabet::spec_string() const {
    if (profile_ != "custom") return profile_;
    std::string out = "custom";
    for (std::uint8_t b : sym_byte_) {
        out += ' ';
        out += escape_bytes(std::string_view(reinterpret_cast<const char*>(&b), 1));
    }
    return out;
}

SymbolSequence ingest(std::span<const std::uint8_t> bytes, const Alphabet& a) {
    SymbolSequence out;
    out.reserve(bytes.size());
    for (std::uint8_t b : bytes) out.push_back(a.map_byte(b));
    return out;
}

SymbolSequence ingest(std::string_view text, const Alphabet& a) {
    return ingest(std::span<const std::uint8_t>(
                      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
                  a);
}

std::string escape_bytes(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        auto b = static_cast<std::uint8_t>(c);
        if (b >= 0x21 && b <= 0x7e && b != '\\') {
            out.push_back(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", b);
            out += buf;
        }
    }
    return out;
}

std::string unescape_bytes(std::string_view escaped) {
    std::string out;
    for (std::size_t i = 0; i < escaped.size();) {
        if (escaped[i] == '\\') {
            if (i + 3 >= escaped.size() || escaped[i + 1] != 'x')
                throw std::invalid_argument("bad escape in: " + std::string(escaped));
            out.push_back(static_cast<char>(
                std::stoi(std::string(escaped.substr(i + 2, 2)), nullptr, 16)));
            i += 4;
        } else {
            out.push_back(escaped[i++]);
        }
    }
    return out;
}

}  // namespace extlm
