#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace extlm {

using Sym = std::uint16_t;
using SymbolSequence = std::vector<Sym>;

// Finite symbol set with a total byte -> symbol map.  Bytes outside the
// alphabet collapse onto a designated fallback symbol so that ingest
// never drops input.
class Alphabet {
public:
    // 69 printable ASCII characters (0x20..0x7e, uppercase folded onto
    // lowercase) plus one fallback symbol for everything else: m = 70.
    static Alphabet printable_ascii_casefolded_70();
    // Identity map over all 256 byte values.
    static Alphabet byte_256();
    // Explicit byte list; the first listed byte doubles as the fallback.
    static Alphabet custom(const std::vector<std::uint8_t>& symbols);
    // Parses a profile name ("printable-ascii-casefolded-70", "byte-256")
    // or "custom <escaped-byte>..." as written in model files.
    static Alphabet from_spec(std::string_view spec);

    std::size_t size() const { return names_.size(); }
    Sym map_byte(std::uint8_t b) const { return byte_map_[b]; }
    Sym fallback() const { return fallback_; }

    // Profile token(s) for the model-file "alphabet" line.
    std::string spec_string() const;
    // Printable rendering for reports ("a", "\x0a", "<?>").
    const std::string& symbol_name(Sym s) const { return names_[s]; }
    // Representative byte emitted when a symbol is written back out.
    // The 70-symbol profile renders its fallback as '\n'.
    std::uint8_t symbol_byte(Sym s) const { return sym_byte_[s]; }

    bool operator==(const Alphabet& o) const {
        return byte_map_ == o.byte_map_ && sym_byte_ == o.sym_byte_;
    }

private:
    Alphabet() = default;
    std::array<Sym, 256> byte_map_{};
    std::vector<std::uint8_t> sym_byte_;
    std::vector<std::string> names_;
    Sym fallback_ = 0;
    std::string profile_;
};

SymbolSequence ingest(std::span<const std::uint8_t> bytes, const Alphabet& a);
SymbolSequence ingest(std::string_view text, const Alphabet& a);

// Escapes a byte string for the line-oriented model format: bytes outside
// 0x21..0x7e, plus '\' itself, become "\xHH".
std::string escape_bytes(std::string_view raw);
std::string unescape_bytes(std::string_view escaped);

}  // namespace extlm
