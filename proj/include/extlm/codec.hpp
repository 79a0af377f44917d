#pragma once

// Static range coder driven by an extension model.
//
// Each position's conditional distribution is quantized to 16-bit
// cumulative frequencies (total 2^16, at least one quantum per symbol)
// and fed to a 64-bit range coder.  Both sides derive the tables from
// the same model with the same pure-arithmetic code path, so encoder
// and decoder stay in lockstep; the header carries the model digest so
// a stream is refused under the wrong model.
//
// Stream layout: magic "EXMC1", 32-byte model digest, symbol count as
// 8 bytes big-endian, then the coder payload.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "extlm/model.hpp"

namespace extlm {

struct CodedStream {
    std::array<std::uint8_t, 32> model_digest{};
    std::uint64_t symbol_count = 0;
    std::vector<std::uint8_t> payload;

    std::size_t payload_bits() const { return payload.size() * 8; }
};

CodedStream encode(const ExtensionModel& model, const SymbolSequence& seq);

// Throws on digest mismatch or a malformed stream.
SymbolSequence decode(const ExtensionModel& model, const CodedStream& stream);

void write_stream(std::ostream& out, const CodedStream& stream);
CodedStream read_stream(std::istream& in);

// Quantization used by both directions, exposed for tests: maps a
// conditional distribution to cumulative counts cum[0..m] with
// cum[m] = 2^16 and every symbol's width >= 1.
std::vector<std::uint32_t> quantize_distribution(const std::vector<double>& dist);

}  // namespace extlm
