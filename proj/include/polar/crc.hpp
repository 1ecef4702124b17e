// Bitwise CRC over bit sequences, MSB-first, parameterizable polynomial.
#pragma once

#include <cstdint>
#include <optional>

#include "polar/bits.hpp"

namespace polar {

struct CrcSpec {
    uint32_t poly = 0x1021;   // normal form, implicit leading 1
    int width = 16;
    uint32_t init = 0xFFFF;
    uint32_t xorout = 0x0000;

    static CrcSpec ccitt16() { return CrcSpec{}; }

    bool operator==(const CrcSpec&) const = default;
};

// CRC register value after feeding `bits` MSB-first. No reflection.
uint32_t crc_compute(const CrcSpec& spec, const BitVec& bits);

// The `width` CRC bits as a bit vector, most significant first.
BitVec crc_bits(const CrcSpec& spec, const BitVec& payload);

// True iff `bits` = payload || crc(payload).
bool crc_check(const CrcSpec& spec, const BitVec& bits_with_crc);

}  // namespace polar
