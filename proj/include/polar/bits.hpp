// Bit-sequence helpers shared across the library.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polar {

// One bit per element, values 0/1. Kept as uint8_t for cheap copies.
using BitVec = std::vector<uint8_t>;

inline bool is_power_of_two(size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(size_t v) {
    if (!is_power_of_two(v)) throw std::invalid_argument("length is not a power of two");
    int n = 0;
    while ((size_t{1} << n) < v) ++n;
    return n;
}

// Hex serialization, most-significant bit first: bit 0 of the sequence is the
// high bit of the first hex digit. Odd tails are zero-padded on the right.
inline std::string bits_to_hex(const BitVec& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (size_t i = 0; i < bits.size(); i += 4) {
        unsigned nib = 0;
        for (size_t j = 0; j < 4; ++j) {
            nib <<= 1;
            if (i + j < bits.size()) nib |= (bits[i + j] & 1u);
        }
        out.push_back(digits[nib]);
    }
    return out;
}

inline BitVec hex_to_bits(const std::string& hex, size_t nbits) {
    if (hex.size() * 4 < nbits)
        throw std::invalid_argument("hex string too short for requested bit count");
    BitVec bits(nbits, 0);
    for (size_t i = 0; i < nbits; ++i) {
        char c = hex[i / 4];
        unsigned nib;
        if (c >= '0' && c <= '9') nib = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') nib = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') nib = static_cast<unsigned>(c - 'A' + 10);
        else throw std::invalid_argument("invalid hex digit");
        bits[i] = static_cast<uint8_t>((nib >> (3 - i % 4)) & 1u);
    }
    return bits;
}

}  // namespace polar
