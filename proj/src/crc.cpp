#include "polar/crc.hpp"

namespace polar {

uint32_t crc_compute(const CrcSpec& spec, const BitVec& bits) {
    const uint32_t mask = (spec.width == 32) ? 0xFFFFFFFFu : ((1u << spec.width) - 1);
    uint32_t reg = spec.init & mask;
    for (uint8_t b : bits) {
        uint32_t fb = ((reg >> (spec.width - 1)) ^ (b & 1u)) & 1u;
        reg = (reg << 1) & mask;
        if (fb) reg ^= spec.poly & mask;
    }
    return (reg ^ spec.xorout) & mask;
}

BitVec crc_bits(const CrcSpec& spec, const BitVec& payload) {
    uint32_t v = crc_compute(spec, payload);
    BitVec out(static_cast<size_t>(spec.width));
    for (int i = 0; i < spec.width; ++i)
        out[static_cast<size_t>(i)] = static_cast<uint8_t>((v >> (spec.width - 1 - i)) & 1u);
    return out;
}

bool crc_check(const CrcSpec& spec, const BitVec& bits_with_crc) {
    if (bits_with_crc.size() < static_cast<size_t>(spec.width)) return false;
    size_t split = bits_with_crc.size() - static_cast<size_t>(spec.width);
    BitVec payload(bits_with_crc.begin(), bits_with_crc.begin() + static_cast<long>(split));
    BitVec expect = crc_bits(spec, payload);
    for (int i = 0; i < spec.width; ++i)
        if (expect[static_cast<size_t>(i)] != bits_with_crc[split + static_cast<size_t>(i)])
            return false;
    return true;
}

}  // namespace polar
