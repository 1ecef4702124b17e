#include "polar/codec.hpp"

#include <stdexcept>

namespace polar {

namespace {
// In place: deinterleave (odd^even | even), then recurse on the halves.
void encode_rec(uint8_t* u, uint8_t* tmp, size_t len) {
    if (len == 1) return;
    size_t h = len / 2;
    for (size_t i = 0; i < h; ++i) {
        tmp[i] = static_cast<uint8_t>(u[2 * i] ^ u[2 * i + 1]);
        tmp[h + i] = u[2 * i + 1];
    }
    for (size_t i = 0; i < len; ++i) u[i] = tmp[i];
    encode_rec(u, tmp, h);
    encode_rec(u + h, tmp, h);
}
}  // namespace

BitVec polar_encode(const BitVec& u) {
    if (!is_power_of_two(u.size())) throw std::invalid_argument("length must be a power of two");
    BitVec x = u;
    BitVec tmp(u.size());
    encode_rec(x.data(), tmp.data(), x.size());
    return x;
}

BitVec crc_append(const BitVec& payload, const CrcSpec& crc) {
    if (payload.empty()) throw std::invalid_argument("payload must be non-empty");
    BitVec out = payload;
    BitVec check = crc_bits(crc, payload);
    out.insert(out.end(), check.begin(), check.end());
    return out;
}

bool crc_verify(const BitVec& bits, const CrcSpec& crc) { return crc_check(crc, bits); }

BitVec assemble_source(const CodeSpec& spec, const BitVec& info_bits) {
    if (info_bits.size() != spec.K) throw std::invalid_argument("info length must equal K");
    BitVec u = spec.frozen_at;
    for (size_t k = 0; k < spec.K; ++k) u[spec.info_set[k]] = info_bits[k];
    return u;
}

BitVec extract_info(const CodeSpec& spec, const BitVec& u_hat) {
    if (u_hat.size() != spec.N) throw std::invalid_argument("source word length must equal N");
    BitVec info(spec.K);
    for (size_t k = 0; k < spec.K; ++k) info[k] = u_hat[spec.info_set[k]];
    return info;
}

}  // namespace polar
