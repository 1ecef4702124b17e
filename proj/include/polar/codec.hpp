// Polar transform and source-word assembly.
#pragma once

#include "polar/bits.hpp"
#include "polar/code_spec.hpp"

namespace polar {

// x = (encode(u_odd ^ u_even), encode(u_even)), where u_odd are the
// 1st, 3rd, ... elements. Self-inverse: polar_encode(polar_encode(u)) = u.
BitVec polar_encode(const BitVec& u);

// payload || CRC bits.
BitVec crc_append(const BitVec& payload, const CrcSpec& crc);
bool crc_verify(const BitVec& bits, const CrcSpec& crc);

// Scatter info bits (payload [+ CRC], in info-set order) into a length-N
// source word, frozen positions filled from the spec.
BitVec assemble_source(const CodeSpec& spec, const BitVec& info_bits);
// Gather the K info-set positions back out of a decoded source word.
BitVec extract_info(const CodeSpec& spec, const BitVec& u_hat);

}  // namespace polar
