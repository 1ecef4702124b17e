// BPSK over AWGN (and a BEC option) producing channel LLRs.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "polar/bits.hpp"
#include "polar/rng.hpp"

namespace polar {

// sigma = (2 R 10^(EbN0/10))^(-1/2)
inline double ebn0_to_sigma(double ebn0_db, double code_rate) {
    if (!(code_rate > 0.0 && code_rate < 1.0))
        throw std::invalid_argument("code rate must be in (0,1)");
    return 1.0 / std::sqrt(2.0 * code_rate * std::pow(10.0, ebn0_db / 10.0));
}

struct ChannelModel {
    enum class Kind { BIAWGN, BEC } kind = Kind::BIAWGN;
    double sigma = 1.0;    // BIAWGN
    double epsilon = 0.0;  // BEC

    static ChannelModel awgn(double sigma) { return {Kind::BIAWGN, sigma, 0.0}; }
    static ChannelModel bec(double eps) { return {Kind::BEC, 1.0, eps}; }
};

// LLR magnitude standing in for an unerased BEC symbol's infinite LLR.
constexpr double kBecLlrSurrogate = 300.0;

struct ChannelObservation {
    std::vector<double> llr;     // llr_i = ln W(y_i|0)/W(y_i|1)
    std::vector<uint8_t> erased; // BEC only; empty for BIAWGN
};

// BPSK maps bit 0 -> +1, bit 1 -> -1; AWGN llr = 2y/sigma^2.
ChannelObservation transmit(const BitVec& x, const ChannelModel& model, RngStream& rng);

}  // namespace polar
