// SC and (CRC-aided) successive-cancellation list decoding with a pruning
// hook after the per-level sort.
#pragma once

#include <cstdint>
#include <vector>

#include "polar/bits.hpp"
#include "polar/channel.hpp"
#include "polar/code_spec.hpp"
#include "polar/metric_engine.hpp"
#include "polar/pruning.hpp"

namespace polar {

enum class DecodeStatus { SuccessCrc, SuccessMaxMetric, CrcFailAllPaths, ListEmptied };

struct ComplexityCounters {
    uint64_t metric_recursions = 0;
    uint64_t path_copies = 0;
    uint64_t sort_operations = 0;
    uint64_t pruned_paths = 0;
};

// Rolling fingerprint of a decided bit prefix; lets instrumentation name a
// path without storing its bits.
inline constexpr uint64_t kPrefixHashSeed = 0x9E3779B97F4A7C15ull;
inline uint64_t prefix_hash_extend(uint64_t h, uint8_t bit) {
    return detail::mix64(h + bit + 1);
}

// Optional per-decode instrumentation. Setting true_u enables the genie
// fields (simulation-only: tracks where the transmitted path sits in the
// list). All vectors are sized N by the decoder.
struct DecodeTrace {
    const BitVec* true_u = nullptr;
    bool want_survivors = false;

    std::vector<double> level_max_abs;    // max survivor metric (absolute log)
    std::vector<uint32_t> level_list_size;  // survivors after pruning
    std::vector<double> level_pde;        // running loss bound (dynamic policy)
    std::vector<uint8_t> genie_alive;     // true path still in the list
    std::vector<double> genie_ratio;      // P_true / sum P over survivors
    std::vector<double> genie_llr;        // decision LLR seen by the true path
    // per level: (prefix hash, absolute metric) of each survivor, hash-sorted
    std::vector<std::vector<std::pair<uint64_t, double>>> survivor_set;
};

struct DecodeOutcome {
    BitVec u_hat;       // length N
    BitVec info_bits;   // the K info-set positions of u_hat
    DecodeStatus status = DecodeStatus::SuccessMaxMetric;
    ComplexityCounters counters;
    double final_pde = 0.0;
};

// One decoder instance serves one thread; configuration is immutable after
// construction and decode() may be called any number of times.
class ListDecoder {
  public:
    ListDecoder(CodeSpec spec, size_t L, PrunePolicy policy, bool crc_selection);

    DecodeOutcome decode(const ChannelObservation& obs, DecodeTrace* trace = nullptr);

    const CodeSpec& spec() const { return spec_; }
    size_t list_size() const { return L_; }
    // Swap the policy between decodes (same code/L); used by sweeps that
    // rebuild budgets per SNR point.
    void set_policy(PrunePolicy policy) { policy_ = std::move(policy); }

  private:
    struct Candidate {
        size_t slot;
        uint64_t pid;
        uint8_t bit;
        uint8_t parent_true;
        double metric;
        uint64_t prefix_hash;
    };

    CodeSpec spec_;
    size_t L_;
    PrunePolicy policy_;
    bool crc_selection_;
    MetricEngine engine_;
    // scratch reused across decodes
    std::vector<Candidate> cands_;
    std::vector<size_t> live_;
};

// Plain successive cancellation (list machinery bypassed entirely).
class ScDecoder {
  public:
    explicit ScDecoder(CodeSpec spec);
    DecodeOutcome decode(const ChannelObservation& obs, DecodeTrace* trace = nullptr);
    const CodeSpec& spec() const { return spec_; }

  private:
    CodeSpec spec_;
    MetricEngine engine_;
};

// Simulation aid: walk the decoder recursion along the transmitted path and
// report the decision LLR at every level (used to check LLR budgets).
class PathProbe {
  public:
    explicit PathProbe(CodeSpec spec);
    // llrs[i] = metric(u_1^{i-1}, 0) - metric(u_1^{i-1}, 1) along true_u.
    const std::vector<double>& run(const ChannelObservation& obs, const BitVec& true_u);

  private:
    CodeSpec spec_;
    MetricEngine engine_;
    std::vector<double> llrs_;
};

}  // namespace polar
