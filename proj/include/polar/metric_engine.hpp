// Per-path decode state: log-domain metric planes and partial-sum planes
// over the n+1 recursion stages, shared between paths copy-on-fork.
//
// Stage s holds 2^(n-s) entries; entry beta covers channel indices
// [beta*2^s, (beta+1)*2^s). Stage 0 is the channel plane (never written
// after load), stage n is the decision point. A plane entry at stage s is
// the pair (log q(0), log q(1)) of the local subcode's posterior mass for
// the entry's next undecided local bit; the stage-n pair is therefore the
// full path metric of the two candidate extensions.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "polar/bits.hpp"

namespace polar {

class MetricEngine {
  public:
    explicit MetricEngine(int n);

    // Drops all live paths, loads channel LLRs, returns the root path slot
    // (metric 0 = log 1). Counters reset.
    size_t begin_decode(const std::vector<double>& channel_llr);

    // Refresh the recursion planes for this bit index and return the two
    // candidate path metrics (absolute natural-log) for u_hat = 0 / 1.
    // Must be called once per live path per bit, in bit order.
    std::pair<double, double> extend(size_t path, size_t bit_index);

    // Commit the bit: store the chosen metric, write the partial sum,
    // propagate partial sums on odd phases.
    void decide(size_t path, size_t bit_index, uint8_t bit, double new_metric);

    // Copy-on-fork clone; O(n) handle copies. Returns the new slot.
    size_t fork(size_t path);

    void release(size_t path);

    double metric(size_t path) const { return paths_[path].metric; }
    uint64_t path_id(size_t path) const { return paths_[path].id; }

    uint64_t metric_recursions() const { return metric_recursions_; }
    uint64_t path_copies() const { return path_copies_; }
    size_t live_paths() const { return live_paths_; }
    int order() const { return n_; }

    // Diagnostics / tests.
    uint8_t partial_sum(size_t path, int stage, size_t entry, int slot) const;
    // Stage-0 partial-sum bits (the re-encoded codeword once all N bits
    // are decided).
    BitVec stage0_bits(size_t path) const;

  private:
    struct Pool {
        size_t entry_count = 0;
        std::vector<uint32_t> refs;
        std::vector<uint32_t> free_list;
        uint32_t alloc();
        void retain(uint32_t h) { ++refs[h]; }
        // true when the last reference died
        bool drop(uint32_t h);
    };
    struct PPool : Pool {
        std::vector<double> data;  // plane h at data[h * entry_count * 2]
        double* at(uint32_t h) { return data.data() + size_t{h} * entry_count * 2; }
        const double* at(uint32_t h) const { return data.data() + size_t{h} * entry_count * 2; }
    };
    struct CPool : Pool {
        std::vector<uint8_t> data;
        uint8_t* at(uint32_t h) { return data.data() + size_t{h} * entry_count * 2; }
        const uint8_t* at(uint32_t h) const { return data.data() + size_t{h} * entry_count * 2; }
    };
    struct Path {
        std::vector<uint32_t> p;  // n+1 plane handles
        std::vector<uint32_t> c;
        double metric = 0.0;
        uint64_t id = 0;
        bool active = false;
    };

    size_t alloc_slot();
    // Refresh writes every entry of P_s, so detaching allocates a fresh
    // plane without copying the old contents.
    double* detach_p(size_t path, int stage);
    uint8_t* unique_c(size_t path, int stage);
    void refresh_stage(size_t path, int stage, uint64_t phase);
    void propagate(size_t path, int stage, uint64_t phase);

    int n_;
    std::vector<PPool> p_pools_;  // index = stage
    std::vector<CPool> c_pools_;
    std::vector<Path> paths_;
    std::vector<size_t> slot_free_;
    size_t live_paths_ = 0;
    uint64_t next_id_ = 0;
    uint64_t metric_recursions_ = 0;
    uint64_t path_copies_ = 0;
};

}  // namespace polar
