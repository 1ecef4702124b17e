#include "polar/metric_engine.hpp"

#include <bit>
#include <stdexcept>

#include "polar/log_domain.hpp"

namespace polar {

uint32_t MetricEngine::Pool::alloc() {
    if (!free_list.empty()) {
        uint32_t h = free_list.back();
        free_list.pop_back();
        refs[h] = 1;
        return h;
    }
    uint32_t h = static_cast<uint32_t>(refs.size());
    refs.push_back(1);
    return h;
}

bool MetricEngine::Pool::drop(uint32_t h) {
    if (--refs[h] == 0) {
        free_list.push_back(h);
        return true;
    }
    return false;
}

MetricEngine::MetricEngine(int n) : n_(n) {
    if (n < 0 || n > 20) throw std::invalid_argument("n out of supported range");
    p_pools_.resize(static_cast<size_t>(n) + 1);
    c_pools_.resize(static_cast<size_t>(n) + 1);
    for (int s = 0; s <= n; ++s) {
        size_t entries = size_t{1} << (n - s);
        p_pools_[static_cast<size_t>(s)].entry_count = entries;
        c_pools_[static_cast<size_t>(s)].entry_count = entries;
    }
}

size_t MetricEngine::alloc_slot() {
    if (!slot_free_.empty()) {
        size_t s = slot_free_.back();
        slot_free_.pop_back();
        return s;
    }
    paths_.emplace_back();
    return paths_.size() - 1;
}

size_t MetricEngine::begin_decode(const std::vector<double>& channel_llr) {
    if (channel_llr.size() != (size_t{1} << n_))
        throw std::invalid_argument("channel LLR length must be 2^n");
    for (size_t s = 0; s < paths_.size(); ++s)
        if (paths_[s].active) release(s);
    metric_recursions_ = 0;
    path_copies_ = 0;
    next_id_ = 0;

    size_t slot = alloc_slot();
    Path& p = paths_[slot];
    p.p.resize(static_cast<size_t>(n_) + 1);
    p.c.resize(static_cast<size_t>(n_) + 1);
    for (int s = 0; s <= n_; ++s) {
        auto& pp = p_pools_[static_cast<size_t>(s)];
        auto& cp = c_pools_[static_cast<size_t>(s)];
        uint32_t ph = pp.alloc();
        uint32_t ch = cp.alloc();
        pp.data.resize(pp.refs.size() * pp.entry_count * 2);
        cp.data.resize(cp.refs.size() * cp.entry_count * 2);
        p.p[static_cast<size_t>(s)] = ph;
        p.c[static_cast<size_t>(s)] = ch;
    }
    double* ch0 = p_pools_[0].at(p.p[0]);
    for (size_t i = 0; i < channel_llr.size(); ++i) {
        ch0[2 * i] = log_sigmoid(channel_llr[i]);
        ch0[2 * i + 1] = log_sigmoid(-channel_llr[i]);
    }
    p.metric = 0.0;
    p.id = next_id_++;
    p.active = true;
    ++live_paths_;
    return slot;
}

double* MetricEngine::detach_p(size_t path, int stage) {
    auto& pool = p_pools_[static_cast<size_t>(stage)];
    uint32_t h = paths_[path].p[static_cast<size_t>(stage)];
    if (pool.refs[h] > 1) {
        pool.drop(h);
        h = pool.alloc();
        pool.data.resize(pool.refs.size() * pool.entry_count * 2);
        paths_[path].p[static_cast<size_t>(stage)] = h;
    }
    return pool.at(h);
}

uint8_t* MetricEngine::unique_c(size_t path, int stage) {
    auto& pool = c_pools_[static_cast<size_t>(stage)];
    uint32_t h = paths_[path].c[static_cast<size_t>(stage)];
    if (pool.refs[h] > 1) {
        pool.drop(h);
        uint32_t nh = pool.alloc();
        pool.data.resize(pool.refs.size() * pool.entry_count * 2);
        const uint8_t* src = pool.at(h);
        uint8_t* dst = pool.at(nh);
        for (size_t i = 0; i < pool.entry_count * 2; ++i) dst[i] = src[i];
        paths_[path].c[static_cast<size_t>(stage)] = nh;
        return dst;
    }
    return pool.at(h);
}

void MetricEngine::refresh_stage(size_t path, int stage, uint64_t phase) {
    const size_t entries = size_t{1} << (n_ - stage);
    const double* child =
        p_pools_[static_cast<size_t>(stage - 1)].at(paths_[path].p[static_cast<size_t>(stage - 1)]);
    double* out = detach_p(path, stage);
    if ((phase & 1) == 0) {
        // Both child bits open: marginalize the second one out.
        for (size_t b = 0; b < entries; ++b) {
            const double* a = child + 4 * b;      // entry 2b
            const double* c = child + 4 * b + 2;  // entry 2b+1
            out[2 * b] = log_sum_exp(a[0] + c[0], a[1] + c[1]);
            out[2 * b + 1] = log_sum_exp(a[1] + c[0], a[0] + c[1]);
        }
    } else {
        // First local bit u settled (partial-sum slot 0): plain product.
        const uint8_t* cbits =
            c_pools_[static_cast<size_t>(stage)].at(paths_[path].c[static_cast<size_t>(stage)]);
        for (size_t b = 0; b < entries; ++b) {
            const double* a = child + 4 * b;
            const double* c = child + 4 * b + 2;
            uint8_t u = cbits[2 * b];
            out[2 * b] = a[u] + c[0];
            out[2 * b + 1] = a[u ^ 1] + c[1];
        }
    }
    metric_recursions_ += entries;
}

std::pair<double, double> MetricEngine::extend(size_t path, size_t bit_index) {
    // Stages n-k..n need fresh planes, where k counts the trailing zeros
    // of the bit index (all of them for bit 0). The lowest refreshed stage
    // sits at an odd local phase, the ones above at even phases.
    int lowest;
    if (bit_index == 0) {
        lowest = 1;
    } else {
        int k = std::countr_zero(bit_index);
        lowest = n_ - k;
    }
    for (int s = lowest; s <= n_; ++s) {
        uint64_t phase = bit_index >> (n_ - s);
        refresh_stage(path, s, phase);
    }
    const double* top = p_pools_[static_cast<size_t>(n_)].at(paths_[path].p[static_cast<size_t>(n_)]);
    return {top[0], top[1]};
}

void MetricEngine::propagate(size_t path, int stage, uint64_t phase) {
    // phase (local to `stage`) is odd: both slots of C_stage are settled,
    // push them one stage toward the channel.
    uint64_t psi = phase >> 1;
    const size_t entries = size_t{1} << (n_ - stage);
    const uint8_t* src =
        c_pools_[static_cast<size_t>(stage)].at(paths_[path].c[static_cast<size_t>(stage)]);
    uint8_t* dst = unique_c(path, stage - 1);
    int slot = static_cast<int>(psi & 1);
    for (size_t b = 0; b < entries; ++b) {
        dst[2 * (2 * b) + slot] = static_cast<uint8_t>(src[2 * b] ^ src[2 * b + 1]);
        dst[2 * (2 * b + 1) + slot] = src[2 * b + 1];
    }
    if ((psi & 1) && stage - 1 >= 1) propagate(path, stage - 1, psi);
}

void MetricEngine::decide(size_t path, size_t bit_index, uint8_t bit, double new_metric) {
    uint8_t* top = unique_c(path, n_);
    top[bit_index & 1] = bit;
    paths_[path].metric = new_metric;
    if (bit_index & 1) propagate(path, n_, bit_index);
}

size_t MetricEngine::fork(size_t path) {
    size_t slot = alloc_slot();
    Path& src = paths_[path];
    Path& dst = paths_[slot];
    dst.p = src.p;
    dst.c = src.c;
    for (int s = 0; s <= n_; ++s) {
        p_pools_[static_cast<size_t>(s)].retain(dst.p[static_cast<size_t>(s)]);
        c_pools_[static_cast<size_t>(s)].retain(dst.c[static_cast<size_t>(s)]);
    }
    dst.metric = src.metric;
    dst.id = next_id_++;
    dst.active = true;
    ++live_paths_;
    ++path_copies_;
    return slot;
}

void MetricEngine::release(size_t path) {
    Path& p = paths_[path];
    if (!p.active) return;
    for (int s = 0; s <= n_; ++s) {
        p_pools_[static_cast<size_t>(s)].drop(p.p[static_cast<size_t>(s)]);
        c_pools_[static_cast<size_t>(s)].drop(p.c[static_cast<size_t>(s)]);
    }
    p.active = false;
    --live_paths_;
    slot_free_.push_back(path);
}

uint8_t MetricEngine::partial_sum(size_t path, int stage, size_t entry, int slot) const {
    return c_pools_[static_cast<size_t>(stage)].at(
        paths_[path].c[static_cast<size_t>(stage)])[2 * entry + slot];
}

BitVec MetricEngine::stage0_bits(size_t path) const {
    const size_t N = size_t{1} << n_;
    BitVec out(N);
    const uint8_t* c0 = c_pools_[0].at(paths_[path].c[0]);
    for (size_t i = 0; i < N; ++i) out[i] = c0[2 * i];
    return out;
}

}  // namespace polar
