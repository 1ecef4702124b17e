#include "polar/list_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polar/codec.hpp"
#include "polar/log_domain.hpp"
#include "polar/rng.hpp"

namespace polar {

namespace {
template <typename T>
void ensure_slot(std::vector<T>& v, size_t slot, T fill = T{}) {
    if (v.size() <= slot) v.resize(slot + 1, fill);
}
}  // namespace

ListDecoder::ListDecoder(CodeSpec spec, size_t L, PrunePolicy policy, bool crc_selection)
    : spec_(std::move(spec)),
      L_(L),
      policy_(std::move(policy)),
      crc_selection_(crc_selection),
      engine_(spec_.n) {
    if (L_ < 1) throw std::invalid_argument("list size must be >= 1");
    if (crc_selection_ && !spec_.crc)
        throw std::invalid_argument("CRC-aided selection needs a CRC in the code spec");
}

DecodeOutcome ListDecoder::decode(const ChannelObservation& obs, DecodeTrace* trace) {
    const size_t N = spec_.N;
    if (obs.llr.size() != N) throw std::invalid_argument("observation length must be N");

    size_t root = engine_.begin_decode(obs.llr);
    live_.clear();
    live_.push_back(root);

    const bool genie = trace && trace->true_u;
    const bool hashes = trace && trace->want_survivors;
    if (trace) {
        trace->level_max_abs.assign(N, 0.0);
        trace->level_list_size.assign(N, 0);
        trace->level_pde.assign(N, 0.0);
        trace->genie_alive.assign(N, 0);
        trace->genie_ratio.assign(N, -1.0);
        trace->genie_llr.assign(N, std::numeric_limits<double>::quiet_NaN());
        trace->survivor_set.assign(hashes ? N : 0, {});
    }
    std::vector<uint8_t> true_flag;
    std::vector<uint64_t> hash;
    ensure_slot(true_flag, root);
    ensure_slot(hash, root);
    true_flag[root] = 1;
    hash[root] = kPrefixHashSeed;

    PruneSession session(&policy_, L_);
    ComplexityCounters counters;
    bool emptied = false;

    std::vector<double> abs_m, norms;
    std::vector<size_t> drop;
    std::vector<Candidate> surv;
    std::vector<uint8_t> cnt, seen;
    std::vector<size_t> child_of, new_live;

    for (size_t i = 0; i < N && !emptied; ++i) {
        const bool frozen = spec_.frozen_mask[i];
        cands_.clear();
        for (size_t slot : live_) {
            auto [m0, m1] = engine_.extend(slot, i);
            uint64_t pid = engine_.path_id(slot);
            uint8_t pt = genie ? true_flag[slot] : uint8_t{0};
            uint64_t h = hashes ? hash[slot] : 0;
            if (genie && pt) trace->genie_llr[i] = m0 - m1;
            if (frozen) {
                uint8_t b = spec_.frozen_at[i];
                cands_.push_back({slot, pid, b, pt, b ? m1 : m0, h});
            } else {
                cands_.push_back({slot, pid, 0, pt, m0, h});
                cands_.push_back({slot, pid, 1, pt, m1, h});
            }
        }
        if (cands_.size() >= 2) {
            ++counters.sort_operations;
            std::stable_sort(cands_.begin(), cands_.end(),
                             [](const Candidate& a, const Candidate& b) {
                                 if (a.metric != b.metric) return a.metric > b.metric;
                                 if (a.pid != b.pid) return a.pid < b.pid;
                                 return a.bit < b.bit;
                             });
        }
        const size_t keep = std::min(L_, cands_.size());
        const double offset = cands_[0].metric;
        if (is_log_zero(offset)) {
            emptied = true;
            break;
        }
        abs_m.resize(keep);
        norms.resize(keep);
        for (size_t j = 0; j < keep; ++j) {
            abs_m[j] = cands_[j].metric;
            norms[j] = cands_[j].metric - offset;
        }

        session.level(i + 1, abs_m, norms, drop);
        counters.pruned_paths += drop.size();

        surv.clear();
        {
            size_t di = 0;
            for (size_t j = 0; j < keep; ++j) {
                if (di < drop.size() && drop[di] == j) {
                    ++di;
                    continue;
                }
                surv.push_back(cands_[j]);
            }
        }
        if (surv.empty()) {
            emptied = true;
            break;
        }

        if (trace) {
            trace->level_max_abs[i] = cands_[0].metric;
            trace->level_list_size[i] = static_cast<uint32_t>(surv.size());
            trace->level_pde[i] = session.pde();
            if (genie) {
                double lse = kLogZeroFloor;
                double true_norm = 0.0;
                bool found = false;
                for (const auto& c : surv) {
                    double nv = c.metric - offset;
                    lse = log_sum_exp(lse, nv);
                    if (c.parent_true && c.bit == (*trace->true_u)[i]) {
                        true_norm = nv;
                        found = true;
                    }
                }
                if (found) {
                    trace->genie_alive[i] = 1;
                    trace->genie_ratio[i] = std::exp(true_norm - lse);
                }
            }
            if (hashes) {
                auto& hs = trace->survivor_set[i];
                hs.clear();
                for (const auto& c : surv)
                    hs.emplace_back(prefix_hash_extend(c.prefix_hash, c.bit), c.metric);
                std::sort(hs.begin(), hs.end());
            }
        }

        // Fork first encounters of doubly-surviving parents, then commit
        // every survivor's bit on its own slot.
        for (const auto& c : surv) {
            ensure_slot(cnt, c.slot);
            ensure_slot(seen, c.slot);
            cnt[c.slot] = 0;
            seen[c.slot] = 0;
        }
        for (const auto& c : surv) ++cnt[c.slot];
        new_live.clear();
        for (const auto& c : surv) {
            size_t target;
            if (cnt[c.slot] == 1) {
                target = c.slot;
            } else if (!seen[c.slot]) {
                seen[c.slot] = 1;
                size_t child = engine_.fork(c.slot);
                ensure_slot(child_of, c.slot);
                child_of[c.slot] = child;
                target = c.slot;
            } else {
                target = child_of[c.slot];
            }
            engine_.decide(target, i, c.bit, c.metric);
            new_live.push_back(target);
            if (genie) {
                ensure_slot(true_flag, target);
                true_flag[target] =
                    static_cast<uint8_t>(c.parent_true && c.bit == (*trace->true_u)[i]);
            }
            if (hashes) {
                ensure_slot(hash, target);
                hash[target] = prefix_hash_extend(c.prefix_hash, c.bit);
            }
        }
        for (size_t slot : live_) {
            bool survived = false;
            for (size_t t : new_live)
                if (t == slot) {
                    survived = true;
                    break;
                }
            if (!survived) engine_.release(slot);
        }
        live_.swap(new_live);
    }

    DecodeOutcome out;
    out.counters = counters;
    out.counters.metric_recursions = engine_.metric_recursions();
    out.counters.path_copies = engine_.path_copies();
    out.final_pde = session.pde();

    if (emptied || live_.empty()) {
        out.status = DecodeStatus::ListEmptied;
        out.u_hat.assign(N, 0);
        out.info_bits.assign(spec_.K, 0);
        return out;
    }

    // live_ is in descending metric order from the last level's sort.
    auto source_word = [&](size_t slot) { return polar_encode(engine_.stage0_bits(slot)); };
    if (crc_selection_) {
        for (size_t slot : live_) {
            BitVec u = source_word(slot);
            BitVec info = extract_info(spec_, u);
            if (crc_verify(info, *spec_.crc)) {
                out.u_hat = std::move(u);
                out.info_bits = std::move(info);
                out.status = DecodeStatus::SuccessCrc;
                return out;
            }
        }
        out.u_hat = source_word(live_[0]);
        out.info_bits = extract_info(spec_, out.u_hat);
        out.status = DecodeStatus::CrcFailAllPaths;
        return out;
    }
    out.u_hat = source_word(live_[0]);
    out.info_bits = extract_info(spec_, out.u_hat);
    out.status = DecodeStatus::SuccessMaxMetric;
    return out;
}

PathProbe::PathProbe(CodeSpec spec) : spec_(std::move(spec)), engine_(spec_.n) {}

const std::vector<double>& PathProbe::run(const ChannelObservation& obs, const BitVec& true_u) {
    const size_t N = spec_.N;
    size_t slot = engine_.begin_decode(obs.llr);
    llrs_.resize(N);
    for (size_t i = 0; i < N; ++i) {
        auto [m0, m1] = engine_.extend(slot, i);
        llrs_[i] = m0 - m1;
        uint8_t b = true_u[i];
        engine_.decide(slot, i, b, b ? m1 : m0);
    }
    return llrs_;
}

ScDecoder::ScDecoder(CodeSpec spec) : spec_(std::move(spec)), engine_(spec_.n) {}

DecodeOutcome ScDecoder::decode(const ChannelObservation& obs, DecodeTrace* trace) {
    const size_t N = spec_.N;
    if (obs.llr.size() != N) throw std::invalid_argument("observation length must be N");
    size_t slot = engine_.begin_decode(obs.llr);
    DecodeOutcome out;
    if (trace) {
        trace->level_max_abs.assign(N, 0.0);
        trace->level_list_size.assign(N, 1);
        trace->level_pde.assign(N, 0.0);
        trace->genie_alive.assign(N, 0);
        trace->genie_ratio.assign(N, -1.0);
        trace->genie_llr.assign(N, std::numeric_limits<double>::quiet_NaN());
    }
    for (size_t i = 0; i < N; ++i) {
        auto [m0, m1] = engine_.extend(slot, i);
        uint8_t b;
        double m;
        if (spec_.frozen_mask[i]) {
            b = spec_.frozen_at[i];
            m = b ? m1 : m0;
        } else {
            ++out.counters.sort_operations;
            b = (m0 >= m1) ? 0 : 1;
            m = (m0 >= m1) ? m0 : m1;
        }
        engine_.decide(slot, i, b, m);
        if (trace) trace->level_max_abs[i] = m;
    }
    out.u_hat = polar_encode(engine_.stage0_bits(slot));
    out.info_bits = extract_info(spec_, out.u_hat);
    out.status = DecodeStatus::SuccessMaxMetric;
    out.counters.metric_recursions = engine_.metric_recursions();
    out.counters.path_copies = engine_.path_copies();
    return out;
}

}  // namespace polar
