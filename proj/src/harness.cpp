#include "polar/harness.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "polar/channel.hpp"
#include "polar/codec.hpp"
#include "polar/rng.hpp"

namespace polar {

PrunePolicy build_policy(const PruneConfig& pc, const CodeSpec& spec, double ebn0_db) {
    switch (pc.kind) {
        case PrunePolicy::Kind::Off:
            return PrunePolicy::off();
        case PrunePolicy::Kind::Static:
            if (pc.alpha.size() != spec.N)
                throw std::invalid_argument("static table length does not match code length");
            return PrunePolicy::static_table(pc.alpha);
        case PrunePolicy::Kind::MaxRatio:
            return PrunePolicy::max_ratio(pc.beta);
        case PrunePolicy::Kind::Dynamic: {
            double p_llr = pc.p_llr > 0.0 ? pc.p_llr : 1e-9 / static_cast<double>(spec.N);
            std::vector<double> l = pc.fixed_l;
            if (l.empty()) {
                ReliabilityProfile prof =
                    evaluate_reliability_ga(static_cast<int>(spec.n), spec.rate(), ebn0_db);
                l = llr_budget(prof, p_llr);
            }
            if (l.size() != spec.N)
                throw std::invalid_argument("budget length does not match code length");
            return PrunePolicy::dynamic(pc.p_tol, std::move(l), p_llr);
        }
    }
    throw std::logic_error("unreachable");
}

namespace {

struct FrameResult {
    uint8_t error = 0;
    ComplexityCounters counters;
    double pde = 0.0;
};

// Fold target with the sequential stop rule: frames after the one reaching
// min_frame_errors contribute nothing.
struct PointAccum {
    uint64_t frames = 0;
    uint64_t errors = 0;
    uint64_t recursions = 0;
    uint64_t copies = 0;
    uint64_t sorts = 0;
    uint64_t pruned = 0;
    double pde_sum = 0.0;
    bool stopped = false;

    void fold(const FrameResult& r, uint64_t min_errors) {
        if (stopped) return;
        ++frames;
        errors += r.error;
        recursions += r.counters.metric_recursions;
        copies += r.counters.path_copies;
        sorts += r.counters.sort_operations;
        pruned += r.counters.pruned_paths;
        pde_sum += r.pde;
        if (errors >= min_errors) stopped = true;
    }
};

constexpr uint64_t kBlockFrames = 256;

void validate(const SimConfig& cfg) {
    if (cfg.max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
    if (cfg.min_frame_errors < 1) throw std::invalid_argument("min_frame_errors must be >= 1");
    if (cfg.L < 1) throw std::invalid_argument("list size must be >= 1");
    if (cfg.decoder == DecoderKind::CaScl && !cfg.spec.crc)
        throw std::invalid_argument("CA-SCL needs a CRC in the code spec");
    if (cfg.decoder == DecoderKind::Sc && cfg.prune.kind != PrunePolicy::Kind::Off)
        throw std::invalid_argument("pruning requires a list decoder");
    if (cfg.spec.N == 0 || cfg.spec.K == 0 || cfg.spec.info_set.size() != cfg.spec.K)
        throw std::invalid_argument("code spec is not finalized");
}

// Decode frames [lo, hi) of one SNR point into out. Frame content depends
// only on (master_seed, frame index), never on the thread running it.
template <typename Decoder>
void run_frames(Decoder& dec, const SimConfig& cfg, const ChannelModel& chan, uint64_t lo,
                uint64_t hi, std::vector<FrameResult>& out) {
    const CodeSpec& spec = cfg.spec;
    const size_t payload_len = spec.payload_bits();
    BitVec payload(payload_len);
    out.clear();
    out.reserve(hi - lo);
    for (uint64_t f = lo; f < hi; ++f) {
        RngStream msg(cfg.master_seed, frame_stream_id(f, StreamPurpose::message));
        for (size_t b = 0; b < payload_len; ++b) payload[b] = msg.next_bit();
        BitVec info = spec.crc ? crc_append(payload, *spec.crc) : payload;
        BitVec u = assemble_source(spec, info);
        BitVec x = polar_encode(u);
        RngStream noise(cfg.master_seed,
                        frame_stream_id(f, chan.kind == ChannelModel::Kind::BIAWGN
                                               ? StreamPurpose::noise
                                               : StreamPurpose::erasure));
        ChannelObservation obs = transmit(x, chan, noise);
        DecodeOutcome oc = dec.decode(obs);
        FrameResult r;
        r.counters = oc.counters;
        r.pde = oc.final_pde;
        if (oc.status == DecodeStatus::ListEmptied || oc.status == DecodeStatus::CrcFailAllPaths) {
            r.error = 1;
        } else {
            for (size_t b = 0; b < payload_len; ++b)
                if (oc.info_bits[b] != payload[b]) {
                    r.error = 1;
                    break;
                }
        }
        out.push_back(r);
    }
}

SnrStats run_point(const SimConfig& cfg, double ebn0_db) {
    const double sigma = ebn0_to_sigma(ebn0_db, cfg.spec.rate());
    const ChannelModel chan = ChannelModel::awgn(sigma);
    const PrunePolicy policy = build_policy(cfg.prune, cfg.spec, ebn0_db);

    std::atomic<uint64_t> next_block{0};
    std::atomic<uint64_t> stop_block{UINT64_MAX};
    std::mutex fold_mutex;
    std::map<uint64_t, std::vector<FrameResult>> done;
    uint64_t fold_next = 0;
    PointAccum acc;
    std::exception_ptr failure;

    auto worker = [&]() {
        try {
            ScDecoder sc(cfg.spec);
            ListDecoder scl(cfg.spec, cfg.L, policy, cfg.decoder == DecoderKind::CaScl);
            std::vector<FrameResult> results;
            for (;;) {
                uint64_t b = next_block.fetch_add(1);
                if (b * kBlockFrames >= cfg.max_frames) break;
                if (b > stop_block.load(std::memory_order_relaxed)) break;
                uint64_t lo = b * kBlockFrames;
                uint64_t hi = std::min(cfg.max_frames, lo + kBlockFrames);
                if (cfg.decoder == DecoderKind::Sc)
                    run_frames(sc, cfg, chan, lo, hi, results);
                else
                    run_frames(scl, cfg, chan, lo, hi, results);

                std::lock_guard<std::mutex> lock(fold_mutex);
                done[b] = std::move(results);
                results = {};
                while (true) {
                    auto it = done.find(fold_next);
                    if (it == done.end()) break;
                    for (const FrameResult& r : it->second) acc.fold(r, cfg.min_frame_errors);
                    done.erase(it);
                    if (acc.stopped) {
                        uint64_t cur = stop_block.load(std::memory_order_relaxed);
                        if (fold_next < cur)
                            stop_block.store(fold_next, std::memory_order_relaxed);
                    }
                    ++fold_next;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(fold_mutex);
            if (!failure) failure = std::current_exception();
            stop_block.store(0, std::memory_order_relaxed);
        }
    };

    unsigned workers = cfg.workers > 0 ? cfg.workers : 1;
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    SnrStats s;
    s.ebn0_db = ebn0_db;
    s.frames = acc.frames;
    s.frame_errors = acc.errors;
    const double n = static_cast<double>(acc.frames);
    s.fer = n > 0 ? static_cast<double>(acc.errors) / n : 0.0;
    s.fer_ci95 = n > 0 ? 1.96 * std::sqrt(s.fer * (1.0 - s.fer) / n) : 0.0;
    s.mean_metric_recursions = n > 0 ? static_cast<double>(acc.recursions) / n : 0.0;
    s.mean_path_copies = n > 0 ? static_cast<double>(acc.copies) / n : 0.0;
    s.mean_pruned_paths = n > 0 ? static_cast<double>(acc.pruned) / n : 0.0;
    s.mean_pde = n > 0 ? acc.pde_sum / n : 0.0;
    s.mean_sort_operations = n > 0 ? static_cast<double>(acc.sorts) / n : 0.0;
    return s;
}

}  // namespace

std::vector<SnrStats> run_fer_sweep(const SimConfig& config, const ProgressFn& progress) {
    validate(config);
    // Surface policy construction errors before any frame runs.
    for (double e : config.ebn0_db) build_policy(config.prune, config.spec, e);

    std::vector<SnrStats> stats;
    stats.reserve(config.ebn0_db.size());
    for (size_t p = 0; p < config.ebn0_db.size(); ++p) {
        stats.push_back(run_point(config, config.ebn0_db[p]));
        if (progress) progress(p, stats.back());
    }
    return stats;
}

StaticTable run_calibration(const CodeSpec& spec, double ebn0_db, size_t L, uint64_t n_frames,
                            uint64_t master_seed, const std::string& path) {
    double sigma = ebn0_to_sigma(ebn0_db, spec.rate());
    StaticTable table = calibrate_static(spec, sigma, L, n_frames, master_seed);
    write_static_table(path, table);
    return table;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string render_csv(const std::vector<SnrStats>& stats) {
    std::string out =
        "ebn0_db,frames,frame_errors,fer,fer_ci95,mean_metric_recursions,"
        "mean_path_copies,mean_pruned_paths,mean_pde\n";
    char buf[96];
    for (const SnrStats& s : stats) {
        out += fmt_double(s.ebn0_db);
        std::snprintf(buf, sizeof buf, ",%" PRIu64 ",%" PRIu64, s.frames, s.frame_errors);
        out += buf;
        for (double v : {s.fer, s.fer_ci95, s.mean_metric_recursions, s.mean_path_copies,
                         s.mean_pruned_paths, s.mean_pde}) {
            out += ',';
            out += fmt_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const std::vector<SnrStats>& stats) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const SnrStats& s : stats) {
        nlohmann::ordered_json row;
        row["ebn0_db"] = s.ebn0_db;
        row["frames"] = s.frames;
        row["frame_errors"] = s.frame_errors;
        row["fer"] = s.fer;
        row["fer_ci95"] = s.fer_ci95;
        row["mean_metric_recursions"] = s.mean_metric_recursions;
        row["mean_path_copies"] = s.mean_path_copies;
        row["mean_pruned_paths"] = s.mean_pruned_paths;
        row["mean_pde"] = s.mean_pde;
        points.push_back(std::move(row));
    }
    nlohmann::ordered_json doc;
    doc["points"] = std::move(points);
    return doc.dump(2) + "\n";
}

void emit_report(const std::vector<SnrStats>& stats, const std::string& csv_path,
                 const std::string& json_path) {
    auto write_file = [](const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << body;
        if (!f) throw std::runtime_error("write failed for " + path);
    };
    write_file(csv_path, render_csv(stats));
    write_file(json_path, render_json(stats));
}

}  // namespace polar
