// Seeded Monte Carlo FER/complexity sweeps with deterministic parallel
// scheduling, plus CSV/JSON report emission.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polar/code_spec.hpp"
#include "polar/list_decoder.hpp"
#include "polar/pruning.hpp"

namespace polar {

enum class DecoderKind { Sc, Scl, CaScl };

// Pruning knobs as given on the command line; resolved into a concrete
// PrunePolicy per SNR point by build_policy().
struct PruneConfig {
    PrunePolicy::Kind kind = PrunePolicy::Kind::Off;
    std::vector<double> alpha;    // Static: per-level thresholds
    double p_tol = 1e-5;          // Dynamic: tolerated FER loss
    double p_llr = 0.0;           // Dynamic: 0 = auto 1e-9/N
    std::vector<double> fixed_l;  // Dynamic: budgets from file; empty = GA at the operating point
    double beta = 0.0;            // MaxRatio
};

struct SimConfig {
    CodeSpec spec;
    DecoderKind decoder = DecoderKind::CaScl;
    size_t L = 1;
    PruneConfig prune;
    std::vector<double> ebn0_db;
    uint64_t master_seed = 1;
    uint64_t max_frames = 1000000;
    uint64_t min_frame_errors = 100;
    unsigned workers = 1;
};

struct SnrStats {
    double ebn0_db = 0.0;
    uint64_t frames = 0;
    uint64_t frame_errors = 0;
    double fer = 0.0;
    double fer_ci95 = 0.0;  // 1.96 sqrt(p(1-p)/n)
    double mean_metric_recursions = 0.0;
    double mean_path_copies = 0.0;
    double mean_pruned_paths = 0.0;
    double mean_pde = 0.0;
    // diagnostics beyond the report formats
    double mean_sort_operations = 0.0;
};

PrunePolicy build_policy(const PruneConfig& pc, const CodeSpec& spec, double ebn0_db);

// Called after each finished SNR point with its index and stats.
using ProgressFn = std::function<void(size_t, const SnrStats&)>;

// Frame loop per SNR point: random payload -> crc_append -> assemble ->
// encode -> transmit -> decode -> compare payload. Stops at the frame where
// min_frame_errors is reached (or at max_frames) with exact sequential
// semantics regardless of worker count.
std::vector<SnrStats> run_fer_sweep(const SimConfig& config, const ProgressFn& progress = {});

// Calibrate a static table at one operating point and write it to path.
StaticTable run_calibration(const CodeSpec& spec, double ebn0_db, size_t L, uint64_t n_frames,
                            uint64_t master_seed, const std::string& path);

std::string render_csv(const std::vector<SnrStats>& stats);
std::string render_json(const std::vector<SnrStats>& stats);
void emit_report(const std::vector<SnrStats>& stats, const std::string& csv_path,
                 const std::string& json_path);

}  // namespace polar
