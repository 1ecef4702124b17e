// Path-pruning policies for the list decoder: a static per-level threshold
// rule, a Monte Carlo calibration for it, and a dynamic policy that spends
// an explicit FER-loss budget using LLR-derived metric upper bounds and a
// ledger of pruned paths.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polar/code_spec.hpp"

namespace polar {

struct PrunePolicy {
    enum class Kind { Off, Static, Dynamic, MaxRatio } kind = Kind::Off;

    std::vector<double> alpha;  // Static: per-level thresholds in [0,1)

    double p_tol = 0.0;         // Dynamic: tolerated FER loss
    double p_llr = 0.0;         // Dynamic: per-level LLR tail probability
    std::vector<double> l;      // Dynamic: per-level LLR budgets (index 0 = level 1)
    std::vector<double> bound_prefix;  // F[j] = sum_{k<=j} log sigmoid(l_k); F[0] = 0

    double beta = 0.0;          // MaxRatio: keep paths with P_j >= beta * P_max

    static PrunePolicy off() { return {}; }
    static PrunePolicy static_table(std::vector<double> alpha_table);
    static PrunePolicy dynamic(double p_tol, std::vector<double> llr_budgets, double p_llr);
    static PrunePolicy max_ratio(double beta);
};

struct PrunedRecord {
    size_t t = 0;       // level (1-based) at pruning time
    double p_log = 0;   // absolute log metric at pruning time
    double q = 0;       // estimated loss if this was the correct path
};

// --- building blocks (also used directly by tests) ---

// Inverse standard normal CDF (rational approximation, ~1e-15 relative).
double normal_quantile(double p);

// l_i = m_i + Phi^{-1}(1 - p_llr/2) * sqrt(2 m_i): with the decision LLR
// modeled as Normal(m_i, 2 m_i), exceeding l_i has probability <= p_llr.
std::vector<double> llr_budget(const ReliabilityProfile& profile, double p_llr);

std::vector<double> build_bound_prefix(const std::vector<double>& l);

// log of the Eq.-style bound: a metric known at level i can grow by at most
// the budget factors over (i, j].
double metric_upper_bound(const std::vector<double>& prefix, size_t i, size_t j, double log_p_i);

// Best possible descendant metric of a pruned record at the current level.
double descendant_bound(const PrunedRecord& rec, size_t level, const std::vector<double>& prefix);

// norm = per-level normalized log metrics, sorted descending. Returns
// indices to delete (never index 0).
std::vector<size_t> apply_static_rule(const std::vector<double>& norm, double alpha);

// q = P_j / sum, both given in log domain.
double deletion_loss(double norm_j, double log_sum);

// Greedy prune-set selection from the smallest metric upward, keeping the
// pruned mass within budget_frac of the total and each single deletion
// within per_path_cap of the budget. Fills q (one per index).
std::vector<size_t> select_prune_set(const std::vector<double>& norm, double budget_frac,
                                     std::vector<double>& q_out, double* alpha_report = nullptr,
                                     double per_path_cap = 1.0);

// Largest share of the remaining loss budget one deletion may claim under
// the dynamic policy. The budget is a whole-frame resource: a single path
// worth most of it buys one removal, while the same mass spread over the
// cheap tail paths of later levels buys thousands. Capping the per-path
// spend maximizes removals per unit of tolerance; 0.05 is conservative
// enough that the running loss estimate stays below p_tol with margin,
// while the complexity is within a few percent of the uncapped optimum.
inline constexpr double kPerPathBudgetCap = 0.05;

// Ledger update: merge new records, keep the L with the largest losses,
// then retain everything whose descendant bound still reaches the weakest
// of those.
void update_ledger(std::vector<PrunedRecord>& ledger, std::vector<PrunedRecord> fresh,
                   size_t level, size_t L, const std::vector<double>& prefix);

// Accumulated-loss bound: survivors that dominate every pruned descendant
// hold their list slots; the remaining slots could go to the worst pruned
// records.
double estimate_accumulated_loss(const std::vector<PrunedRecord>& ledger,
                                 const std::vector<double>& survivors_abs, size_t level, size_t L,
                                 const std::vector<double>& prefix);

// --- per-decode state machine driving the above ---

class PruneSession {
  public:
    PruneSession(const PrunePolicy* policy, size_t L) : policy_(policy), L_(L) {}

    // Called once per level after sort/normalize. abs/norm sorted
    // descending (norm[0] = 0). Appends indices to delete, ascending.
    void level(size_t level_1based, const std::vector<double>& abs,
               const std::vector<double>& norm, std::vector<size_t>& drop);

    // Reported running loss bound: the high-water mark of the estimate,
    // non-decreasing over the frame.
    double pde() const { return pde_; }
    // Loss estimate as of the last level; this is what the next level's
    // budget is gauged against. Falls when pruned records discharge.
    double current_estimate() const { return raw_pde_; }
    size_t ledger_size() const { return ledger_.size(); }
    const std::vector<PrunedRecord>& ledger() const { return ledger_; }

  private:
    const PrunePolicy* policy_;
    size_t L_;
    std::vector<PrunedRecord> ledger_;
    double pde_ = 0.0;
    double raw_pde_ = 0.0;
};

// --- static-table calibration and file formats ---

struct StaticTable {
    std::string code_hash;
    size_t L = 0;
    double sigma = 0.0;
    uint64_t n_frames = 0;
    std::vector<double> alpha;
};

// Standard list decoding with genie tracking: on frames decoded correctly,
// fold each level's correct-path metric fraction into a running minimum.
// Levels no correct frame ever visited end up at 0 (prune nothing there).
StaticTable calibrate_static(const CodeSpec& spec, double sigma, size_t L, uint64_t n_frames,
                             uint64_t master_seed);

void write_static_table(const std::string& path, const StaticTable& table);
StaticTable read_static_table(const std::string& path);

struct BudgetFile {
    std::string code_hash;
    double p_llr = 0.0;
    std::vector<double> l;
};

void write_budget_file(const std::string& path, const BudgetFile& budget);
BudgetFile read_budget_file(const std::string& path);

}  // namespace polar
