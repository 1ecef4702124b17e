#include "polar/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "polar/channel.hpp"
#include "polar/codec.hpp"
#include "polar/list_decoder.hpp"
#include "polar/log_domain.hpp"
#include "polar/rng.hpp"

namespace polar {

PrunePolicy PrunePolicy::static_table(std::vector<double> alpha_table) {
    for (double a : alpha_table)
        if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("alpha outside [0,1)");
    PrunePolicy p;
    p.kind = Kind::Static;
    p.alpha = std::move(alpha_table);
    return p;
}

PrunePolicy PrunePolicy::dynamic(double p_tol, std::vector<double> llr_budgets, double p_llr) {
    if (!(p_tol > 0.0 && p_tol < 1.0)) throw std::invalid_argument("p_tol outside (0,1)");
    PrunePolicy p;
    p.kind = Kind::Dynamic;
    p.p_tol = p_tol;
    p.p_llr = p_llr;
    p.bound_prefix = build_bound_prefix(llr_budgets);
    p.l = std::move(llr_budgets);
    return p;
}

PrunePolicy PrunePolicy::max_ratio(double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta outside [0,1)");
    PrunePolicy p;
    p.kind = Kind::MaxRatio;
    p.beta = beta;
    return p;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0,1)");
    // Wichura's AS 241 rational approximations (PPND16).
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

std::vector<double> llr_budget(const ReliabilityProfile& profile, double p_llr) {
    if (profile.kind != ConstructionKind::GaussianApproxMeanLLR)
        throw std::invalid_argument("LLR budgets need a Gaussian-approximation profile");
    if (!(p_llr > 0.0 && p_llr < 1.0)) throw std::invalid_argument("p_llr outside (0,1)");
    // Upper-tail quantile computed from the small probability directly to
    // dodge the 1 - tiny cancellation.
    double z = -normal_quantile(p_llr / 2.0);
    std::vector<double> l(profile.values.size());
    for (size_t i = 0; i < l.size(); ++i) {
        double m = profile.values[i];
        l[i] = m + z * std::sqrt(2.0 * m);
    }
    return l;
}

std::vector<double> build_bound_prefix(const std::vector<double>& l) {
    std::vector<double> prefix(l.size() + 1, 0.0);
    for (size_t j = 1; j <= l.size(); ++j) prefix[j] = prefix[j - 1] + log_sigmoid(l[j - 1]);
    return prefix;
}

double metric_upper_bound(const std::vector<double>& prefix, size_t i, size_t j, double log_p_i) {
    if (!(i < j && j < prefix.size())) throw std::invalid_argument("bound needs 0 <= i < j <= N");
    return log_p_i + prefix[j] - prefix[i];
}

double descendant_bound(const PrunedRecord& rec, size_t level, const std::vector<double>& prefix) {
    return rec.p_log + prefix[level] - prefix[rec.t];
}

std::vector<size_t> apply_static_rule(const std::vector<double>& norm, double alpha) {
    std::vector<size_t> drop;
    if (norm.size() < 2 || alpha <= 0.0) return drop;
    double log_sum = kLogZeroFloor;
    for (double v : norm) log_sum = log_sum_exp(log_sum, v);
    double cut = std::log(alpha) + log_sum;
    for (size_t j = 1; j < norm.size(); ++j)
        if (norm[j] < cut) drop.push_back(j);
    return drop;
}

double deletion_loss(double norm_j, double log_sum) { return std::exp(norm_j - log_sum); }

std::vector<size_t> select_prune_set(const std::vector<double>& norm, double budget_frac,
                                     std::vector<double>& q_out, double* alpha_report,
                                     double per_path_cap) {
    std::vector<size_t> drop;
    q_out.clear();
    double log_sum = kLogZeroFloor;
    for (double v : norm) log_sum = log_sum_exp(log_sum, v);
    double pruned_mass = 0.0;
    if (budget_frac > 0.0 && norm.size() >= 2) {
        // Ascending metric order = tail of the descending-sorted list. Once
        // one mass does not fit, no larger one will. The per-path cap stops
        // any single deletion from claiming more than that fraction of the
        // budget: the budget is a whole-frame resource, and a path worth
        // nearly all of it buys one removal while the same mass spent on
        // tail paths later in the frame buys thousands. Capping per path
        // maximizes deletions per unit of tolerance across the frame, not
        // just within one level.
        const double cap = per_path_cap * budget_frac;
        for (size_t j = norm.size(); j-- > 1;) {
            double frac = deletion_loss(norm[j], log_sum);
            if (frac > cap || pruned_mass + frac > budget_frac) break;
            pruned_mass += frac;
            drop.push_back(j);
            q_out.push_back(frac);
        }
        std::reverse(drop.begin(), drop.end());
        std::reverse(q_out.begin(), q_out.end());
    }
    if (alpha_report) *alpha_report = 1.0 - pruned_mass;
    return drop;
}

void update_ledger(std::vector<PrunedRecord>& ledger, std::vector<PrunedRecord> fresh,
                   size_t level, size_t L, const std::vector<double>& prefix) {
    for (auto& r : fresh) ledger.push_back(r);
    if (ledger.empty() || ledger.size() <= L) return;
    // The L largest losses set the cut; everything whose descendant bound
    // still reaches the weakest of them stays active.
    std::vector<size_t> by_q(ledger.size());
    std::iota(by_q.begin(), by_q.end(), size_t{0});
    std::stable_sort(by_q.begin(), by_q.end(),
                     [&](size_t a, size_t b) { return ledger[a].q > ledger[b].q; });
    double z_min = std::numeric_limits<double>::infinity();
    for (size_t r = 0; r < L; ++r)
        z_min = std::min(z_min, descendant_bound(ledger[by_q[r]], level, prefix));
    std::vector<PrunedRecord> kept;
    kept.reserve(ledger.size());
    for (const auto& rec : ledger)
        if (descendant_bound(rec, level, prefix) >= z_min) kept.push_back(rec);
    ledger.swap(kept);
}

double estimate_accumulated_loss(const std::vector<PrunedRecord>& ledger,
                                 const std::vector<double>& survivors_abs, size_t level, size_t L,
                                 const std::vector<double>& prefix) {
    if (ledger.empty()) return 0.0;
    double z_max = -std::numeric_limits<double>::infinity();
    for (const auto& rec : ledger) z_max = std::max(z_max, descendant_bound(rec, level, prefix));
    size_t secured = 0;
    for (double p : survivors_abs)
        if (p >= z_max) ++secured;
    if (secured >= L) return 0.0;
    size_t slots = L - secured;
    std::vector<double> losses;
    losses.reserve(ledger.size());
    for (const auto& rec : ledger) losses.push_back(rec.q);
    std::sort(losses.begin(), losses.end(), std::greater<>());
    double pde = 0.0;
    for (size_t r = 0; r < std::min(slots, losses.size()); ++r) pde += losses[r];
    return pde;
}

void PruneSession::level(size_t level_1based, const std::vector<double>& abs,
                         const std::vector<double>& norm, std::vector<size_t>& drop) {
    drop.clear();
    switch (policy_->kind) {
        case PrunePolicy::Kind::Off:
            return;
        case PrunePolicy::Kind::Static: {
            drop = apply_static_rule(norm, policy_->alpha[level_1based - 1]);
            return;
        }
        case PrunePolicy::Kind::MaxRatio: {
            if (policy_->beta <= 0.0 || norm.size() < 2) return;
            double cut = norm[0] + std::log(policy_->beta);
            for (size_t j = 1; j < norm.size(); ++j)
                if (norm[j] < cut) drop.push_back(j);
            return;
        }
        case PrunePolicy::Kind::Dynamic:
            break;
    }
    // Dynamic: spend what remains of the loss budget at this level. The
    // budget is gauged against the loss estimate as of the previous level,
    // not against the raw sum of everything ever pruned: the estimate only
    // charges the L worst active records, so a long run of cheap tail
    // prunes never latches the estimate shut the way their raw sum would.
    // The reported pde() is the estimate's high-water mark (non-decreasing);
    // current_estimate() drives the spending decisions and can fall when
    // old records rotate out of the charged set.
    const double budget = policy_->p_tol - raw_pde_;
    std::vector<double> q;
    if (budget > 0.0) drop = select_prune_set(norm, budget, q, nullptr, kPerPathBudgetCap);
    if (!drop.empty() || !ledger_.empty()) {
        std::vector<PrunedRecord> fresh(drop.size());
        for (size_t r = 0; r < drop.size(); ++r)
            fresh[r] = PrunedRecord{level_1based, abs[drop[r]], q[r]};
        update_ledger(ledger_, std::move(fresh), level_1based, L_, policy_->bound_prefix);
    }
    if (!ledger_.empty()) {
        std::vector<double> kept_abs;
        kept_abs.reserve(abs.size());
        for (size_t j = 0; j < abs.size(); ++j)
            if (!std::binary_search(drop.begin(), drop.end(), j)) kept_abs.push_back(abs[j]);
        raw_pde_ =
            estimate_accumulated_loss(ledger_, kept_abs, level_1based, L_, policy_->bound_prefix);
        pde_ = std::max(pde_, raw_pde_);
    }
}

StaticTable calibrate_static(const CodeSpec& spec, double sigma, size_t L, uint64_t n_frames,
                             uint64_t master_seed) {
    if (n_frames < 1) throw std::invalid_argument("calibration needs at least one frame");
    const size_t N = spec.N;
    StaticTable table;
    table.code_hash = spec.code_hash();
    table.L = L;
    table.sigma = sigma;
    table.n_frames = n_frames;
    table.alpha.assign(N, 1.0);
    std::vector<uint8_t> touched(N, 0);

    ListDecoder decoder(spec, L, PrunePolicy::off(), spec.crc.has_value());
    ChannelModel model = ChannelModel::awgn(sigma);
    uint64_t correct = 0;
    for (uint64_t f = 0; f < n_frames; ++f) {
        RngStream msg(master_seed, frame_stream_id(f, StreamPurpose::message));
        BitVec payload(spec.payload_bits());
        for (auto& b : payload) b = msg.next_bit();
        BitVec info = spec.crc ? crc_append(payload, *spec.crc) : payload;
        BitVec u = assemble_source(spec, info);
        BitVec x = polar_encode(u);
        RngStream noise(master_seed, frame_stream_id(f, StreamPurpose::noise));
        ChannelObservation obs = transmit(x, model, noise);

        DecodeTrace trace;
        trace.true_u = &u;
        DecodeOutcome out = decoder.decode(obs, &trace);
        bool ok = std::equal(payload.begin(), payload.end(), out.info_bits.begin());
        if (!ok) continue;
        ++correct;
        for (size_t i = 0; i < N; ++i) {
            if (!trace.genie_alive[i]) continue;
            table.alpha[i] = std::min(table.alpha[i], trace.genie_ratio[i]);
            touched[i] = 1;
        }
    }
    if (correct == 0) throw std::runtime_error("calibration failed: no frame decoded correctly");
    for (size_t i = 0; i < N; ++i) {
        if (!touched[i]) table.alpha[i] = 0.0;  // no evidence, prune nothing
        else table.alpha[i] = std::min(table.alpha[i], 1.0 - 1e-12);
    }
    return table;
}

void write_static_table(const std::string& path, const StaticTable& table) {
    nlohmann::json j;
    j["code_hash"] = table.code_hash;
    j["L"] = table.L;
    j["sigma"] = table.sigma;
    j["n_frames"] = table.n_frames;
    j["alpha"] = table.alpha;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

StaticTable read_static_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    StaticTable t;
    t.code_hash = j.at("code_hash").get<std::string>();
    t.L = j.at("L").get<size_t>();
    t.sigma = j.at("sigma").get<double>();
    t.n_frames = j.at("n_frames").get<uint64_t>();
    t.alpha = j.at("alpha").get<std::vector<double>>();
    return t;
}

void write_budget_file(const std::string& path, const BudgetFile& budget) {
    nlohmann::json j;
    j["code_hash"] = budget.code_hash;
    j["p_llr"] = budget.p_llr;
    j["l"] = budget.l;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

BudgetFile read_budget_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    BudgetFile b;
    b.code_hash = j.at("code_hash").get<std::string>();
    b.p_llr = j.at("p_llr").get<double>();
    b.l = j.at("l").get<std::vector<double>>();
    return b;
}

}  // namespace polar
