#include "polar/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polar {

std::vector<double> bec_reliability(int n, double eps) {
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps out of [0,1]");
    std::vector<double> z{eps};
    for (int stage = 0; stage < n; ++stage) {
        std::vector<double> next(z.size() * 2);
        for (size_t i = 0; i < z.size(); ++i) {
            next[2 * i] = 2.0 * z[i] - z[i] * z[i];
            next[2 * i + 1] = z[i] * z[i];
        }
        z.swap(next);
    }
    return z;
}

namespace {

// log phi(x); the two-piece fit evaluated in the log domain so the large-x
// branch never underflows inside the construction recursion.
double log_phi(double x) {
    if (x <= 0.0) return 0.0;
    if (x <= 10.0) return 0.0218 - 0.4527 * std::pow(x, 0.86);
    // log( sqrt(pi/x) * exp(-x/4) * (1 - 10/(7x)) )
    return 0.5 * (std::log(M_PI) - std::log(x)) - 0.25 * x + std::log1p(-10.0 / (7.0 * x));
}

// Solve log_phi(x) = target_log for x > 0 by bisection. log_phi is
// decreasing on each of its two pieces, so a sign-change bracket pins the
// root; iterate until the bracket is tight in relative terms.
double phi_inv_log(double target_log) {
    if (target_log >= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (log_phi(hi) > target_log) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("phi inverse target out of range");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (log_phi(mid) > target_log) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-10 * std::max(1e-30, lo)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double ga_phi(double m) { return std::exp(log_phi(m)); }

double ga_phi_inv(double y) {
    if (!(y > 0.0 && y <= 1.0)) throw std::invalid_argument("phi inverse needs y in (0,1]");
    return phi_inv_log(std::log(y));
}

std::vector<double> ga_reliability(int n, double sigma) {
    if (n < 0) throw std::invalid_argument("n must be >= 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    std::vector<double> m{2.0 / (sigma * sigma)};
    for (int stage = 0; stage < n; ++stage) {
        std::vector<double> next(m.size() * 2);
        for (size_t i = 0; i < m.size(); ++i) {
            // minus branch: phi_new = 1 - (1 - phi)^2 = phi (2 - phi),
            // folded in the log domain so tiny phi survives.
            double lp = log_phi(m[i]);
            double phi = std::exp(lp);
            double lp_minus = lp + std::log(2.0 - phi);
            double m_minus = phi_inv_log(lp_minus);
            // The fit is not exactly consistent near m = 0; degrading a
            // channel must never raise its mean.
            next[2 * i] = std::min(m_minus, m[i]);
            next[2 * i + 1] = 2.0 * m[i];
        }
        m.swap(next);
    }
    return m;
}

std::vector<size_t> most_reliable(const std::vector<double>& metric, size_t k,
                                  bool smaller_is_better) {
    if (k > metric.size()) throw std::invalid_argument("k exceeds channel count");
    std::vector<size_t> idx(metric.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (metric[a] != metric[b])
            return smaller_is_better ? metric[a] < metric[b] : metric[a] > metric[b];
        return a < b;  // deterministic tie-break toward lower index
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace polar
