// Synthetic-channel reliability computation for code construction.
//
// Two constructions:
//  - BEC erasure-probability recursion (exact for the erasure channel,
//    usable as a heuristic elsewhere),
//  - Gaussian approximation of density evolution for BPSK/AWGN, which
//    tracks one mean per synthetic channel assuming the LLR stays
//    Gaussian with variance twice its mean.
#pragma once

#include <cstddef>
#include <vector>

namespace polar {

// Erasure probabilities z[i] of the N = 2^n synthetic channels of a BEC
// with erasure probability eps, in natural bit order (index i corresponds
// to decode phase i).
std::vector<double> bec_reliability(int n, double eps);

// phi(m) = E[tanh(L/2)] gap function of the Gaussian approximation,
// evaluated via the standard two-piece fit. Exposed for tests and for
// the LLR-budget machinery that needs it at arbitrary points.
double ga_phi(double m);
// Inverse of ga_phi on (0, 1]; bisection to ~1e-10 relative accuracy.
double ga_phi_inv(double y);

// Mean LLRs m[i] of the synthetic channels under the Gaussian
// approximation, for BPSK on AWGN with noise deviation sigma
// (channel LLR mean 2/sigma^2). Natural bit order.
std::vector<double> ga_reliability(int n, double sigma);

// Indices of the k most reliable synthetic channels, ascending.
// `reliability_is_error_prob` says whether smaller is better (BEC z)
// or larger is better (GA mean).
std::vector<size_t> most_reliable(const std::vector<double>& metric, size_t k,
                                  bool smaller_is_better);

}  // namespace polar
