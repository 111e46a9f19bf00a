#pragma once

#include <cstdint>

#include "qkpse/estimator.hpp"
#include "qkpse/rng.hpp"
#include "qkpse/types.hpp"

namespace qkpse {

// Exact permanent via Ryser's formula with Gray-code updates; usable up to
// n = 12 or so. Test oracle and Fock-amplitude workhorse.
cplx ryser_permanent(const CMat& a);

// Randomized permanent estimator: mean over uniform y in {-1,1}^{2n} of
// y_1...y_{2n} prod_i sum_j y_j w_ij. Unbiased for Per(W); each sample is
// bounded by ||W||^{2n} <= 1 for submatrices of unitaries.
double glynn_estimate(const CMat& w, std::int64_t n_samples, std::uint64_t seed);

struct LossPattern {
  std::vector<std::uint8_t> p, q;
  int weight = 0;       // shared weight when matched
  bool matched = false;
};

// p_j, q_j independent Bernoulli with Pr[photon present] = eta_j.
LossPattern sample_loss_pattern(const LossVector& eta, Rng& rng);

struct UniformEtaDraw {
  bool halt = false;
  LossPattern pattern;
};

// Two-stage sampler for uniform eta: halts with probability 1 - theta where
// theta = sum_n C(m,n)^2 eta^{2n} (1-eta)^{2(m-n)}; otherwise draws the
// shared weight n from the squared-binomial law and fills p, q uniformly at
// fixed weight by the sequential method.
UniformEtaDraw sample_uniform_eta(int m, double eta, Rng& rng);

double uniform_eta_theta(int m, double eta);

// V_n from deleting row j when p_j = 0 and column j when q_j = 0, returned
// as W = V_n (+) V_n^* so that Per(W) = |Per(V_n)|^2.
CMat reduced_matrix(const TransferMatrix& V, const LossPattern& lp);

// Full pipeline for kernels of lossy single-photon encodings: per repeat,
// draw a loss pattern, halt on weight mismatch, otherwise run a small Glynn
// estimate on the reduced matrix of V = VX^dagger VX'.
EstimateReport lossy_photonic_kernel(const TransferMatrix& VX, const TransferMatrix& VXp,
                                     const LossVector& eta, std::int64_t repeats,
                                     std::uint64_t seed, int inner_bitstrings = 16,
                                     int threads = 1);

// Convenience sizing wrapper: repeats = hoeffding_samples(1, eps, delta).
EstimateReport lossy_photonic_kernel_eps(const TransferMatrix& VX, const TransferMatrix& VXp,
                                         const LossVector& eta, double eps, double delta,
                                         std::uint64_t seed, int inner_bitstrings = 16,
                                         int threads = 1);

}  // namespace qkpse
