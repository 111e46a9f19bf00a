#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qkpse/gaussian.hpp"
#include "qkpse/sources.hpp"
#include "qkpse/types.hpp"

namespace qkpse {

// One Monte Carlo overlap estimation task: a seeded sampler for the
// probability density |W^{(t)}_rho| / N, the sign of the sampled PQD, its
// negative volume, the evaluator W^{(-t)}_A, and a bound on the range of the
// resulting estimator E(mu) = pi^n N sgn(mu) a_eval(mu).
struct OverlapProblem {
  int modes = 1;
  std::function<CVec(Rng&)> sample;
  std::function<double(const CVec&)> sign;
  double neg_volume = 1.0;
  std::function<double(const CVec&)> a_eval;
  double range_bound = 1.0;
};

struct EstimateReport {
  double value = 0.0;
  std::int64_t n_samples = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double range_bound = 0.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

// ceil(range^2 / (2 eps^2) ln(2/delta)); errors out above 2^62.
std::int64_t hoeffding_samples(double range_bound, double eps, double delta);

// Sample mean of E(mu) over hoeffding_samples draws. Sampling is sharded in
// fixed-size chunks with generators derived from (seed, shard); the mean is
// a deterministic fold in shard order, so the value is independent of the
// worker thread count.
EstimateReport mc_overlap(const OverlapProblem& problem, double eps, double delta,
                          std::uint64_t seed, int threads = 1);

// Algorithm 1 for linear optical encodings: sample from the s-PQD of x,
// evaluate the (-s)-PQD of x'.
EstimateReport algorithm1_kernel(const LonEncoding& x, const LonEncoding& xp, double s,
                                 double eps, double delta, std::uint64_t seed,
                                 int threads = 1);

// Algorithm 1 for Gaussian encodings (both PQDs are Gaussians).
EstimateReport algorithm1_kernel(const GaussianState& x, const GaussianState& xp, double s,
                                 double eps, double delta, std::uint64_t seed,
                                 int threads = 1);

// Ordering parameters for the three Algorithm-2 subroutines, chosen just
// below the least covariance eigenvalue of each sampled Gaussian and capped
// away from the singular s = 1 regime.
struct Orderings {
  double s_x = 0.0;   // denominator of x
  double s_xp = 0.0;  // denominator of x'
  double t = 0.0;     // numerator (partial overlap state)
};

Orderings theorem1_orderings(const GaussianState& gx, const GaussianState& gxp, int measured);

struct Algorithm2Result {
  EstimateReport report;       // combined ratio estimate
  EstimateReport numerator;
  EstimateReport denominator_x;
  EstimateReport denominator_xp;
  double eps_prime = 0.0;
  double lemma_bound = 0.0;    // Appendix-B style bound for the achieved epsilons
};

// Three-term ratio pipeline for states prepared by measuring the first k
// modes of (k+m)-mode Gaussian states with product POVMs (one single-mode
// Fock-basis matrix per measured mode).
Algorithm2Result algorithm2_kernel_detailed(const GaussianState& gx, const GaussianState& gxp,
                                            const std::vector<CMat>& povm_x,
                                            const std::vector<CMat>& povm_xp,
                                            const Orderings& orderings, double eps,
                                            double delta, std::uint64_t seed,
                                            int threads = 1);

EstimateReport algorithm2_kernel(const GaussianState& gx, const GaussianState& gxp,
                                 const std::vector<CMat>& povm_x,
                                 const std::vector<CMat>& povm_xp, const Orderings& orderings,
                                 double eps, double delta, std::uint64_t seed,
                                 int threads = 1);

// a / (b c) together with the ratio-combination error bound
// (3 + eps) eps / (eps'^2 (eps' - eps)^2); guards b, c > eps' - eps.
std::pair<double, double> combine_ratio(double a_est, double b_est, double c_est, double eps,
                                        double eps_prime);

using PatternPair = std::pair<std::vector<int>, std::vector<int>>;

// Sum of per-pattern sub-kernel estimates over a finite likely-pattern set;
// the reported epsilon is the sum of per-pattern epsilons plus the tail
// probability mass outside the set.
EstimateReport pattern_sum_kernel(
    const std::vector<PatternPair>& patterns,
    const std::function<EstimateReport(const PatternPair&)>& subkernel, double tail_bound,
    double total_eps_budget);

}  // namespace qkpse
