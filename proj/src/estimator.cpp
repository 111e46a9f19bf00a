#include "qkpse/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <memory>

#include "qkpse/errors.hpp"
#include "qkpse/phase_space.hpp"

namespace qkpse {
namespace {

constexpr std::int64_t kShardChunk = 1 << 16;

double pow_int(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

// mean + sqrt-factor of a covariance, eigenvalue-floored at zero
struct GaussianSampler {
  Vec mean;
  Mat root;

  static GaussianSampler make(const Vec& mean, const Mat& cov) {
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw OrderingInfeasible("sampling covariance is not positive definite");
    Vec sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return {mean, es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose()};
  }

  CVec draw(Rng& rng) const {
    Vec z(mean.size());
    for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Vec r = mean + root * z;
    CVec alpha(mean.size() / 2);
    for (int j = 0; j < alpha.size(); ++j)
      alpha[j] = cplx(0.5 * r[2 * j], 0.5 * r[2 * j + 1]);
    return alpha;
  }
};

// cached evaluator for a Gaussian PQD at a fixed ordering
struct GaussianPqdEvaluator {
  Vec mean;
  Mat inv;
  double log_norm;  // log of 4^m / ((2 pi)^m sqrt(det))

  static GaussianPqdEvaluator make(const GaussianState& g, double s) {
    const int m = g.modes;
    Mat sigma = g.cov;
    for (int i = 0; i < 2 * m; ++i) sigma(i, i) -= s;
    Eigen::LLT<Mat> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw OrderingInfeasible("cov - sI not positive definite for the requested ordering");
    double logdet = 0.0;
    for (int i = 0; i < 2 * m; ++i) logdet += std::log(llt.matrixL()(i, i));
    Mat inv = llt.solve(Mat::Identity(2 * m, 2 * m));
    const double log_norm = m * std::log(4.0) - m * std::log(2.0 * kPi) - logdet;
    return {g.mean, std::move(inv), log_norm};
  }

  double peak() const { return std::exp(log_norm); }

  double operator()(const CVec& alpha) const {
    Vec r(mean.size());
    for (int j = 0; j < alpha.size(); ++j) {
      r[2 * j] = 2.0 * alpha[j].real();
      r[2 * j + 1] = 2.0 * alpha[j].imag();
    }
    const Vec d = r - mean;
    return std::exp(log_norm - 0.5 * d.dot(inv * d));
  }
};

double ordering_cap(double lambda_min) {
  const double margin = std::max(1e-3, 1e-3 * lambda_min);
  return std::min(lambda_min - margin, 0.995);
}

}  // namespace

std::int64_t hoeffding_samples(double range_bound, double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw ValidationError("epsilon and delta must lie in (0, 1)");
  if (!(range_bound > 0.0)) throw ValidationError("range bound must be positive");
  const double n = range_bound * range_bound / (2.0 * eps * eps) * std::log(2.0 / delta);
  if (n > 4.6e18) throw Error("required sample count overflows the sizing guard");
  return static_cast<std::int64_t>(std::ceil(n));
}

EstimateReport mc_overlap(const OverlapProblem& problem, double eps, double delta,
                          std::uint64_t seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::int64_t n = hoeffding_samples(problem.range_bound, eps, delta);
  const std::int64_t shards = (n + kShardChunk - 1) / kShardChunk;
  const double constant = pow_int(kPi, problem.modes) * problem.neg_volume;

  std::vector<double> partial(static_cast<std::size_t>(shards), 0.0);
  auto run_shard = [&](std::int64_t idx) {
    Rng rng = Rng::shard(seed, static_cast<std::uint64_t>(idx));
    const std::int64_t lo = idx * kShardChunk;
    const std::int64_t hi = std::min(n, lo + kShardChunk);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const CVec mu = problem.sample(rng);
      const double a = problem.a_eval(mu);
      if (std::isnan(a)) throw Error("estimator evaluation produced NaN");
      acc += constant * problem.sign(mu) * a;
    }
    partial[static_cast<std::size_t>(idx)] = acc;
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(shards)));
  if (workers == 1) {
    for (std::int64_t i = 0; i < shards; ++i) run_shard(i);
  } else {
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::future<void>> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.push_back(std::async(std::launch::async, [&]() {
        for (;;) {
          const std::int64_t idx = cursor.fetch_add(1);
          if (idx >= shards) return;
          run_shard(idx);
        }
      }));
    for (auto& f : pool) f.get();
  }

  double total = 0.0;
  for (double p : partial) total += p;

  EstimateReport report;
  report.value = total / static_cast<double>(n);
  report.n_samples = n;
  report.epsilon = eps;
  report.delta = delta;
  report.range_bound = problem.range_bound;
  report.seed = seed;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

EstimateReport algorithm1_kernel(const LonEncoding& x, const LonEncoding& xp, double s,
                                 double eps, double delta, std::uint64_t seed, int threads) {
  if (x.modes() != xp.modes()) throw ValidationError("encodings must share the mode count");
  if (!(s > -1.0 && s < 1.0))
    throw OrderingInfeasible("Algorithm 1 needs both orderings +-s strictly inside (-1, 1)");
  auto px = std::make_shared<LonPqd>(x, s);
  auto pxp = std::make_shared<LonPqd>(xp, -s);

  OverlapProblem problem;
  problem.modes = x.modes();
  problem.sample = [px](Rng& rng) { return px->sample(rng); };
  problem.sign = [px](const CVec& mu) { return px->sign(mu); };
  problem.neg_volume = px->neg_volume();
  problem.a_eval = [pxp](const CVec& mu) { return pxp->eval(mu); };
  problem.range_bound = estimator_range(x, xp, s);
  return mc_overlap(problem, eps, delta, seed, threads);
}

EstimateReport algorithm1_kernel(const GaussianState& x, const GaussianState& xp, double s,
                                 double eps, double delta, std::uint64_t seed, int threads) {
  if (x.modes != xp.modes) throw ValidationError("states must share the mode count");
  const int m = x.modes;
  Mat sampling_cov = x.cov;
  for (int i = 0; i < 2 * m; ++i) sampling_cov(i, i) -= s;
  auto sampler = std::make_shared<GaussianSampler>(GaussianSampler::make(x.mean, sampling_cov));
  auto eval = std::make_shared<GaussianPqdEvaluator>(GaussianPqdEvaluator::make(xp, -s));

  OverlapProblem problem;
  problem.modes = m;
  problem.sample = [sampler](Rng& rng) { return sampler->draw(rng); };
  problem.sign = [](const CVec&) { return 1.0; };
  problem.neg_volume = 1.0;
  problem.a_eval = [eval](const CVec& mu) { return (*eval)(mu); };
  problem.range_bound = pow_int(kPi, m) * eval->peak();
  return mc_overlap(problem, eps, delta, seed, threads);
}

Orderings theorem1_orderings(const GaussianState& gx, const GaussianState& gxp, int measured) {
  if (gx.modes != gxp.modes) throw ValidationError("states must share the mode count");
  if (measured < 0 || measured >= gx.modes) throw ValidationError("measured count out of range");
  Orderings o;
  if (measured == 0) return o;
  std::vector<int> keep;
  for (int j = 0; j < measured; ++j) keep.push_back(j);
  o.s_x = ordering_cap(s_max_nonneg(partial_trace(gx, keep)));
  o.s_xp = ordering_cap(s_max_nonneg(partial_trace(gxp, keep)));
  const auto ov = partial_overlap(gx, gxp, gx.modes - measured);
  o.t = ordering_cap(s_max_nonneg(ov.state));
  return o;
}

namespace {

struct DenominatorProblem {
  OverlapProblem problem;
  double tight_range;
};

DenominatorProblem make_denominator(const GaussianState& reduced,
                                    const std::vector<CMat>& povm, double s) {
  const int k = reduced.modes;
  Mat sampling_cov = reduced.cov;
  for (int i = 0; i < 2 * k; ++i) sampling_cov(i, i) -= s;
  auto sampler =
      std::make_shared<GaussianSampler>(GaussianSampler::make(reduced.mean, sampling_cov));
  auto evals = std::make_shared<std::vector<PovmPqd>>();
  evals->reserve(k);
  for (const auto& pi : povm) evals->emplace_back(pi, -s);

  // interval product of the per-mode value ranges, with a small margin
  double lo = 1.0, hi = 1.0;
  for (const auto& e : *evals) {
    const auto [a, b] = e.value_interval();
    const double cands[4] = {lo * a * kPi, lo * b * kPi, hi * a * kPi, hi * b * kPi};
    lo = *std::min_element(cands, cands + 4);
    hi = *std::max_element(cands, cands + 4);
  }
  const double tight = 1.02 * (hi - std::min(lo, 0.0));
  const double theoretical = povm_range_bound(OrderingVector::uniform(k, s));

  OverlapProblem problem;
  problem.modes = k;
  problem.sample = [sampler](Rng& rng) { return sampler->draw(rng); };
  problem.sign = [](const CVec&) { return 1.0; };
  problem.neg_volume = 1.0;
  problem.a_eval = [evals](const CVec& mu) {
    double w = 1.0;
    for (int j = 0; j < mu.size(); ++j) w *= (*evals)[j](mu[j]);
    return w;
  };
  problem.range_bound = std::min(tight, theoretical);
  return {std::move(problem), tight};
}

}  // namespace

Algorithm2Result algorithm2_kernel_detailed(const GaussianState& gx, const GaussianState& gxp,
                                            const std::vector<CMat>& povm_x,
                                            const std::vector<CMat>& povm_xp,
                                            const Orderings& orderings, double eps,
                                            double delta, std::uint64_t seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  if (gx.modes != gxp.modes) throw ValidationError("states must share the mode count");
  if (povm_x.size() != povm_xp.size()) throw ValidationError("POVM lists must share the length");
  const int k = static_cast<int>(povm_x.size());
  const int m = gx.modes - k;
  if (m < 0) throw ValidationError("more POVM elements than modes");

  Algorithm2Result out;
  if (k == 0) {
    // empty measurement: plain Gaussian overlap, Algorithm 1 applies directly
    out.report = algorithm1_kernel(gx, gxp, orderings.t, eps, delta, seed, threads);
    out.numerator = out.report;
    return out;
  }

  std::vector<int> keep;
  for (int j = 0; j < k; ++j) keep.push_back(j);
  const GaussianState sx = partial_trace(gx, keep);
  const GaussianState sxp = partial_trace(gxp, keep);
  const PartialOverlapResult ov = partial_overlap(gx, gxp, m);

  DenominatorProblem den_x = make_denominator(sx, povm_x, orderings.s_x);
  DenominatorProblem den_xp = make_denominator(sxp, povm_xp, orderings.s_xp);

  // numerator: sample the (t (+) t)-PQD of the 2k-mode partial overlap state,
  // evaluate the product POVM at ordering -t, fold the overlap weight in
  const double t_ord = orderings.t;
  Mat num_cov = ov.state.cov;
  for (int i = 0; i < 4 * k; ++i) num_cov(i, i) -= t_ord;
  auto num_sampler =
      std::make_shared<GaussianSampler>(GaussianSampler::make(ov.state.mean, num_cov));
  auto num_evals = std::make_shared<std::vector<PovmPqd>>();
  for (const auto& pi : povm_x) num_evals->emplace_back(pi, -t_ord);
  for (const auto& pi : povm_xp) num_evals->emplace_back(pi, -t_ord);
  const double weight = ov.weight;

  double lo = 1.0, hi = 1.0;
  for (const auto& e : *num_evals) {
    const auto [a, b] = e.value_interval();
    const double cands[4] = {lo * a * kPi, lo * b * kPi, hi * a * kPi, hi * b * kPi};
    lo = *std::min_element(cands, cands + 4);
    hi = *std::max_element(cands, cands + 4);
  }
  const double num_tight = 1.02 * weight * (hi - std::min(lo, 0.0));
  const double num_theoretical =
      weight * povm_range_bound(OrderingVector::uniform(2 * k, t_ord));

  OverlapProblem num_problem;
  num_problem.modes = 2 * k;
  num_problem.sample = [num_sampler](Rng& rng) { return num_sampler->draw(rng); };
  num_problem.sign = [](const CVec&) { return 1.0; };
  num_problem.neg_volume = 1.0;
  num_problem.a_eval = [num_evals, weight](const CVec& mu) {
    double w = weight;
    for (int j = 0; j < mu.size(); ++j) w *= (*num_evals)[j](mu[j]);
    return w;
  };
  num_problem.range_bound = std::min(num_tight, num_theoretical);

  // pilot estimates steer the error budget split between the three runs
  const std::int64_t n_pilot = 1000;
  auto pilot = [&](const OverlapProblem& p, std::uint64_t salt) {
    Rng rng = Rng::shard(seed ^ salt, 0);
    double acc = 0.0;
    const double constant = pow_int(kPi, p.modes) * p.neg_volume;
    for (std::int64_t i = 0; i < n_pilot; ++i) {
      const CVec mu = p.sample(rng);
      acc += constant * p.sign(mu) * p.a_eval(mu);
    }
    return acc / static_cast<double>(n_pilot);
  };
  const double b_pilot = pilot(den_x.problem, 0x9E01ULL);
  const double c_pilot = pilot(den_xp.problem, 0x9E02ULL);
  const double a_pilot = pilot(num_problem, 0x9E03ULL);
  if (!(b_pilot > 0.0) || !(c_pilot > 0.0))
    throw GuardViolation("pilot denominator estimate is not positive");

  auto pilot_floor = [&](double est, double range) {
    const double err = range * std::sqrt(std::log(2.0 / (delta / 3.0)) / (2.0 * n_pilot));
    return std::max(0.8 * est, est - err);
  };
  const double b_lo = pilot_floor(b_pilot, den_x.problem.range_bound);
  const double c_lo = pilot_floor(c_pilot, den_xp.problem.range_bound);
  if (!(b_lo > 0.0) || !(c_lo > 0.0))
    throw GuardViolation("denominator too small to resolve with the pilot budget");

  const double khat =
      std::clamp(std::abs(a_pilot) / std::max(b_pilot * c_pilot, 1e-30), 0.25, 1.5);
  double eps_a = 0.5 * eps * b_lo * c_lo;
  double eps_b = std::min(0.25 * eps * b_lo / khat, 0.25 * b_lo);
  double eps_c = std::min(0.25 * eps * c_lo / khat, 0.25 * c_lo);

  const double delta_sub = delta / 3.0;
  out.numerator = mc_overlap(num_problem, eps_a, delta_sub, seed + 1, threads);
  out.denominator_x = mc_overlap(den_x.problem, eps_b, delta_sub, seed + 2, threads);
  out.denominator_xp = mc_overlap(den_xp.problem, eps_c, delta_sub, seed + 3, threads);

  if (out.denominator_x.value < 2.0 * eps_b || out.denominator_xp.value < 2.0 * eps_c)
    throw GuardViolation("estimated denominator below twice its error budget");

  out.eps_prime = 0.5 * std::min(b_pilot, c_pilot);
  const double eps_lemma = std::max({eps_a, eps_b, eps_c});
  const auto [ratio, bound] = combine_ratio(out.numerator.value, out.denominator_x.value,
                                            out.denominator_xp.value, eps_lemma, out.eps_prime);
  out.lemma_bound = bound;

  out.report.value = ratio;
  out.report.n_samples = out.numerator.n_samples + out.denominator_x.n_samples +
                         out.denominator_xp.n_samples + 3 * n_pilot;
  out.report.epsilon = eps;
  out.report.delta = delta;
  out.report.range_bound = num_problem.range_bound;
  out.report.seed = seed;
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

EstimateReport algorithm2_kernel(const GaussianState& gx, const GaussianState& gxp,
                                 const std::vector<CMat>& povm_x,
                                 const std::vector<CMat>& povm_xp, const Orderings& orderings,
                                 double eps, double delta, std::uint64_t seed, int threads) {
  return algorithm2_kernel_detailed(gx, gxp, povm_x, povm_xp, orderings, eps, delta, seed,
                                    threads)
      .report;
}

std::pair<double, double> combine_ratio(double a_est, double b_est, double c_est, double eps,
                                        double eps_prime) {
  if (!(eps > 0.0) || !(eps < eps_prime) || !(eps_prime < 1.0))
    throw ValidationError("need 0 < eps < eps' < 1");
  if (b_est <= eps_prime - eps || c_est <= eps_prime - eps)
    throw GuardViolation("denominator estimate at or below eps' - eps");
  const double value = a_est / (b_est * c_est);
  const double gap = eps_prime - eps;
  const double bound = (3.0 + eps) * eps / (eps_prime * eps_prime * gap * gap);
  return {value, bound};
}

EstimateReport pattern_sum_kernel(
    const std::vector<PatternPair>& patterns,
    const std::function<EstimateReport(const PatternPair&)>& subkernel, double tail_bound,
    double total_eps_budget) {
  const auto t0 = std::chrono::steady_clock::now();
  EstimateReport total;
  double eps_sum = 0.0;
  for (const auto& pp : patterns) {
    const EstimateReport sub = subkernel(pp);
    total.value += sub.value;
    total.n_samples += sub.n_samples;
    total.delta = std::max(total.delta, sub.delta);
    total.range_bound = std::max(total.range_bound, sub.range_bound);
    eps_sum += sub.epsilon;
  }
  if (eps_sum > total_eps_budget + 1e-15)
    throw Error("per-pattern error budgets exceed the requested total epsilon");
  total.epsilon = eps_sum + tail_bound;
  total.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return total;
}

}  // namespace qkpse
