#include "qkpse/permanent.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>

#include "qkpse/errors.hpp"
#include "qkpse/special.hpp"

namespace qkpse {

cplx ryser_permanent(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw ValidationError("permanent needs a square matrix");
  if (n == 0) return 1.0;
  if (n > 16) throw ValidationError("Ryser oracle capped at n = 16");

  // Ryser with Gray-code subset updates
  std::vector<cplx> row_sum(n, cplx(0.0, 0.0));
  cplx total = 0.0;
  std::uint32_t gray = 0;
  const std::uint32_t count = 1u << n;
  for (std::uint32_t i = 1; i < count; ++i) {
    const std::uint32_t next = i ^ (i >> 1);
    const std::uint32_t changed = next ^ gray;
    int bit = 0;
    while (!((changed >> bit) & 1u)) ++bit;
    const double sgn_col = (next & changed) ? 1.0 : -1.0;
    for (int r = 0; r < n; ++r) row_sum[r] += sgn_col * a(r, bit);
    gray = next;
    cplx prod = 1.0;
    for (int r = 0; r < n; ++r) prod *= row_sum[r];
    const int popcount = __builtin_popcount(next);
    total += ((n - popcount) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return total;
}

namespace {

double glynn_sample(const CMat& w, Rng& rng) {
  const int d = static_cast<int>(w.rows());
  double sign = 1.0;
  thread_local std::vector<double> y;
  y.assign(d, 1.0);
  for (int j = 0; j < d; ++j) {
    if (rng.bernoulli(0.5)) {
      y[j] = -1.0;
      sign = -sign;
    }
  }
  cplx prod = 1.0;
  for (int i = 0; i < d; ++i) {
    cplx dot = 0.0;
    for (int j = 0; j < d; ++j) dot += y[j] * w(i, j);
    prod *= dot;
  }
  return sign * prod.real();
}

}  // namespace

double glynn_estimate(const CMat& w, std::int64_t n_samples, std::uint64_t seed) {
  const int d = static_cast<int>(w.rows());
  if (w.cols() != d || d < 2 || d % 2 != 0)
    throw ValidationError("estimator expects an even-dimensional square matrix");
  if (w.operatorNorm() > 1.0 + 1e-8)
    throw ValidationError("estimator requires operator norm at most 1");
  if (n_samples < 1) throw ValidationError("need at least one sample");
  Rng rng(seed);
  double acc = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) acc += glynn_sample(w, rng);
  return acc / static_cast<double>(n_samples);
}

LossPattern sample_loss_pattern(const LossVector& eta, Rng& rng) {
  const int m = eta.modes();
  LossPattern lp;
  lp.p.resize(m);
  lp.q.resize(m);
  int wp = 0, wq = 0;
  for (int j = 0; j < m; ++j) {
    lp.p[j] = rng.bernoulli(eta[j]) ? 1 : 0;
    lp.q[j] = rng.bernoulli(eta[j]) ? 1 : 0;
    wp += lp.p[j];
    wq += lp.q[j];
  }
  lp.matched = (wp == wq);
  lp.weight = lp.matched ? wp : -1;
  return lp;
}

double uniform_eta_theta(int m, double eta) {
  double theta = 0.0;
  for (int n = 0; n <= m; ++n) {
    const double c = binomial(m, n);
    theta += c * c * std::pow(eta, 2.0 * n) * std::pow(1.0 - eta, 2.0 * (m - n));
  }
  return theta;
}

namespace {

std::vector<std::uint8_t> fixed_weight_uniform(int m, int n, Rng& rng) {
  // sequential scheme: include each position with probability
  // (remaining ones) / (remaining positions)
  std::vector<std::uint8_t> bits(m, 0);
  int remaining = n;
  for (int j = 0; j < m; ++j) {
    const int left = m - j;
    if (remaining > 0 && rng.bernoulli(static_cast<double>(remaining) / left)) {
      bits[j] = 1;
      --remaining;
    }
  }
  return bits;
}

}  // namespace

UniformEtaDraw sample_uniform_eta(int m, double eta, Rng& rng) {
  if (!(eta > 0.0 && eta < 1.0) && eta != 1.0)
    throw ValidationError("uniform-eta sampler needs eta in (0, 1]");
  UniformEtaDraw draw;
  const double theta = uniform_eta_theta(m, eta);
  if (!rng.bernoulli(theta)) {
    draw.halt = true;
    return draw;
  }
  // shared weight n from the squared-binomial law normalized by theta
  double u = rng.uniform() * theta;
  int n = m;
  for (int cand = 0; cand <= m; ++cand) {
    const double c = binomial(m, cand);
    const double p = c * c * std::pow(eta, 2.0 * cand) * std::pow(1.0 - eta, 2.0 * (m - cand));
    if (u < p) {
      n = cand;
      break;
    }
    u -= p;
  }
  draw.pattern.p = fixed_weight_uniform(m, n, rng);
  draw.pattern.q = fixed_weight_uniform(m, n, rng);
  draw.pattern.weight = n;
  draw.pattern.matched = true;
  return draw;
}

CMat reduced_matrix(const TransferMatrix& V, const LossPattern& lp) {
  if (!lp.matched) throw ValidationError("mismatched loss pattern has no reduced matrix");
  const int m = V.dim();
  if (static_cast<int>(lp.p.size()) != m || static_cast<int>(lp.q.size()) != m)
    throw ValidationError("pattern length mismatch");
  const int n = lp.weight;
  std::vector<int> rows, cols;
  for (int j = 0; j < m; ++j) {
    if (lp.p[j]) rows.push_back(j);
    if (lp.q[j]) cols.push_back(j);
  }
  CMat vn(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vn(i, j) = V.V(rows[i], cols[j]);
  CMat w = CMat::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = vn;
  w.bottomRightCorner(n, n) = vn.conjugate();
  return w;
}

EstimateReport lossy_photonic_kernel(const TransferMatrix& VX, const TransferMatrix& VXp,
                                     const LossVector& eta, std::int64_t repeats,
                                     std::uint64_t seed, int inner_bitstrings, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  if (VX.dim() != VXp.dim() || VX.dim() != eta.modes())
    throw ValidationError("dimension mismatch");
  TransferMatrix v(VX.V.adjoint() * VXp.V);
  if (!v.is_unitary(1e-8)) throw ValidationError("composite transfer matrix is not unitary");
  if (repeats < 1) throw ValidationError("need at least one repeat");

  constexpr std::int64_t chunk = 1 << 12;
  const std::int64_t shards = (repeats + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(shards), 0.0);

  auto run_shard = [&](std::int64_t idx) {
    Rng rng = Rng::shard(seed, static_cast<std::uint64_t>(idx));
    const std::int64_t lo = idx * chunk;
    const std::int64_t hi = std::min(repeats, lo + chunk);
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const LossPattern lp = sample_loss_pattern(eta, rng);
      if (!lp.matched) continue;  // contributes 0
      double value;
      if (lp.weight == 0) {
        value = 1.0;  // empty pattern, Per of the empty matrix
      } else {
        const CMat w = reduced_matrix(v, lp);
        double inner = 0.0;
        for (int b = 0; b < inner_bitstrings; ++b) inner += glynn_sample(w, rng);
        value = inner / inner_bitstrings;
      }
      if (value < -1.0 - 1e-9 || value > 1.0 + 1e-9)
        throw Error("per-repeat estimator escaped [-1, 1]");
      acc += value;
    }
    partial[static_cast<std::size_t>(idx)] = acc;
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(shards)));
  if (workers == 1) {
    for (std::int64_t i = 0; i < shards; ++i) run_shard(i);
  } else {
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::future<void>> pool;
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
  report.value = total / static_cast<double>(repeats);
  report.n_samples = repeats;
  report.range_bound = 1.0;
  report.seed = seed;
  report.delta = 0.05;
  report.epsilon = std::sqrt(std::log(2.0 / report.delta) / (2.0 * repeats));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

EstimateReport lossy_photonic_kernel_eps(const TransferMatrix& VX, const TransferMatrix& VXp,
                                         const LossVector& eta, double eps, double delta,
                                         std::uint64_t seed, int inner_bitstrings,
                                         int threads) {
  const std::int64_t repeats = hoeffding_samples(1.0, eps, delta);
  EstimateReport report =
      lossy_photonic_kernel(VX, VXp, eta, repeats, seed, inner_bitstrings, threads);
  report.epsilon = eps;
  report.delta = delta;
  return report;
}

}  // namespace qkpse
