#pragma once

#include <vector>

#include "qkpse/phase_space.hpp"
#include "qkpse/rng.hpp"
#include "qkpse/types.hpp"

namespace qkpse {

// Product input states behind a lossless network: the data-to-state map for
// linear optical encodings. Losses are folded into the per-mode inputs.
struct LonEncoding {
  std::vector<InputStateSpec> inputs;
  TransferMatrix V;

  int modes() const { return static_cast<int>(inputs.size()); }
  void validate() const;
};

// Per-mode sampler for |W^{(s)}| / N: closed-form PQD plus a Gaussian-mixture
// rejection envelope with inflated variance (nonnegative single-Gaussian
// families sample directly).
class ModeSampler {
 public:
  ModeSampler(const InputStateSpec& spec, double s);

  double eval(cplx alpha) const;
  const PqdFunction& pqd() const { return pqd_; }
  bool nonnegative() const { return pqd_.range.first >= -1e-14; }
  double abs_max() const {
    return std::max(std::abs(pqd_.range.first), std::abs(pqd_.range.second));
  }

  cplx draw(Rng& rng) const;  // one sample from |W|/N, throws RejectionStall

 private:
  PqdFunction pqd_;
  bool gaussian_direct_ = false;
  cplx direct_center_ = 0.0;
  double direct_variance_ = 1.0;  // E|alpha - c|^2 under the family itself
  struct Component {
    cplx center;
    double weight;
  };
  std::vector<Component> envelope_;
  double envelope_variance_ = 1.0;
  double envelope_c_ = 1.0;  // |W| <= C * envelope density
};

// Cached evaluator/sampler for the output PQD of an encoding at ordering s:
// W^{(s)}(alpha) = prod_k W^{(s)}_k(beta_k) with beta = alpha V^dagger.
class LonPqd {
 public:
  LonPqd(LonEncoding e, double s);

  const LonEncoding& encoding() const { return enc_; }
  double ordering() const { return s_; }

  CVec to_inputs(const CVec& alpha) const;  // beta = alpha V^dagger
  double eval(const CVec& alpha) const;
  double sign(const CVec& alpha) const;
  CVec sample(Rng& rng) const;  // alpha = beta V with per-mode beta draws
  double neg_volume() const;    // product of the per-mode negative volumes

  const std::vector<ModeSampler>& mode_samplers() const { return modes_; }

 private:
  LonEncoding enc_;
  double s_;
  std::vector<ModeSampler> modes_;
};

// prod_k W^{(s)}_{rho_k}(beta_k) with beta = alpha V^dagger.
double spqd_output(const LonEncoding& e, double s, const CVec& alpha);

// Per-mode draws beta_k ~ |W^{(s)}_k| / N_k, returned as alpha = beta V.
CVec sample_output(const LonEncoding& e, double s, Rng& rng);

// 2 prod_k pi N(W^{(s)}_k) max|W^{(-s)}_k|; independent of V.
double lon_range_bound(const LonEncoding& e, double s);

// Achievable range of the Algorithm-1 estimator sampling from `sample_side`
// at ordering s and evaluating the (-s)-PQD of `eval_side`: interval product
// of the per-mode value ranges, doubled when sampling signs can flip.
double estimator_range(const LonEncoding& sample_side, const LonEncoding& eval_side, double s);

// Grid minimizer of the achievable estimator range; ties break toward
// larger s. Throws when every grid point fails.
std::pair<double, double> optimize_ordering(const LonEncoding& e,
                                            const std::vector<double>& grid);

std::vector<double> default_ordering_grid();

}  // namespace qkpse
