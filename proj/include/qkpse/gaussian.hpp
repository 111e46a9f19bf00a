#pragma once

#include <vector>

#include "qkpse/types.hpp"

namespace qkpse {

// Multimode Gaussian state in the convention where the vacuum covariance is
// the identity and a coherent state |gamma> has mean (2 Re gamma, 2 Im gamma)
// per mode. Quadratures are interleaved (q_1, p_1, ..., q_m, p_m).
struct GaussianState {
  int modes = 0;
  Vec mean;  // length 2m
  Mat cov;   // 2m x 2m, symmetric, positive definite

  bool empty() const { return modes == 0; }
};

// Validates symmetry, positive definiteness and the uncertainty relation
// cov + i Omega >= -1e-8 before accepting the state.
GaussianState make_gaussian(Vec mean, Mat cov);

// The symplectic form in this convention (block diagonal [[0,1],[-1,0]]).
Mat symplectic_form(int modes);

GaussianState vacuum_state(int modes);
GaussianState coherent_gaussian(const CVec& gamma);
GaussianState thermal_gaussian(int modes, double nbar);
// cov diag(e^{2r}, e^{-2r}) rotated by phase per mode
GaussianState squeezed_gaussian(const Vec& r, const Vec& phases);
GaussianState squeezed_gaussian(double r);
// lambda = tanh(squeezing) in [0, 1)
GaussianState two_mode_squeezed(double lambda);

// 2m x 2m orthogonal symplectic image of the complex map gamma -> gamma V.
Mat lon_orthogonal(const TransferMatrix& V);

GaussianState apply_lon(const GaussianState& g, const TransferMatrix& V);
GaussianState apply_loss(const GaussianState& g, const LossVector& eta);
GaussianState partial_trace(const GaussianState& g, const std::vector<int>& keep);

struct PartialOverlapResult {
  GaussianState state;  // 2k modes: kept modes of g1 then kept modes of g2
  double weight;        // trace of the (sub-normalized) overlap operator
};

// Contracts the last `overlap_modes` modes of g1 and g2 against each other
// via twin-beam projections: transpose map on the first factor, balanced
// beam splitters pairing the overlap modes, then conditioning on the
// projected quadratures with a generalized inverse.
PartialOverlapResult partial_overlap(const GaussianState& g1, const GaussianState& g2,
                                     int overlap_modes);

// tau = max(0, (1 - lambda_min(cov)) / 2)
double nonclassical_depth(const GaussianState& g);

// lambda_min(cov): supremum ordering s with cov - sI positive definite.
double s_max_nonneg(const GaussianState& g);

// Tr[rho rho'] = 2^m exp(-1/2 d (S+S')^{-1} d^T) / sqrt(det(S+S'))
double exact_gaussian_kernel(const GaussianState& g1, const GaussianState& g2);

// Random physical Gaussian state for property tests: random symplectic
// (orthogonal x diagonal squeezing x orthogonal) acting on a thermal state.
GaussianState random_gaussian(int modes, class Rng& rng, double max_squeeze = 0.75);

}  // namespace qkpse
