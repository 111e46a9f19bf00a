#pragma once

#include <functional>

#include "qkpse/types.hpp"

namespace qkpse {

struct Dataset {
  std::vector<Vec> points;  // encoding descriptors
  Vec targets;

  int size() const { return static_cast<int>(points.size()); }
  void validate() const;
};

struct RidgeModel {
  Vec alphas;
  double lambda = 0.0;
};

// K_ij = kernel(x_i, x_j), symmetrized as (K + K^T) / 2.
Mat kernel_matrix(const Dataset& d, const std::function<double(const Vec&, const Vec&)>& kernel);

// Clip negative eigenvalues to zero (noise repair for estimated matrices).
Mat psd_project(const Mat& k);

// Solves (K + n lambda I) alpha = y. Eigenvalues in [-1e-6, 0) are floored to
// zero; anything below that floor errors out with a PSD-projection hint.
RidgeModel ridge_fit(const Mat& k, const Vec& y, double lambda);

// sum_i alphas_i kernel_row_i
double predict(const RidgeModel& model, const Vec& kernel_row);

}  // namespace qkpse
