#include "qkpse/kernelml.hpp"

#include <cmath>

#include "qkpse/errors.hpp"

namespace qkpse {

void Dataset::validate() const {
  if (points.empty() || targets.size() != static_cast<Eigen::Index>(points.size()))
    throw ValidationError("dataset needs matching, nonempty points and targets");
}

Mat kernel_matrix(const Dataset& d,
                  const std::function<double(const Vec&, const Vec&)>& kernel) {
  d.validate();
  const int n = d.size();
  Mat k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double value;
      try {
        value = kernel(d.points[i], d.points[j]);
      } catch (const std::exception& e) {
        throw Error("kernel evaluation failed at (" + std::to_string(i) + ", " +
                    std::to_string(j) + "): " + e.what());
      }
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return 0.5 * (k + k.transpose());
}

Mat psd_project(const Mat& k) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (k + k.transpose()));
  const Vec ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

RidgeModel ridge_fit(const Mat& k, const Vec& y, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("regularization parameter must be positive");
  const int n = static_cast<int>(k.rows());
  if (k.cols() != n || y.size() != n) throw ValidationError("kernel matrix/target size mismatch");

  Mat sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() < -1e-6)
    throw Error("kernel matrix is not PSD beyond the -1e-6 floor; project it first");
  const Vec ev = es.eigenvalues().cwiseMax(0.0);
  Mat psd = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();

  const Mat system = psd + n * lambda * Mat::Identity(n, n);
  Eigen::LDLT<Mat> solver(system);
  Vec alphas = solver.solve(y);
  const double residual = (system * alphas - y).norm();
  if (residual > 1e-10 * std::max(1.0, y.norm()))
    throw Error("ridge solve residual exceeded tolerance");
  return RidgeModel{std::move(alphas), lambda};
}

double predict(const RidgeModel& model, const Vec& kernel_row) {
  if (kernel_row.size() != model.alphas.size())
    throw ValidationError("kernel row length mismatch");
  return model.alphas.dot(kernel_row);
}

}  // namespace qkpse
