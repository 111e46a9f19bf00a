#include "qkpse/gaussian.hpp"

#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/rng.hpp"
#include "qkpse/special.hpp"

namespace qkpse {

Mat symplectic_form(int modes) {
  Mat omega = Mat::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    omega(2 * j, 2 * j + 1) = 1.0;
    omega(2 * j + 1, 2 * j) = -1.0;
  }
  return omega;
}

GaussianState make_gaussian(Vec mean, Mat cov) {
  const auto dim = cov.rows();
  if (cov.cols() != dim || mean.size() != dim || dim % 2 != 0 || dim == 0)
    throw ValidationError("covariance/mean dimensions inconsistent");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw SymmetryViolation("covariance matrix is not symmetric");
  const int m = static_cast<int>(dim) / 2;
  Mat sym = 0.5 * (cov + cov.transpose());
  // uncertainty relation: cov + i Omega >= -1e-8
  CMat test = sym.cast<cplx>() + cplx(0.0, 1.0) * symplectic_form(m).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(test);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw PhysicalityViolation("covariance violates the uncertainty relation");
  Eigen::SelfAdjointEigenSolver<Mat> ps(sym);
  if (ps.eigenvalues().minCoeff() <= 0.0)
    throw PositiveDefiniteViolation("covariance is not positive definite");
  return GaussianState{m, std::move(mean), std::move(sym)};
}

GaussianState vacuum_state(int modes) {
  return GaussianState{modes, Vec::Zero(2 * modes), Mat::Identity(2 * modes, 2 * modes)};
}

GaussianState coherent_gaussian(const CVec& gamma) {
  const int m = static_cast<int>(gamma.size());
  Vec mean(2 * m);
  for (int j = 0; j < m; ++j) {
    mean[2 * j] = 2.0 * gamma[j].real();
    mean[2 * j + 1] = 2.0 * gamma[j].imag();
  }
  return GaussianState{m, std::move(mean), Mat::Identity(2 * m, 2 * m)};
}

GaussianState thermal_gaussian(int modes, double nbar) {
  if (nbar < 0.0) throw ValidationError("negative thermal occupation");
  return GaussianState{modes, Vec::Zero(2 * modes),
                       (2.0 * nbar + 1.0) * Mat::Identity(2 * modes, 2 * modes)};
}

GaussianState squeezed_gaussian(const Vec& r, const Vec& phases) {
  const int m = static_cast<int>(r.size());
  if (phases.size() != m) throw ValidationError("squeezing phase count mismatch");
  Mat cov = Mat::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    Mat block(2, 2);
    block << std::exp(2.0 * r[j]), 0.0, 0.0, std::exp(-2.0 * r[j]);
    Mat rot(2, 2);
    const double c = std::cos(phases[j]), s = std::sin(phases[j]);
    rot << c, -s, s, c;
    cov.block<2, 2>(2 * j, 2 * j) = rot * block * rot.transpose();
  }
  return GaussianState{m, Vec::Zero(2 * m), std::move(cov)};
}

GaussianState squeezed_gaussian(double r) {
  Vec rv(1), ph(1);
  rv << r;
  ph << 0.0;
  return squeezed_gaussian(rv, ph);
}

GaussianState two_mode_squeezed(double lambda) {
  if (lambda < 0.0 || lambda >= 1.0) throw ValidationError("TMS parameter must lie in [0, 1)");
  const double ch = (1.0 + lambda * lambda) / (1.0 - lambda * lambda);
  const double sh = 2.0 * lambda / (1.0 - lambda * lambda);
  Mat cov = Mat::Zero(4, 4);
  cov.block<2, 2>(0, 0) = ch * Mat::Identity(2, 2);
  cov.block<2, 2>(2, 2) = ch * Mat::Identity(2, 2);
  Mat z(2, 2);
  z << sh, 0.0, 0.0, -sh;
  cov.block<2, 2>(0, 2) = z;
  cov.block<2, 2>(2, 0) = z;
  return GaussianState{2, Vec::Zero(4), std::move(cov)};
}

Mat lon_orthogonal(const TransferMatrix& V) {
  const int m = V.dim();
  Mat o(2 * m, 2 * m);
  // complex column map a -> V^T a; per-entry 2x2 real rotation blocks
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const cplx v = V.V(k, j);  // (V^T)_{jk}
      o(2 * j, 2 * k) = v.real();
      o(2 * j, 2 * k + 1) = -v.imag();
      o(2 * j + 1, 2 * k) = v.imag();
      o(2 * j + 1, 2 * k + 1) = v.real();
    }
  }
  return o;
}

GaussianState apply_lon(const GaussianState& g, const TransferMatrix& V) {
  if (V.dim() != g.modes) throw ValidationError("transfer matrix dimension mismatch");
  if (!V.is_unitary()) throw ValidationError("apply_lon requires a unitary transfer matrix");
  const Mat o = lon_orthogonal(V);
  return GaussianState{g.modes, o * g.mean, o * g.cov * o.transpose()};
}

GaussianState apply_loss(const GaussianState& g, const LossVector& eta) {
  if (eta.modes() != g.modes) throw ValidationError("loss vector dimension mismatch");
  Vec root(2 * g.modes), one_minus(2 * g.modes);
  for (int j = 0; j < g.modes; ++j) {
    root[2 * j] = root[2 * j + 1] = std::sqrt(eta[j]);
    one_minus[2 * j] = one_minus[2 * j + 1] = 1.0 - eta[j];
  }
  Mat cov = root.asDiagonal() * g.cov * root.asDiagonal();
  cov += one_minus.asDiagonal().toDenseMatrix();
  return GaussianState{g.modes, root.asDiagonal() * g.mean, std::move(cov)};
}

GaussianState partial_trace(const GaussianState& g, const std::vector<int>& keep) {
  if (keep.empty()) throw ValidationError("partial trace must keep at least one mode");
  const int k = static_cast<int>(keep.size());
  std::vector<int> rows;
  rows.reserve(2 * k);
  for (int mode : keep) {
    if (mode < 0 || mode >= g.modes) throw ValidationError("mode index out of range");
    rows.push_back(2 * mode);
    rows.push_back(2 * mode + 1);
  }
  Vec mean(2 * k);
  Mat cov(2 * k, 2 * k);
  for (int i = 0; i < 2 * k; ++i) {
    mean[i] = g.mean[rows[i]];
    for (int j = 0; j < 2 * k; ++j) cov(i, j) = g.cov(rows[i], rows[j]);
  }
  return GaussianState{k, std::move(mean), std::move(cov)};
}

namespace {

// pseudo-inverse of a symmetric PSD block, dropping directions below tol
Mat pseudo_inverse(const Mat& c, const Vec& mean_c, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(c);
  const Vec& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  Vec inv = Vec::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] > tol * scale) {
      inv[i] = 1.0 / ev[i];
    } else {
      // a dropped direction carrying finite mean cannot be conditioned on 0
      const double overlap = std::abs(es.eigenvectors().col(i).dot(mean_c));
      if (overlap > 1e-8)
        throw SingularConditioning("singular conditioned block with nonzero mean");
    }
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

PartialOverlapResult partial_overlap(const GaussianState& g1, const GaussianState& g2,
                                     int overlap_modes) {
  if (g1.modes != g2.modes) throw ValidationError("partial overlap requires equal mode counts");
  const int n = g1.modes;
  const int m = overlap_modes;
  if (m < 1 || m > n) throw ValidationError("overlap mode count out of range");
  const int k = n - m;

  // weight = Tr[rho_red rho'_red] over the overlap modes
  std::vector<int> ov;
  for (int j = k; j < n; ++j) ov.push_back(j);
  const double weight = exact_gaussian_kernel(partial_trace(g1, ov), partial_trace(g2, ov));

  // transpose map (p -> -p) on the overlap modes of the first factor; the
  // kept modes stay untouched so the conditioned state feeds the POVM
  // evaluators directly (the appendix figure omits this partial transpose)
  Vec tsign = Vec::Ones(2 * n);
  for (int j = k; j < n; ++j) tsign[2 * j + 1] = -1.0;
  Mat cov1 = tsign.asDiagonal() * g1.cov * tsign.asDiagonal();
  Vec mean1 = tsign.asDiagonal() * g1.mean;

  const int dim = 4 * n;
  Mat big = Mat::Zero(dim, dim);
  big.topLeftCorner(2 * n, 2 * n) = cov1;
  big.bottomRightCorner(2 * n, 2 * n) = g2.cov;
  Vec mean(dim);
  mean << mean1, g2.mean;

  // balanced beam splitters pairing overlap mode j of each factor
  Mat bs = Mat::Identity(dim, dim);
  const double c = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < m; ++j) {
    const int a = 2 * (k + j);
    const int b = 2 * n + 2 * (k + j);
    for (int q = 0; q < 2; ++q) {
      bs(a + q, a + q) = c;
      bs(a + q, b + q) = c;
      bs(b + q, a + q) = c;
      bs(b + q, b + q) = -c;
    }
  }
  big = bs * big * bs.transpose();
  mean = bs * mean;

  // measured quadratures: p of the factor-1 overlap outputs, q of the
  // factor-2 overlap outputs (the twin-beam projection in this BS convention)
  std::vector<int> meas, kept;
  for (int j = 0; j < m; ++j) {
    meas.push_back(2 * (k + j) + 1);
    meas.push_back(2 * n + 2 * (k + j));
  }
  for (int j = 0; j < k; ++j) {
    kept.push_back(2 * j);
    kept.push_back(2 * j + 1);
  }
  for (int j = 0; j < k; ++j) {
    kept.push_back(2 * n + 2 * j);
    kept.push_back(2 * n + 2 * j + 1);
  }

  const int nm = static_cast<int>(meas.size());
  const int nk = static_cast<int>(kept.size());
  Mat cblock(nm, nm), bblock(nk, nm), ablock(nk, nk);
  Vec mean_c(nm), mean_a(nk);
  for (int i = 0; i < nm; ++i) {
    mean_c[i] = mean[meas[i]];
    for (int j = 0; j < nm; ++j) cblock(i, j) = big(meas[i], meas[j]);
  }
  for (int i = 0; i < nk; ++i) {
    mean_a[i] = mean[kept[i]];
    for (int j = 0; j < nm; ++j) bblock(i, j) = big(kept[i], meas[j]);
    for (int j = 0; j < nk; ++j) ablock(i, j) = big(kept[i], kept[j]);
  }

  if (k == 0) return {GaussianState{}, weight};

  const Mat cinv = pseudo_inverse(cblock, mean_c, 1e-10);
  Mat cov_out = ablock - bblock * cinv * bblock.transpose();
  Vec mean_out = mean_a - bblock * cinv * mean_c;
  cov_out = 0.5 * (cov_out + cov_out.transpose());
  return {GaussianState{2 * k, std::move(mean_out), std::move(cov_out)}, weight};
}

double nonclassical_depth(const GaussianState& g) {
  const double tau = 0.5 * (1.0 - s_max_nonneg(g));
  return tau < 1e-12 ? 0.0 : tau;
}

double s_max_nonneg(const GaussianState& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g.cov);
  return es.eigenvalues().minCoeff();
}

double exact_gaussian_kernel(const GaussianState& g1, const GaussianState& g2) {
  if (g1.modes != g2.modes) throw ValidationError("kernel requires equal mode counts");
  const Mat sum = g1.cov + g2.cov;
  Eigen::LLT<Mat> llt(sum);
  if (llt.info() != Eigen::Success)
    throw PositiveDefiniteViolation("singular covariance sum in Gaussian kernel");
  const Vec d = g1.mean - g2.mean;
  const double quad = d.dot(llt.solve(d));
  double logdet = 0.0;
  for (int i = 0; i < sum.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
  // sqrt(det) = prod of Cholesky diagonal
  return std::exp(g1.modes * std::log(2.0) - 0.5 * quad - logdet);
}

GaussianState random_gaussian(int modes, Rng& rng, double max_squeeze) {
  Vec nbar(2 * modes);
  for (int j = 0; j < modes; ++j) {
    const double t = 2.0 * rng.uniform();  // 2 nbar
    nbar[2 * j] = nbar[2 * j + 1] = 1.0 + t;
  }
  Vec squeeze(2 * modes);
  for (int j = 0; j < modes; ++j) {
    const double r = (2.0 * rng.uniform() - 1.0) * max_squeeze;
    squeeze[2 * j] = std::exp(r);
    squeeze[2 * j + 1] = std::exp(-r);
  }
  const Mat o1 = lon_orthogonal(TransferMatrix(haar_unitary(modes, rng)));
  const Mat o2 = lon_orthogonal(TransferMatrix(haar_unitary(modes, rng)));
  const Mat symp = o1 * squeeze.asDiagonal() * o2;
  Mat cov = symp * nbar.asDiagonal() * symp.transpose();
  Vec mean(2 * modes);
  for (int i = 0; i < 2 * modes; ++i) mean[i] = 1.5 * rng.normal();
  return make_gaussian(std::move(mean), std::move(cov));
}

}  // namespace qkpse
