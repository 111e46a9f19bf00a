#include "qkpse/phase_space.hpp"

#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/quadrature.hpp"
#include "qkpse/special.hpp"

namespace qkpse {
namespace {

void require_valid_ordering(double s) {
  if (!std::isfinite(s)) throw ValidationError("non-finite ordering parameter");
  if (s >= 1.0)
    throw OrderingInfeasible("s >= 1 lies in the singular Glauber-Sudarshan regime");
}

// eigenvalues of Delta^{(s)}(0): (2/(pi(1-s))) q^n with q = (s+1)/(s-1)
double point_eigenvalue(double s, int n) {
  const double q = (s + 1.0) / (s - 1.0);
  return 2.0 / (kPi * (1.0 - s)) * std::pow(q, n);
}

CMat build_point_matrix(double s, cplx alpha, int cutoff, int basis) {
  const CMat d = displacement_matrix(alpha, basis);
  CMat out = CMat::Zero(cutoff, cutoff);
  for (int j = 0; j < basis; ++j) {
    const double lam = point_eigenvalue(s, j);
    out.noalias() += lam * d.col(j).head(cutoff) * d.col(j).head(cutoff).adjoint();
  }
  return out;
}

}  // namespace

PointOperator single_mode_point_operator(double s, cplx alpha, int cutoff) {
  require_valid_ordering(s);
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw ValidationError("non-finite displacement");
  if (cutoff < 2) throw ValidationError("cutoff must be at least 2");

  const double x = std::norm(alpha);
  int basis = cutoff + 24 + static_cast<int>(std::ceil(6.0 * std::sqrt(x) + 2.0 * x));
  CMat mat = build_point_matrix(s, alpha, cutoff, basis);
  for (;;) {
    const int wider = basis + 32;
    CMat next = build_point_matrix(s, alpha, cutoff, wider);
    const double scale = std::max(next.cwiseAbs().maxCoeff(), 1e-300);
    if ((next - mat).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      mat = std::move(next);
      break;
    }
    mat = std::move(next);
    basis = wider;
    if (basis > 512) throw NonConvergence("point operator basis padding did not converge");
  }
  return PointOperator{s, alpha, cutoff, std::move(mat)};
}

double spqd_from_fock_operator(const FockOperator& op, const OrderingVector& s,
                               const CVec& alpha, bool* truncation_warning) {
  const int m = op.modes;
  if (s.modes() != m || alpha.size() != m)
    throw ValidationError("ordering/point dimension incompatible with operator");
  if (truncation_warning) *truncation_warning = op.trace_deficit > 1e-8;

  std::vector<CMat> delta;
  delta.reserve(m);
  for (int j = 0; j < m; ++j)
    delta.push_back(single_mode_point_operator(s[j], alpha[j], op.cutoff).matrix);

  // Tr[op K] with K = tensor product of the per-mode point operators
  cplx total = 0.0;
  const int dim = op.dim();
  std::vector<int> occ_i(m), occ_j(m);
  for (int i = 0; i < dim; ++i) {
    int rem = i;
    for (int t = m - 1; t >= 0; --t) {
      occ_i[t] = rem % op.cutoff;
      rem /= op.cutoff;
    }
    for (int j = 0; j < dim; ++j) {
      const cplx o = op.matrix(i, j);
      if (o == cplx(0.0, 0.0)) continue;
      int rem2 = j;
      for (int t = m - 1; t >= 0; --t) {
        occ_j[t] = rem2 % op.cutoff;
        rem2 /= op.cutoff;
      }
      cplx k = 1.0;
      for (int t = 0; t < m; ++t) k *= delta[t](occ_j[t], occ_i[t]);
      total += o * k;
    }
  }
  return total.real();
}

double spqd_lossy_single_photon(double eta, double s, cplx alpha) {
  require_valid_ordering(s);
  if (eta < 0.0 || eta > 1.0) throw ValidationError("eta out of [0, 1]");
  const double v = 1.0 - s;
  const double u = std::norm(alpha);
  return (2.0 * v * (v - 2.0 * eta) + 8.0 * eta * u) * std::exp(-2.0 * u / v) /
         (kPi * v * v * v);
}

double negvol_lossy_single_photon(double eta, double s) {
  require_valid_ordering(s);
  if (eta < 0.0 || eta > 1.0) throw ValidationError("eta out of [0, 1]");
  if (s <= 1.0 - 2.0 * eta || eta == 0.0) return 1.0;
  return 4.0 * eta / (1.0 - s) * std::exp((1.0 - s - 2.0 * eta) / (2.0 * eta)) - 1.0;
}

SinglePhotonExtrema extrema_lossy_single_photon(double eta, double s) {
  require_valid_ordering(s);
  SinglePhotonExtrema e;
  const double w = 1.0 + s;
  e.at_origin = 2.0 * (w - 2.0 * eta) / (kPi * w * w);
  if (eta > 0.0) {
    // stationary point of the (-s)-ordered closed form
    e.ring_radius_sq = w * (4.0 * eta - w) / (4.0 * eta);
    if (e.ring_radius_sq > 0.0) {
      e.has_ring = true;
      e.at_ring = 4.0 * eta / (kPi * w * w) * std::exp((s + 1.0 - 4.0 * eta) / (2.0 * eta));
    }
  }
  return e;
}

double spqd_lossy_cat(cplx gamma, double eta, double s, cplx alpha) {
  require_valid_ordering(s);
  if (eta < 0.0 || eta > 1.0) throw ValidationError("eta out of [0, 1]");
  const double v = 1.0 - s;
  const cplx c = std::sqrt(eta) * gamma;
  const double g2 = std::norm(gamma);
  const double lobe_p = std::exp(-2.0 * std::norm(alpha + c) / v);
  const double lobe_m = std::exp(-2.0 * std::norm(alpha - c) / v);
  const cplx cross = std::exp(-2.0 * (alpha + c) * (std::conj(alpha) - std::conj(c)) / v);
  const double interference = 2.0 * std::exp(-2.0 * g2) * cross.real();
  return (lobe_p + lobe_m + interference) / (kPi * v * (1.0 + std::exp(-2.0 * g2)));
}

double spqd_fock_state(int n, double s, cplx alpha) {
  require_valid_ordering(s);
  if (n < 0) throw ValidationError("negative photon number");
  const double u = std::norm(alpha);
  if (s < -1.0 + 1e-9) {
    // Husimi limit |<alpha|n>|^2 / pi
    return std::exp(-u + n * std::log(std::max(u, 1e-300)) - log_factorial(n)) / kPi;
  }
  const double v = 1.0 - s;
  const double q = (s + 1.0) / (s - 1.0);
  const double y = 4.0 * u / (v * (1.0 + s));
  return 2.0 / (kPi * v) * std::pow(q, n) * laguerre(n, 0, y) * std::exp(-2.0 * u / v);
}

double spqd_gaussian(const GaussianState& g, const OrderingVector& s, const CVec& alpha) {
  if (s.modes() != g.modes || alpha.size() != g.modes)
    throw ValidationError("ordering/point dimension mismatch");
  const int m = g.modes;
  for (int j = 0; j < m; ++j) require_valid_ordering(s[j]);
  Mat sigma = g.cov;
  for (int j = 0; j < m; ++j) {
    sigma(2 * j, 2 * j) -= s[j];
    sigma(2 * j + 1, 2 * j + 1) -= s[j];
  }
  Eigen::LLT<Mat> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw PositiveDefiniteViolation("cov - diag(s) is not positive definite");
  Vec r(2 * m);
  for (int j = 0; j < m; ++j) {
    r[2 * j] = 2.0 * alpha[j].real();
    r[2 * j + 1] = 2.0 * alpha[j].imag();
  }
  const Vec d = r - g.mean;
  const double quad = d.dot(llt.solve(d));
  double logdet = 0.0;
  for (int i = 0; i < 2 * m; ++i) logdet += std::log(llt.matrixL()(i, i));
  const double log_norm = -0.5 * quad - logdet - m * std::log(2.0 * kPi);
  return std::exp(m * std::log(4.0) + log_norm);
}

double negvol_numeric(const PqdFunction& p, double envelope_sigma, double tol) {
  if (p.modes != 1) throw ValidationError("negvol_numeric expects a single-mode PQD");
  PolarQuadratureOptions opts;
  opts.radius = 6.0 * envelope_sigma;
  opts.rel_tol = tol;
  opts.max_refinements = 7;
  auto f = [&p](cplx a) {
    CVec v(1);
    v[0] = a;
    return std::abs(p.eval(v));
  };
  return integrate_polar(f, opts);
}

double povm_range_bound(const OrderingVector& t) {
  double tmin = 1.0;
  double prod = 1.0;
  for (int j = 0; j < t.modes(); ++j) {
    if (t[j] < 0.0)
      throw OrderingInfeasible("negative ordering entries give an unbounded range");
    tmin = std::min(tmin, t[j]);
    prod *= 2.0 / (t[j] + 1.0);
  }
  return 2.0 / (tmin + 1.0) * prod;
}

std::pair<double, double> single_mode_povm_interval(double t) {
  if (t < 0.0) throw OrderingInfeasible("negative ordering entries give an unbounded range");
  return {-2.0 * (1.0 - t) / (kPi * (1.0 + t) * (1.0 + t)), 2.0 / (kPi * (1.0 + t))};
}

PovmPqd::PovmPqd(CMat pi, double s) : pi_(std::move(pi)), s_(s) {
  require_valid_ordering(s);
  if (pi_.rows() != pi_.cols() || pi_.rows() < 1) throw ValidationError("POVM matrix not square");
  if ((pi_ - pi_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("POVM element must be Hermitian");
  diagonal_ = true;
  for (int i = 0; i < pi_.rows() && diagonal_; ++i)
    for (int j = 0; j < pi_.cols(); ++j)
      if (i != j && std::abs(pi_(i, j)) > 1e-14) {
        diagonal_ = false;
        break;
      }
  if (diagonal_) diag_ = pi_.diagonal().real();
}

double PovmPqd::operator()(cplx alpha) const {
  const int d = static_cast<int>(pi_.rows());
  if (diagonal_) {
    double w = 0.0;
    for (int n = 0; n < d; ++n)
      if (diag_[n] != 0.0) w += diag_[n] * spqd_fock_state(n, s_, alpha);
    return w;
  }
  // Tr[Pi Delta^{(s)}(alpha)] through the displaced spectral form
  const double x = std::norm(alpha);
  int basis = d + 24 + static_cast<int>(std::ceil(6.0 * std::sqrt(x) + 2.0 * x));
  const CMat disp = displacement_matrix(alpha, std::max(basis, d));
  double w = 0.0;
  for (int j = 0; j < disp.cols(); ++j) {
    const CVec col = disp.col(j).head(d);
    w += point_eigenvalue(s_, j) * (col.adjoint() * pi_ * col)(0).real();
  }
  return w;
}

std::pair<double, double> PovmPqd::value_interval() const {
  if (!interval_ready_) {
    const int d = static_cast<int>(pi_.rows());
    const double radius = 3.0 + 2.0 * std::sqrt(static_cast<double>(d));
    double lo = 0.0, hi = 0.0;  // the PQD decays to 0, so 0 is always attained
    if (diagonal_) {
      // diagonal elements give radially symmetric PQDs: 1D scan plus refine
      const int grid = 2001;
      double best_hi = -1e300, best_lo = 1e300, r_hi = 0.0, r_lo = 0.0;
      for (int i = 0; i < grid; ++i) {
        const double r = radius * i / (grid - 1);
        const double v = (*this)(cplx(r, 0.0));
        if (v > best_hi) {
          best_hi = v;
          r_hi = r;
        }
        if (v < best_lo) {
          best_lo = v;
          r_lo = r;
        }
      }
      auto refine = [&](double r0, double sign) {
        double step = radius / (grid - 1);
        double r = r0, val = sign * (*this)(cplx(r, 0.0));
        for (int it = 0; it < 40; ++it) {
          for (double cand : {r - step, r + step}) {
            if (cand < 0.0) continue;
            const double v = sign * (*this)(cplx(cand, 0.0));
            if (v > val) {
              val = v;
              r = cand;
            }
          }
          step *= 0.5;
        }
        return sign * val;
      };
      hi = std::max(hi, refine(r_hi, 1.0));
      lo = std::min(lo, refine(r_lo, -1.0));
    } else {
      auto f = [this](cplx a) { return (*this)(a); };
      const MaxResult mx = find_signed_max(f, 0.0, radius);
      auto g = [this](cplx a) { return -(*this)(a); };
      const MaxResult mn = find_signed_max(g, 0.0, radius);
      hi = std::max(hi, mx.value);
      lo = std::min(lo, -mn.value);
    }
    interval_ = {lo, hi};
    interval_ready_ = true;
  }
  return interval_;
}

PqdFunction family_pqd(const InputStateSpec& spec, double s) {
  require_valid_ordering(s);
  spec.validate();
  const double v = 1.0 - s;
  const double sigma = 0.5 * std::sqrt(v);
  PqdFunction p;
  p.modes = 1;

  switch (spec.kind) {
    case InputStateSpec::Kind::Vacuum: {
      p.eval = [s](const CVec& a) { return spqd_lossy_single_photon(0.0, s, a[0]); };
      p.neg_volume = 1.0;
      p.range = {0.0, 2.0 / (kPi * v)};
      p.envelope_sigma = 7.0 * sigma / 6.0;
      return p;
    }
    case InputStateSpec::Kind::Coherent: {
      const cplx c = std::sqrt(spec.eta) * spec.gamma;
      p.eval = [s, c, v](const CVec& a) {
        return 2.0 / (kPi * v) * std::exp(-2.0 * std::norm(a[0] - c) / v);
      };
      p.neg_volume = 1.0;
      p.range = {0.0, 2.0 / (kPi * v)};
      p.envelope_sigma = (std::abs(c) + 7.0 * sigma) / 6.0;
      return p;
    }
    case InputStateSpec::Kind::Thermal: {
      const double veff = 2.0 * spec.eta * spec.nbar + 1.0 - s;
      p.eval = [veff](const CVec& a) {
        return 2.0 / (kPi * veff) * std::exp(-2.0 * std::norm(a[0]) / veff);
      };
      p.neg_volume = 1.0;
      p.range = {0.0, 2.0 / (kPi * veff)};
      p.envelope_sigma = 7.0 * 0.5 * std::sqrt(veff) / 6.0;
      return p;
    }
    case InputStateSpec::Kind::Fock:
      if (spec.n == 0) return family_pqd(InputStateSpec::vacuum(), s);
      if (spec.n == 1) return family_pqd(InputStateSpec::single_photon(spec.eta), s);
      throw ValidationError("closed-form PQDs cover Fock inputs up to n = 1; use the oracle");
    case InputStateSpec::Kind::SinglePhoton: {
      const double eta = spec.eta;
      p.eval = [eta, s](const CVec& a) { return spqd_lossy_single_photon(eta, s, a[0]); };
      p.neg_volume = negvol_lossy_single_photon(eta, s);
      // extrema of the (+s)-ordered form: reuse the (-s) expressions at -s
      const SinglePhotonExtrema e = extrema_lossy_single_photon(eta, -s);
      double hi = std::max(0.0, e.at_origin);
      double lo = std::min(0.0, e.at_origin);
      if (e.has_ring) {
        hi = std::max(hi, e.at_ring);
        lo = std::min(lo, e.at_ring);
      }
      p.range = {lo, hi};
      p.envelope_sigma = 8.0 * sigma / 6.0;
      return p;
    }
    case InputStateSpec::Kind::Cat: {
      const double eta = spec.eta;
      const cplx gamma = spec.gamma;
      p.eval = [gamma, eta, s](const CVec& a) { return spqd_lossy_cat(gamma, eta, s, a[0]); };
      const double extent = std::sqrt(eta) * std::abs(gamma) + 8.0 * sigma;
      p.envelope_sigma = extent / 6.0;
      auto f = [&](cplx a) {
        CVec w(1);
        w[0] = a;
        return p.eval(w);
      };
      const MaxResult mx = find_signed_max(f, 0.0, extent, 201, 5);
      auto fneg = [&](cplx a) { return -f(a); };
      const MaxResult mn = find_signed_max(fneg, 0.0, extent, 201, 5);
      const double min_val = -mn.value;
      p.range = {std::min(min_val, 0.0), std::max(mx.value, 0.0)};
      if (min_val >= -1e-14) {
        p.neg_volume = 1.0;
      } else {
        p.neg_volume = negvol_numeric(p, p.envelope_sigma, 1e-6);
      }
      return p;
    }
  }
  throw ValidationError("unknown input family");
}

}  // namespace qkpse
