#include "qkpse/fock.hpp"

#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/permanent.hpp"
#include "qkpse/phase_space.hpp"
#include "qkpse/special.hpp"

namespace qkpse {

std::vector<int> unflatten_index(int idx, int modes, int cutoff) {
  std::vector<int> occ(modes);
  for (int t = modes - 1; t >= 0; --t) {
    occ[t] = idx % cutoff;
    idx /= cutoff;
  }
  return occ;
}

int flatten_index(const std::vector<int>& occ, int cutoff) {
  int idx = 0;
  for (int n : occ) idx = idx * cutoff + n;
  return idx;
}

namespace {

CMat single_mode_density(const InputStateSpec& spec, int cutoff, double& deficit) {
  deficit = 0.0;
  switch (spec.kind) {
    case InputStateSpec::Kind::Vacuum: {
      CMat rho = CMat::Zero(cutoff, cutoff);
      rho(0, 0) = 1.0;
      return rho;
    }
    case InputStateSpec::Kind::SinglePhoton: {
      CMat rho = CMat::Zero(cutoff, cutoff);
      rho(0, 0) = 1.0 - spec.eta;
      rho(1, 1) = spec.eta;
      return rho;
    }
    case InputStateSpec::Kind::Fock: {
      if (spec.n >= cutoff) throw ValidationError("Fock occupation exceeds the cutoff");
      CMat rho = CMat::Zero(cutoff, cutoff);
      rho(spec.n, spec.n) = 1.0;
      if (spec.eta < 1.0) {
        FockOperator tmp{1, cutoff, rho, 0.0, false};
        tmp = apply_loss_kraus(tmp, LossVector::uniform(1, spec.eta), cutoff);
        return tmp.matrix;
      }
      return rho;
    }
    case InputStateSpec::Kind::Coherent: {
      // loss keeps coherent states coherent with scaled amplitude
      const CVec c = coherent_amplitudes(std::sqrt(spec.eta) * spec.gamma, cutoff);
      deficit = std::abs(1.0 - c.squaredNorm());
      return c * c.adjoint();
    }
    case InputStateSpec::Kind::Thermal: {
      const double nb = spec.eta * spec.nbar;
      CMat rho = CMat::Zero(cutoff, cutoff);
      double total = 0.0;
      for (int n = 0; n < cutoff; ++n) {
        const double pn = std::pow(nb / (nb + 1.0), n) / (nb + 1.0);
        rho(n, n) = pn;
        total += pn;
      }
      deficit = std::abs(1.0 - total);
      return rho;
    }
    case InputStateSpec::Kind::Cat: {
      const cplx g = spec.gamma;
      const CVec plus = coherent_amplitudes(g, cutoff);
      const CVec minus = coherent_amplitudes(-g, cutoff);
      CVec cat = plus + minus;
      const double norm2 = 2.0 + 2.0 * std::exp(-2.0 * std::norm(g));
      cat /= std::sqrt(norm2);
      deficit = std::abs(1.0 - cat.squaredNorm());
      CMat rho = cat * cat.adjoint();
      if (spec.eta < 1.0) {
        FockOperator tmp{1, cutoff, rho, deficit, false};
        tmp = apply_loss_kraus(tmp, LossVector::uniform(1, spec.eta), cutoff);
        return tmp.matrix;
      }
      return rho;
    }
  }
  throw ValidationError("unknown input family");
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

FockOperator fock_density(const std::vector<InputStateSpec>& inputs, int cutoff) {
  if (inputs.empty()) throw ValidationError("no input modes");
  if (cutoff < 2) throw ValidationError("cutoff must be at least 2");
  double total_deficit = 0.0;
  CMat rho;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    double deficit = 0.0;
    CMat one = single_mode_density(inputs[j], cutoff, deficit);
    total_deficit += deficit;
    rho = (j == 0) ? one : kron(rho, one);
  }
  if (total_deficit > 1e-6)
    throw ValidationError("truncated input state loses more than 1e-6 trace");
  return FockOperator{static_cast<int>(inputs.size()), cutoff, std::move(rho), total_deficit,
                      false};
}

FockOperator lon_fock_unitary(const TransferMatrix& V, int modes, int cutoff) {
  if (V.dim() != modes) throw ValidationError("transfer matrix dimension mismatch");
  if (!V.is_unitary(1e-8)) throw ValidationError("transfer matrix is not unitary");
  const int dim = static_cast<int>(std::pow(cutoff, modes) + 0.5);
  CMat u = CMat::Zero(dim, dim);
  bool overflow = false;

  std::vector<int> total_of(dim);
  for (int i = 0; i < dim; ++i) {
    const auto occ = unflatten_index(i, modes, cutoff);
    int t = 0;
    for (int n : occ) t += n;
    total_of[i] = t;
  }

  std::vector<double> lf(16 * modes + 1);
  for (std::size_t n = 0; n < lf.size(); ++n) lf[n] = log_factorial(static_cast<int>(n));

  for (int col = 0; col < dim; ++col) {
    const auto in = unflatten_index(col, modes, cutoff);
    const int n = total_of[col];
    if (n > cutoff - 1) overflow = true;
    if (n == 0) {
      u(0, 0) = 1.0;
      continue;
    }
    if (n > 16) throw ValidationError("photon sector too large for the permanent oracle");
    // rows of the pattern matrix: input mode index repeated in[j] times
    std::vector<int> rows;
    for (int j = 0; j < modes; ++j)
      for (int r = 0; r < in[j]; ++r) rows.push_back(j);
    for (int row = 0; row < dim; ++row) {
      if (total_of[row] != n) continue;
      const auto out = unflatten_index(row, modes, cutoff);
      std::vector<int> cols;
      for (int j = 0; j < modes; ++j)
        for (int c = 0; c < out[j]; ++c) cols.push_back(j);
      CMat pat(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) pat(a, b) = V.V(rows[a], cols[b]);
      double lognorm = 0.0;
      for (int j = 0; j < modes; ++j) lognorm += lf[in[j]] + lf[out[j]];
      u(row, col) = ryser_permanent(pat) * std::exp(-0.5 * lognorm);
    }
  }
  return FockOperator{modes, cutoff, std::move(u), 0.0, overflow};
}

FockOperator conjugate_lon(const FockOperator& rho, const TransferMatrix& V) {
  const FockOperator u = lon_fock_unitary(V, rho.modes, rho.cutoff);
  CMat out = u.matrix * rho.matrix * u.matrix.adjoint();
  return FockOperator{rho.modes, rho.cutoff, std::move(out), rho.trace_deficit,
                      u.sector_overflow};
}

FockOperator apply_loss_kraus(const FockOperator& rho, const LossVector& eta, int cutoff) {
  if (eta.modes() != rho.modes) throw ValidationError("loss vector dimension mismatch");
  if (cutoff != rho.cutoff) throw ValidationError("cutoff mismatch");
  const int d = cutoff;
  CMat current = rho.matrix;
  const int dim = rho.dim();

  for (int mode = 0; mode < rho.modes; ++mode) {
    const double e = eta[mode];
    if (e == 1.0) continue;
    // per-mode Kraus K_l = sum_n sqrt(C(n,l)) sqrt(eta)^{n-l} sqrt(1-eta)^l |n-l><n|
    std::vector<Vec> kraus(d);
    for (int l = 0; l < d; ++l) {
      Vec coef = Vec::Zero(d);
      for (int n = l; n < d; ++n)
        coef[n] = std::sqrt(binomial(n, l)) * std::pow(e, 0.5 * (n - l)) *
                  std::pow(1.0 - e, 0.5 * l);
      kraus[l] = coef;
    }
    // stride arithmetic for the chosen mode
    int stride = 1;
    for (int t = rho.modes - 1; t > mode; --t) stride *= d;
    CMat next = CMat::Zero(dim, dim);
    for (int l = 0; l < d; ++l) {
      const Vec& coef = kraus[l];
      for (int i = 0; i < dim; ++i) {
        const int ni = (i / stride) % d;
        if (ni + l >= d || coef[ni + l] == 0.0) continue;
        const int isrc = i + l * stride;
        for (int j = 0; j < dim; ++j) {
          const int nj = (j / stride) % d;
          if (nj + l >= d || coef[nj + l] == 0.0) continue;
          next(i, j) += coef[ni + l] * coef[nj + l] * current(isrc, j + l * stride);
        }
      }
    }
    current = std::move(next);
  }
  return FockOperator{rho.modes, cutoff, std::move(current), rho.trace_deficit,
                      rho.sector_overflow};
}

std::pair<FockOperator, double> tms_heralded_state(double lambda, int herald_n, int cutoff) {
  if (lambda < 0.0 || lambda >= 1.0) throw ValidationError("TMS parameter must lie in [0, 1)");
  if (herald_n >= cutoff) throw ValidationError("herald photon number exceeds cutoff");
  const double prob = (1.0 - lambda * lambda) * std::pow(lambda, 2.0 * herald_n);
  CMat rho = CMat::Zero(cutoff, cutoff);
  rho(herald_n, herald_n) = 1.0;
  return {FockOperator{1, cutoff, std::move(rho), 0.0, false}, prob};
}

FockOperator tms_density(double lambda, int cutoff) {
  if (lambda < 0.0 || lambda >= 1.0) throw ValidationError("TMS parameter must lie in [0, 1)");
  CVec amp = CVec::Zero(cutoff * cutoff);
  const double norm = std::sqrt(1.0 - lambda * lambda);
  for (int n = 0; n < cutoff; ++n) amp[n * cutoff + n] = norm * std::pow(lambda, n);
  return pure_state_density(amp, 2, cutoff);
}

FockOperator pure_state_density(const CVec& amplitudes, int modes, int cutoff) {
  const double deficit = std::abs(1.0 - amplitudes.squaredNorm());
  CMat rho = amplitudes * amplitudes.adjoint();
  return FockOperator{modes, cutoff, std::move(rho), deficit, false};
}

FockOperator fock_projector(int n, int cutoff) {
  if (n >= cutoff) throw ValidationError("projector photon number exceeds cutoff");
  CMat pi = CMat::Zero(cutoff, cutoff);
  pi(n, n) = 1.0;
  return FockOperator{1, cutoff, std::move(pi), 0.0, false};
}

double trace_of(const FockOperator& op) { return op.matrix.trace().real(); }

double overlap_trace(const FockOperator& a, const FockOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator dimension mismatch");
  return (a.matrix * b.matrix).trace().real();
}

double exact_kernel(const FockOperator& rho1, const FockOperator& rho2) {
  const double t1 = trace_of(rho1);
  const double t2 = trace_of(rho2);
  if (std::abs(t1) < 1e-300 || std::abs(t2) < 1e-300)
    throw ValidationError("zero-trace operator in kernel");
  return overlap_trace(rho1, rho2) / (t1 * t2);
}

double pqd_check(const FockOperator& rho, const OrderingVector& s, const CVec& alpha) {
  return spqd_from_fock_operator(rho, s, alpha);
}

}  // namespace qkpse
