#include "qkpse/sources.hpp"

#include <algorithm>
#include <cmath>

#include "qkpse/errors.hpp"
#include "qkpse/quadrature.hpp"

namespace qkpse {

void LonEncoding::validate() const {
  if (inputs.empty()) throw ValidationError("encoding has no input modes");
  if (V.dim() != modes()) throw ValidationError("transfer matrix dimension mismatch");
  if (!V.is_unitary()) throw ValidationError("encoding requires a unitary transfer matrix");
  for (const auto& in : inputs) in.validate();
}

ModeSampler::ModeSampler(const InputStateSpec& spec, double s) : pqd_(family_pqd(spec, s)) {
  const double v = 1.0 - s;
  switch (spec.kind) {
    case InputStateSpec::Kind::Vacuum:
      gaussian_direct_ = true;
      direct_variance_ = v / 2.0;
      return;
    case InputStateSpec::Kind::Coherent:
      gaussian_direct_ = true;
      direct_center_ = std::sqrt(spec.eta) * spec.gamma;
      direct_variance_ = v / 2.0;
      return;
    case InputStateSpec::Kind::Thermal:
      gaussian_direct_ = true;
      direct_variance_ = (2.0 * spec.eta * spec.nbar + v) / 2.0;
      return;
    case InputStateSpec::Kind::Fock:
      if (spec.n == 0) {
        gaussian_direct_ = true;
        direct_variance_ = v / 2.0;
        return;
      }
      break;
    default:
      break;
  }

  envelope_variance_ = 1.35 * v;
  if (spec.kind == InputStateSpec::Kind::Cat) {
    const cplx c = std::sqrt(spec.eta) * spec.gamma;
    envelope_ = {{c, 0.4}, {-c, 0.4}, {cplx(0.0, 0.0), 0.2}};
  } else {
    envelope_ = {{cplx(0.0, 0.0), 1.0}};
  }
  auto env = [this](cplx a) {
    double q = 0.0;
    for (const auto& comp : envelope_)
      q += comp.weight * 2.0 / (kPi * envelope_variance_) *
           std::exp(-2.0 * std::norm(a - comp.center) / envelope_variance_);
    return q;
  };
  auto ratio = [&, this](cplx a) { return std::abs(eval(a)) / env(a); };
  const double extent = 6.0 * pqd_.envelope_sigma;
  const MaxResult mx = find_signed_max(ratio, 0.0, extent, 201, 5);
  envelope_c_ = mx.value * 1.05;
}

double ModeSampler::eval(cplx alpha) const {
  CVec v(1);
  v[0] = alpha;
  return pqd_.eval(v);
}

cplx ModeSampler::draw(Rng& rng) const {
  if (gaussian_direct_) {
    const double sd = std::sqrt(direct_variance_ / 2.0);
    return direct_center_ + cplx(sd * rng.normal(), sd * rng.normal());
  }
  const double sd = std::sqrt(envelope_variance_ / 4.0);
  for (long attempts = 1;; ++attempts) {
    double u = rng.uniform();
    cplx center = envelope_.back().center;
    for (const auto& comp : envelope_) {
      if (u < comp.weight) {
        center = comp.center;
        break;
      }
      u -= comp.weight;
    }
    const cplx a = center + cplx(sd * rng.normal(), sd * rng.normal());
    double q = 0.0;
    for (const auto& comp : envelope_)
      q += comp.weight * 2.0 / (kPi * envelope_variance_) *
           std::exp(-2.0 * std::norm(a - comp.center) / envelope_variance_);
    if (rng.uniform() * envelope_c_ * q <= std::abs(eval(a))) return a;
    if (attempts > 40000)
      throw RejectionStall("rejection sampler acceptance rate below 1e-4");
  }
}

LonPqd::LonPqd(LonEncoding e, double s) : enc_(std::move(e)), s_(s) {
  enc_.validate();
  modes_.reserve(enc_.modes());
  for (const auto& in : enc_.inputs) modes_.emplace_back(in, s);
}

CVec LonPqd::to_inputs(const CVec& alpha) const { return enc_.V.V.conjugate() * alpha; }

double LonPqd::eval(const CVec& alpha) const {
  const CVec beta = to_inputs(alpha);
  double w = 1.0;
  for (int k = 0; k < enc_.modes(); ++k) w *= modes_[k].eval(beta[k]);
  return w;
}

double LonPqd::sign(const CVec& alpha) const {
  return eval(alpha) < 0.0 ? -1.0 : 1.0;
}

CVec LonPqd::sample(Rng& rng) const {
  CVec beta(enc_.modes());
  for (int k = 0; k < enc_.modes(); ++k) beta[k] = modes_[k].draw(rng);
  return enc_.V.V.transpose() * beta;  // alpha = beta V (row convention)
}

double LonPqd::neg_volume() const {
  double n = 1.0;
  for (const auto& m : modes_) n *= m.pqd().neg_volume;
  return n;
}

double spqd_output(const LonEncoding& e, double s, const CVec& alpha) {
  if (alpha.size() != e.modes()) throw ValidationError("evaluation point dimension mismatch");
  return LonPqd(e, s).eval(alpha);
}

CVec sample_output(const LonEncoding& e, double s, Rng& rng) {
  return LonPqd(e, s).sample(rng);
}

double lon_range_bound(const LonEncoding& e, double s) {
  e.validate();
  double bound = 2.0;
  for (int k = 0; k < e.modes(); ++k) {
    const PqdFunction sampling = family_pqd(e.inputs[k], s);
    const PqdFunction eval = family_pqd(e.inputs[k], -s);
    const double abs_max = std::max(std::abs(eval.range.first), std::abs(eval.range.second));
    bound *= kPi * sampling.neg_volume * abs_max;
  }
  return bound;
}

double estimator_range(const LonEncoding& sample_side, const LonEncoding& eval_side, double s) {
  sample_side.validate();
  eval_side.validate();
  if (sample_side.modes() != eval_side.modes())
    throw ValidationError("encodings must share the mode count");
  double neg = 1.0;
  bool signs_flip = false;
  for (int k = 0; k < sample_side.modes(); ++k) {
    const PqdFunction sampling = family_pqd(sample_side.inputs[k], s);
    neg *= sampling.neg_volume;
    if (sampling.range.first < -1e-14) signs_flip = true;
  }
  // interval product of the per-mode evaluator value ranges (pi per mode)
  double lo = 1.0, hi = 1.0;
  for (int k = 0; k < eval_side.modes(); ++k) {
    const PqdFunction eval = family_pqd(eval_side.inputs[k], -s);
    const double a = kPi * eval.range.first;
    const double b = kPi * eval.range.second;
    const double cands[4] = {lo * a, lo * b, hi * a, hi * b};
    lo = *std::min_element(cands, cands + 4);
    hi = *std::max_element(cands, cands + 4);
  }
  if (signs_flip || neg > 1.0 + 1e-12) {
    const double mag = std::max(std::abs(lo), std::abs(hi));
    return 2.0 * neg * mag;
  }
  return hi - lo;
}

std::pair<double, double> optimize_ordering(const LonEncoding& e,
                                            const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("empty ordering grid");
  bool any = false;
  double best_s = 0.0, best_bound = 0.0;
  for (double s : grid) {
    if (s <= -1.0 || s >= 1.0) continue;
    double bound;
    try {
      bound = estimator_range(e, e, s);
    } catch (const Error&) {
      continue;
    }
    if (!any || bound < best_bound - 1e-15 ||
        (std::abs(bound - best_bound) <= 1e-15 && s > best_s)) {
      any = true;
      best_bound = bound;
      best_s = s;
    }
  }
  if (!any) throw Error("every ordering grid point failed");
  return {best_s, best_bound};
}

std::vector<double> default_ordering_grid() {
  std::vector<double> g;
  for (int i = 0; i < 41; ++i) g.push_back(-0.95 + 1.9 * i / 40.0);
  return g;
}

}  // namespace qkpse
