#include "qkpse/quadrature.hpp"

#include <cmath>
#include <limits>

#include "qkpse/errors.hpp"

namespace qkpse {
namespace {

struct RadialIntegrand {
  const std::function<double(cplx)>& f;
  cplx center;
  int n_angular;

  double operator()(double r) const {
    if (r == 0.0) return 0.0;
    const double ht = 2.0 * kPi / n_angular;
    double ring = 0.0;
    for (int j = 0; j < n_angular; ++j) {
      const double t = (j + 0.5) * ht;
      ring += f(center + cplx(r * std::cos(t), r * std::sin(t)));
    }
    return r * ring * ht;
  }
};

double simpson_rec(const RadialIntegrand& g, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// initial 64-panel grid, then locally dyadic Simpson refinement per panel
double radial_pass(const RadialIntegrand& g, double radius, double tol_abs) {
  const int panels = 64;
  const double h = radius / panels;
  double total = 0.0;
  double fa = g(0.0);
  for (int i = 0; i < panels; ++i) {
    const double a = i * h;
    const double b = a + h;
    const double fm = g(0.5 * (a + b));
    const double fb = g(b);
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(g, a, b, fa, fm, fb, whole, tol_abs / panels, 24);
    fa = fb;
  }
  return total;
}

}  // namespace

double integrate_polar(const std::function<double(cplx)>& f,
                       const PolarQuadratureOptions& opts) {
  int na = opts.initial_angular;
  double scale = 1.0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it <= opts.max_refinements; ++it) {
    RadialIntegrand g{f, opts.center, na};
    const double cur = radial_pass(g, opts.radius, 0.1 * opts.rel_tol * scale);
    if (it > 0 && std::abs(cur - prev) <= opts.rel_tol * std::max(std::abs(cur), 1e-300))
      return cur;
    prev = cur;
    scale = std::max(std::abs(cur), 1e-12);
    na *= 2;
  }
  throw NonConvergence("polar quadrature did not converge to requested tolerance");
}

namespace {

MaxResult grid_search(const std::function<double(cplx)>& f, cplx center, double radius,
                      int grid, int zooms, bool absolute) {
  cplx best_at = center;
  double best_key = -std::numeric_limits<double>::infinity();
  double best_val = 0.0;
  cplx lo = center - cplx(radius, radius);
  double span = 2.0 * radius;
  for (int z = 0; z <= zooms; ++z) {
    const double h = span / (grid - 1);
    cplx local_at = best_at;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const cplx a = lo + cplx(i * h, j * h);
        const double v = f(a);
        const double key = absolute ? std::abs(v) : v;
        if (key > best_key) {
          best_key = key;
          best_val = v;
          local_at = a;
        }
      }
    }
    best_at = local_at;
    span = 4.0 * h;
    lo = best_at - cplx(span / 2.0, span / 2.0);
  }
  return {best_at, best_val};
}

}  // namespace

MaxResult find_signed_max(const std::function<double(cplx)>& f, cplx center, double radius,
                          int grid, int zooms) {
  return grid_search(f, center, radius, grid, zooms, false);
}

MaxResult find_abs_max(const std::function<double(cplx)>& f, cplx center, double radius,
                       int grid, int zooms) {
  return grid_search(f, center, radius, grid, zooms, true);
}

}  // namespace qkpse
