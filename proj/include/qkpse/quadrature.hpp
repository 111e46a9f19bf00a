#pragma once

#include <functional>

#include "qkpse/types.hpp"

namespace qkpse {

struct PolarQuadratureOptions {
  double radius = 6.0;
  cplx center = 0.0;
  int initial_radial = 64;
  int initial_angular = 64;
  double rel_tol = 1e-6;
  int max_refinements = 6;
};

// Integral of f over the disk |alpha - center| <= radius with respect to
// d^2 alpha. Composite Simpson in r, midpoint (trapezoid) in the periodic
// angle, dyadic refinement until the relative change drops below rel_tol.
// Throws NonConvergence when refinement stalls.
double integrate_polar(const std::function<double(cplx)>& f,
                       const PolarQuadratureOptions& opts);

// Maximum of f (signed) over the square of half-width radius around center:
// coarse grid followed by zoomed grid refinements around the best point.
struct MaxResult {
  cplx argmax;
  double value;
};
MaxResult find_signed_max(const std::function<double(cplx)>& f, cplx center, double radius,
                          int grid = 161, int zooms = 5);

// Maximum of |f|, returning the signed value at the argmax.
MaxResult find_abs_max(const std::function<double(cplx)>& f, cplx center, double radius,
                       int grid = 161, int zooms = 5);

}  // namespace qkpse
