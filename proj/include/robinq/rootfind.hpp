// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "robinq/common.hpp"

namespace robinq {

struct Rect {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diameter() const { return std::hypot(width(), height()); }
  cdouble center() const { return {(re_min + re_max) / 2, (im_min + im_max) / 2}; }
  bool contains(cdouble z, double pad = 0.0) const {
    return z.real() >= re_min - pad && z.real() <= re_max + pad &&
           z.imag() >= im_min - pad && z.imag() <= im_max + pad;
  }
  Rect expanded(double by) const {
    return {re_min - by, re_max + by, im_min - by, im_max + by};
  }
};

// One evaluation of a holomorphic determinant-like function, reduced to what
// contour walking and Newton need. `residual` is scale-free (0 at a zero).
struct DetPoint {
  double log_magnitude;
  double phase;          // in (-pi, pi]
  cdouble newton_step;   // -f/f'; 0 when undefined
  double residual;
};

using DetFn = std::function<DetPoint(cdouble)>;

struct ContourOptions {
  int max_samples = 200000;
  int max_nudges = 3;
  // A boundary sample counts as a zero sitting on the contour when the Newton
  // distance estimate |f/f'| drops below this fraction of 1 + |z|.
  double boundary_floor = 1e-12;
};

struct ContourCount {
  int winding = 0;
  Rect region;       // equals the input unless nudged outward
  bool nudged = false;
  int samples = 0;
};

// Winding number of fn along the rectangle boundary, counter-clockwise,
// refining until consecutive phase increments stay below pi/2. A zero
// detected on the boundary expands the rectangle by 1e-6 of its diameter
// (up to max_nudges times, reported via `nudged`).
ContourCount count_winding(const DetFn& fn, Rect region,
                           const ContourOptions& opt = {});

struct RootResult {
  cdouble lambda;
  int multiplicity = 1;
  double residual = 0.0;
};

struct SolveOptions {
  double tol = 1e-10;
  int workers = 1;
  ContourOptions contour;
};

// All zeros of fn inside the region: quadtree subdivision on winding counts,
// Newton polish with multiplicity-scaled steps, results sorted by (Re, Im).
// Unresolvable clusters (winding > 1 within tol) come back as one root
// carrying the cluster's multiplicity.
std::vector<RootResult> solve_zeros(const DetFn& fn, Rect region,
                                    const SolveOptions& opt = {});

}  // namespace robinq
