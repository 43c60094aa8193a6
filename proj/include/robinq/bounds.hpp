// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "robinq/graph.hpp"

namespace robinq {

// Piecewise-linear function on the graph: per edge, `nodes` uniformly spaced
// real values including both endpoints, continuous across vertices.
struct TestFunction {
  std::vector<std::vector<double>> values;
};

TestFunction random_test_function(const MetricGraph& g, std::uint64_t seed,
                                  int nodes = 16);
TestFunction constant_test_function(const MetricGraph& g, double value, int nodes = 16);

// Form quotient (energy + coupling terms) / L2 norm with exact cellwise
// integrals. alpha is per Robin vertex.
cdouble rayleigh_quotient(const MetricGraph& g, const std::vector<cdouble>& alpha,
                          const TestFunction& f);

// Enclosing region for the form's numerical range.
struct RangeRegion {
  bool constant = true;
  cdouble alpha{0.0, 0.0};
  std::vector<cdouble> alphas;
  double min_robin_deg = 1.0;  // smallest degree among the Robin vertices
  double ell_min = 1.0;
  // 2 when an edge joins two Robin vertices (or loops at one): the vertex
  // cut-offs then share edges and the trace constant doubles.
  double trace_factor = 1.0;

  static RangeRegion constant_alpha(cdouble a, const MetricGraph& g);
  static RangeRegion variable_alpha(std::vector<cdouble> a, const MetricGraph& g);
};

// Constant-alpha variants are closed-form. The variable-alpha variant is a
// grid + coordinate-descent feasibility search: `true` comes with an explicit
// witness, `false` may be a grid artifact (documented approximate).
bool region_membership(cdouble z, const RangeRegion& region);

// Closed form for a Robin set with pairwise non-adjacent vertices; the
// graph-aware overload doubles the 1/(deg*ell) term when edges are shared.
double real_part_lower_bound(cdouble alpha, double min_robin_deg, double ell_min);
double real_part_lower_bound(cdouble alpha, const MetricGraph& g);

// min of the deep-coupling square bound and the flat-test-function bound;
// requires equal real alpha < 0 at every Robin vertex.
double first_eigenvalue_upper_bounds(double alpha, const MetricGraph& g);

// Checks |Im lambda| against the parabola-shaped control for couplings in the
// closed right half-plane.
bool imag_part_bound(cdouble lambda, const std::vector<cdouble>& alpha,
                     const MetricGraph& g);

struct TraceMode {
  enum Kind { Local, Global } kind = Local;
  int vertex = 0;                    // Local
  std::map<int, double> xi;          // Local: per incident edge index, in (0,1]
  std::vector<int> vertex_set;       // Global
  static TraceMode local(int v, std::map<int, double> xi_by_edge);
  static TraceMode global(std::vector<int> vertices);
};

// Slack (RHS - LHS) of the vertex-trace estimate; nonnegative up to rounding.
double trace_inequality_check(const MetricGraph& g, const TestFunction& f,
                              const TraceMode& mode);

// Negative eigenvalue of the equilateral-star model via bisection on
// sqrt(mu) coth(sqrt(mu) ell) + alpha/D over (0, (alpha/D)^2]; absent when
// alpha >= -D/ell.
std::optional<double> star_secular_solve(double alpha, double ell, double D);

// Winding-number count over [-R, 0) x [-1e-6, 1e-6] with R from
// real_part_lower_bound; below the deep-coupling threshold the count must
// equal the number of Robin vertices.
int count_negative_eigenvalues(const MetricGraph& g, double alpha);

}  // namespace robinq
