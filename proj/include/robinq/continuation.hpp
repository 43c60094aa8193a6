// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "robinq/graph.hpp"
#include "robinq/rootfind.hpp"

namespace robinq {

// Per-Robin-vertex coupling ray alpha_j(t) = base_j + t * modulus_j * e^{i angle_j}.
struct VertexPathSpec {
  cdouble base{0.0, 0.0};
  double modulus = 0.0;
  double angle = 0.0;
};

struct ParameterPath {
  std::vector<VertexPathSpec> specs;
  double t_max = 1.0;

  // Margin keeping "leftward" directions inside a closed subsector of the
  // open left half-plane.
  static constexpr double kSectorMargin = 0.05;

  std::vector<cdouble> alphas(double t) const;
  std::vector<cdouble> velocities() const;  // d alpha_j / dt (constant)

  // Moving into the left half-plane sector (these drive eigenvalues off to
  // -direction^2 * t^2 / deg^2).
  bool case1(int j) const;
  // Frozen or with Re alpha bounded below along the ray.
  bool case2(int j) const;
  int case1_count() const;
};

enum class BranchStatus { Divergent, DirichletConvergent, Undecided };

struct BranchSample {
  double t;
  cdouble lambda;
  double residual;
};

struct Branch {
  std::vector<BranchSample> samples;
  BranchStatus status = BranchStatus::Undecided;
  cdouble limit_point{0.0, 0.0};  // set when DirichletConvergent
  int multiplicity = 1;           // persistent root multiplicity along the branch
  bool crossing = false;          // stopped at a suspected branch crossing
  double crossing_t = 0.0;
  bool early_stop = false;  // halted once divergence was unambiguous
  RootResult origin;
};

struct TraceConfig {
  double tol = 1e-10;
  double div_threshold = 1e3;
  double conv_tol = 1e-6;
  double early_stop_factor = 1.2;
  double dt_floor_factor = 1e-8;  // floor = (1 + t) * this
  double seed_t = 1e-3;           // offset used to split degenerate starting roots
  int max_steps = 100000;
  bool restart_after_crossing = false;
  double t_start = 0.0;
};

// Predictor-corrector continuation of one eigenvalue branch from t_start to
// t_max. Stops early (flagged) once distance from [0, inf) exceeds
// div_threshold * early_stop_factor monotonically, or at a suspected
// crossing. Classification is left to classify_limit.
Branch trace_branch(const MetricGraph& g, const ParameterPath& path, RootResult start,
                    const TraceConfig& cfg = {});

// Applies the divergent / converges-to-pinned-spectrum dichotomy to a traced
// branch; writes and returns the status. Branches that stall while merging
// into a persistent pinned eigenvalue are accepted via 1/t extrapolation of
// the tail.
BranchStatus classify_limit(Branch& b, const std::vector<RootResult>& pinned_spectrum,
                            const TraceConfig& cfg = {});

// Fits lambda ~ -alpha_j^2/c^2 on the asymptotic tail (Re alpha_j < -5/ell_min)
// and the exponential rate of the remainder via the slope of
// log|lambda + alpha_j^2/deg^2| - 2 log|alpha_j| against Re alpha_j.
std::pair<cdouble, double> fit_divergence_law(const Branch& b, const ParameterPath& path,
                                              const MetricGraph& g, int vertex_j);

// Traces every branch starting in `window` and returns how many diverge,
// counting multiplicities. Any branch still undecided at the horizon is an
// error ("inconclusive at horizon T").
int count_divergent(const MetricGraph& g, const ParameterPath& path, Rect window,
                    const TraceConfig& cfg = {}, int workers = 1);

}  // namespace robinq
