// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "robinq/graph.hpp"
#include "robinq/rootfind.hpp"

namespace robinq {

// Entire 2m x 2m system in the per-edge ansatz f_e = a_e C(x) + b_e S(x):
// for each vertex, (deg-1) continuity rows followed by one condition row
// (Robin / Kirchhoff flux sum / Dirichlet trace). det vanishes exactly on the
// spectrum.
struct SecularSystem {
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd dmatrix;  // entrywise d/dlambda
  // Condition-row index per Robin vertex, plus the trace coefficient row the
  // coupling constant multiplies (matrix.row(r) = flux part + alpha * trace).
  std::vector<int> robin_rows;
  Eigen::MatrixXcd robin_trace_rows;  // k x 2m
  cdouble lambda;
};

SecularSystem assemble_secular(const MetricGraph& g, const std::vector<cdouble>& alpha,
                               cdouble lambda);

struct LogDet {
  double log_magnitude;  // -inf at an exact zero
  double phase;          // in (-pi, pi]
};

// Row-equilibrated LU; exact for fixed input and overflow-safe far up the
// imaginary axis.
LogDet secular_logdet(const SecularSystem& sys);

// One-stop evaluation for Newton, contours, and continuation.
struct SecularPoint {
  LogDet det;
  double residual;      // |det| / prod of row 2-norms (Hadamard-normalized)
  cdouble dlogdet;      // tr(A^{-1} A')
  cdouble newton_step;  // -1/dlogdet, 0 when undefined
  std::vector<cdouble> dlogdet_dalpha;  // per Robin vertex, on request
};

SecularPoint secular_point(const MetricGraph& g, const std::vector<cdouble>& alpha,
                           cdouble lambda, bool with_alpha_derivatives = false);

// Adapter feeding the contour/quadtree machinery.
DetFn secular_det_fn(const MetricGraph& g, std::vector<cdouble> alpha);

int count_roots(const MetricGraph& g, const std::vector<cdouble>& alpha, Rect region,
                const ContourOptions& opt = {});

std::vector<RootResult> find_roots(const MetricGraph& g, const std::vector<cdouble>& alpha,
                                   Rect region, double tol, int workers = 1);

// Spectrum of the graph with Robin vertices pinned to zero; with
// full_decoupling every vertex is pinned and each edge contributes
// {n^2 pi^2 / ell^2} (self-test).
std::vector<RootResult> dirichlet_spectrum(const MetricGraph& g, Rect region,
                                           double tol = 1e-10,
                                           bool full_decoupling = false,
                                           int workers = 1);

// det(M(lambda) - diag(alpha)) on the Robin block, via the Schur-reduced
// vertex response; cross-check only (meromorphic, poles at the pinned
// spectrum).
cdouble reduced_secular_value(const MetricGraph& g, const std::vector<cdouble>& alpha,
                              cdouble lambda);
double reduced_secular_residual(const MetricGraph& g, const std::vector<cdouble>& alpha,
                                cdouble lambda);

bool near_dirichlet(cdouble lambda, const std::vector<RootResult>& pinned_spectrum,
                    double dist = 1e-6);

}  // namespace robinq
