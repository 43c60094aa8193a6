// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "robinq/graph.hpp"

namespace robinq {

// Vertex response matrix on the non-Dirichlet vertices (Robin block first,
// then Standard), built by scattering every edge's 2x2 response.
struct FullDtn {
  Eigen::MatrixXcd matrix;
  std::vector<int> vertex_order;  // graph vertex index per row
  cdouble lambda;
};

// graph must be simple (run subdivide_special_edges first).
FullDtn assemble_full_dtn(const MetricGraph& g, cdouble lambda);

/// Schur reduction onto the leading k x k (Robin) block:
//   full = [[R, C^T], [C, K]],  reduced = R - C^T K^{-1} C.
struct ReducedDtn {
  Eigen::MatrixXcd matrix;       // k x k
  Eigen::MatrixXcd r, c, k;      // blocks as partitioned
  double k_rcond;                // reciprocal condition estimate of K (1 if empty)
};

ReducedDtn reduce_dtn(const FullDtn& full, int k);

/// Convenience: assemble + reduce at the graph's Robin count.
ReducedDtn vertex_dtn(const MetricGraph& g, cdouble lambda);

// Eigenvalues of a small dense complex matrix, sorted by (|z|, Re, Im).
std::vector<cdouble> dtn_eigenvalues(const Eigen::MatrixXcd& m);

}  // namespace robinq
