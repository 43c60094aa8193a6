// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "robinq/graph.hpp"
#include "robinq/rootfind.hpp"

namespace robinq {

// P1 finite-element discretization of the graph Laplacian with the vertex
// couplings folded into the stiffness matrix. Unknowns: one value per
// non-Dirichlet vertex followed by the interior nodes of each edge.
struct DiscreteOperator {
  Eigen::SparseMatrix<cdouble> stiffness;  // complex symmetric
  Eigen::SparseMatrix<double> mass;        // SPD, blended lumped/consistent
  bool real_coupling = true;
  double h_max = 0.0;  // coarsest cell, for error budgets
  int dim = 0;
};

// nodes_per_unit fixes n_e = max(2, round(nodes_per_unit * ell_e)) cells per
// edge; requires at least 8 cells on the shortest edge.
DiscreteOperator discretize(const MetricGraph& g, const std::vector<cdouble>& alpha,
                            double nodes_per_unit);

// Dense eigensolve of the mass-scaled operator (dimension capped at 3000);
// eigenvalues inside the window, sorted by (Re, Im).
std::vector<cdouble> eigs_window(const DiscreteOperator& op, Rect window);

}  // namespace robinq
