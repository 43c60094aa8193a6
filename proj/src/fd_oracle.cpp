// SPDX-License-Identifier: Apache-2.0
#include "robinq/fd_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace robinq {

namespace {
// Mass blend weight: mostly lumped, with enough of the consistent matrix to
// shrink the phase error to lambda^2 h^2 / 60 while staying second order.
constexpr double kLump = 0.6;
}  // namespace

DiscreteOperator discretize(const MetricGraph& g, const std::vector<cdouble>& alpha,
                            double nodes_per_unit) {
  if (alpha.size() != g.robin_vertices().size())
    throw DomainError("alpha vector length does not match Robin vertex count");
  if (nodes_per_unit * g.min_edge_length() < 8.0 - 1e-12)
    throw DomainError("mesh too coarse: need at least 8 cells on the shortest edge");

  std::vector<int> vdof(g.vertex_count(), -1);
  int dim = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (g.vertices()[v].cond.kind != VertexKind::Dirichlet) vdof[v] = dim++;

  std::vector<int> first_interior(g.edge_count());
  std::vector<int> cells(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    cells[e] = std::max<int>(2, std::lround(nodes_per_unit * g.edges()[e].length));
    first_interior[e] = dim;
    dim += cells[e] - 1;
  }

  DiscreteOperator op;
  op.dim = dim;
  std::vector<Eigen::Triplet<cdouble>> kt;
  std::vector<Eigen::Triplet<double>> mt;
  for (int e = 0; e < g.edge_count(); ++e) {
    const int n = cells[e];
    const double h = g.edges()[e].length / n;
    op.h_max = std::max(op.h_max, h);
    const double mdiag = h * (kLump / 2 + (1 - kLump) / 3);
    const double moff = h * (1 - kLump) / 6;
    auto dof = [&](int node) {  // node in 0..n along the edge
      if (node == 0) return vdof[g.edges()[e].u];
      if (node == n) return vdof[g.edges()[e].v];
      return first_interior[e] + node - 1;
    };
    for (int i = 0; i < n; ++i) {
      const int a = dof(i), b = dof(i + 1);
      if (a >= 0) {
        kt.emplace_back(a, a, cdouble(1 / h));
        mt.emplace_back(a, a, mdiag);
      }
      if (b >= 0) {
        kt.emplace_back(b, b, cdouble(1 / h));
        mt.emplace_back(b, b, mdiag);
      }
      if (a >= 0 && b >= 0) {
        kt.emplace_back(a, b, cdouble(-1 / h));
        kt.emplace_back(b, a, cdouble(-1 / h));
        mt.emplace_back(a, b, moff);
        mt.emplace_back(b, a, moff);
      }
    }
  }
  op.real_coupling = true;
  for (size_t j = 0; j < alpha.size(); ++j) {
    kt.emplace_back(vdof[g.robin_vertices()[j]], vdof[g.robin_vertices()[j]], alpha[j]);
    if (alpha[j].imag() != 0.0) op.real_coupling = false;
  }
  op.stiffness.resize(dim, dim);
  op.stiffness.setFromTriplets(kt.begin(), kt.end());
  op.mass.resize(dim, dim);
  op.mass.setFromTriplets(mt.begin(), mt.end());
  return op;
}

std::vector<cdouble> eigs_window(const DiscreteOperator& op, Rect window) {
  if (op.dim > 3000)
    throw DomainError("discrete operator dimension exceeds the dense solver cap (3000)");
  const Eigen::MatrixXd mass = Eigen::MatrixXd(op.mass);
  std::vector<cdouble> out;
  if (op.real_coupling) {
    const Eigen::MatrixXd stiff = Eigen::MatrixXcd(op.stiffness).real();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        stiff, mass, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    for (int i = 0; i < op.dim; ++i) {
      const cdouble z(es.eigenvalues()[i], 0.0);
      if (window.contains(z)) out.push_back(z);
    }
  } else {
    // Fold the SPD mass in by Cholesky: B = L^-1 K L^-T stays complex symmetric.
    const Eigen::LLT<Eigen::MatrixXd> llt(mass);
    const Eigen::MatrixXcd lo =
        Eigen::MatrixXd(llt.matrixL()).cast<cdouble>();
    const Eigen::MatrixXcd stiff = Eigen::MatrixXcd(op.stiffness);
    const Eigen::MatrixXcd y = lo.triangularView<Eigen::Lower>().solve(stiff);
    const Eigen::MatrixXcd b =
        lo.triangularView<Eigen::Lower>().solve(y.transpose()).transpose();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(b, false);
    if (ces.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
    for (int i = 0; i < op.dim; ++i)
      if (window.contains(ces.eigenvalues()[i])) out.push_back(ces.eigenvalues()[i]);
  }
  std::sort(out.begin(), out.end(), [](cdouble a, cdouble b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace robinq
