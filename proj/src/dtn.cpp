// SPDX-License-Identifier: Apache-2.0
#include "robinq/dtn.hpp"

#include <algorithm>
#include <sstream>

#include "robinq/kernels.hpp"

namespace robinq {

FullDtn assemble_full_dtn(const MetricGraph& g, cdouble lambda) {
  if (!g.is_simple())
    throw DomainError("vertex response needs a simple graph; subdivide loops/parallel edges first");
  FullDtn out;
  out.lambda = lambda;
  out.vertex_order = g.dtn_vertices();
  const int n = static_cast<int>(out.vertex_order.size());
  out.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    EdgeDtn d;
    try {
      d = edge_dtn(lambda, ed.length);
    } catch (const NumericError& err) {
      std::ostringstream os;
      os << err.what() << " [edge " << e << ": " << g.vertices()[ed.u].id << "-"
         << g.vertices()[ed.v].id << "]";
      throw NumericError(os.str());
    }
    const int iu = g.dtn_index(ed.u);
    const int iv = g.dtn_index(ed.v);
    if (iu >= 0) out.matrix(iu, iu) += d.a;
    if (iv >= 0) out.matrix(iv, iv) += d.a;
    if (iu >= 0 && iv >= 0) {
      out.matrix(iu, iv) += d.b;
      out.matrix(iv, iu) += d.b;
    }
  }
  return out;
}

ReducedDtn reduce_dtn(const FullDtn& full, int k) {
  const int n = static_cast<int>(full.matrix.rows());
  if (k < 1) throw DomainError("reduction needs at least one Robin vertex");
  if (k > n) throw DomainError("Robin count exceeds matrix size");
  ReducedDtn out;
  out.r = full.matrix.topLeftCorner(k, k);
  if (k == n) {
    out.matrix = out.r;
    out.k_rcond = 1.0;
    return out;
  }
  out.c = full.matrix.bottomLeftCorner(n - k, k);
  out.k = full.matrix.bottomRightCorner(n - k, n - k);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(out.k);
  // Measure K's conditioning against the whole assembly, not K's own norm:
  // at a Dirichlet point K can be a tiny multiple of the identity, which is
  // perfectly conditioned in isolation yet still marks the pole.
  const double norm_k = out.k.cwiseAbs().colwise().sum().maxCoeff();
  const double scale =
      std::max(full.matrix.cwiseAbs().colwise().sum().maxCoeff(), 1e-300);
  out.k_rcond = lu.rcond() * norm_k / scale;
  if (!(out.k_rcond > 1e-13))
    throw NumericError("lambda near Dirichlet spectrum (interior block singular)");
  out.matrix = out.r - full.matrix.topRightCorner(k, n - k) * lu.solve(out.c);
  return out;
}

ReducedDtn vertex_dtn(const MetricGraph& g, cdouble lambda) {
  return reduce_dtn(assemble_full_dtn(g, lambda),
                    static_cast<int>(g.robin_vertices().size()));
}

std::vector<cdouble> dtn_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("eigen-decomposition failed");
  std::vector<cdouble> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](cdouble a, cdouble b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma < mb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace robinq
