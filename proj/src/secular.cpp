// SPDX-License-Identifier: Apache-2.0
#include "robinq/secular.hpp"

#include <cmath>
#include <limits>

#include "robinq/dtn.hpp"
#include "robinq/kernels.hpp"

namespace robinq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_phase(double d) {
  while (d > M_PI) d -= 2 * M_PI;
  while (d <= -M_PI) d += 2 * M_PI;
  return d;
}

// Coefficients of one endpoint slot on columns (2e, 2e+1).
struct SlotCoeffs {
  cdouble trace_a, trace_b;    // f at the endpoint
  cdouble dtrace_a, dtrace_b;  // d/dlambda of the above
  cdouble flux_a, flux_b;      // derivative pointing into the vertex
  cdouble dflux_a, dflux_b;
};

SlotCoeffs slot_coeffs(const EdgeKernel& k, int end, cdouble lambda) {
  if (end == 0)
    return {{1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {-1, 0}, {0, 0}, {0, 0}};
  SlotCoeffs s;
  s.trace_a = k.c;
  s.trace_b = k.s;
  s.dtrace_a = k.dc_dlambda;
  s.dtrace_b = k.ds_dlambda;
  s.flux_a = -lambda * k.s;  // (C)' = -lambda S
  s.flux_b = k.c;            // (S)' = C
  s.dflux_a = -k.s - lambda * k.ds_dlambda;
  s.dflux_b = k.dc_dlambda;
  return s;
}

}  // namespace

SecularSystem assemble_secular(const MetricGraph& g, const std::vector<cdouble>& alpha,
                               cdouble lambda) {
  const int k = static_cast<int>(g.robin_vertices().size());
  if (static_cast<int>(alpha.size()) != k)
    throw DomainError("alpha vector length does not match Robin vertex count");
  const int m = g.edge_count();
  if (m == 0) throw DomainError("graph has no edges");
  const int n = 2 * m;

  std::vector<EdgeKernel> kern(m);
  for (int e = 0; e < m; ++e) kern[e] = eval_kernel(lambda, g.edges()[e].length);

  SecularSystem sys;
  sys.lambda = lambda;
  sys.matrix = Eigen::MatrixXcd::Zero(n, n);
  sys.dmatrix = Eigen::MatrixXcd::Zero(n, n);
  sys.robin_rows.assign(k, -1);
  sys.robin_trace_rows = Eigen::MatrixXcd::Zero(k, n);

  int row = 0;
  int robin_seen = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& slots = g.incident(v);
    const int deg = static_cast<int>(slots.size());
    if (deg == 0) throw DomainError("isolated vertex: " + g.vertices()[v].id);

    std::vector<SlotCoeffs> sc(deg);
    for (int i = 0; i < deg; ++i)
      sc[i] = slot_coeffs(kern[slots[i].edge], slots[i].end, lambda);

    for (int i = 0; i + 1 < deg; ++i) {  // continuity: trace_i - trace_{i+1} = 0
      const int ea = 2 * slots[i].edge, eb = 2 * slots[i + 1].edge;
      sys.matrix(row, ea) += sc[i].trace_a;
      sys.matrix(row, ea + 1) += sc[i].trace_b;
      sys.dmatrix(row, ea) += sc[i].dtrace_a;
      sys.dmatrix(row, ea + 1) += sc[i].dtrace_b;
      sys.matrix(row, eb) -= sc[i + 1].trace_a;
      sys.matrix(row, eb + 1) -= sc[i + 1].trace_b;
      sys.dmatrix(row, eb) -= sc[i + 1].dtrace_a;
      sys.dmatrix(row, eb + 1) -= sc[i + 1].dtrace_b;
      ++row;
    }

    const VertexKind kind = g.vertices()[v].cond.kind;
    if (kind == VertexKind::Dirichlet) {
      const int e0 = 2 * slots[0].edge;
      sys.matrix(row, e0) += sc[0].trace_a;
      sys.matrix(row, e0 + 1) += sc[0].trace_b;
      sys.dmatrix(row, e0) += sc[0].dtrace_a;
      sys.dmatrix(row, e0 + 1) += sc[0].dtrace_b;
    } else {
      for (int i = 0; i < deg; ++i) {  // flux balance
        const int e = 2 * slots[i].edge;
        sys.matrix(row, e) += sc[i].flux_a;
        sys.matrix(row, e + 1) += sc[i].flux_b;
        sys.dmatrix(row, e) += sc[i].dflux_a;
        sys.dmatrix(row, e + 1) += sc[i].dflux_b;
      }
      if (kind == VertexKind::Robin) {
        const int j = robin_seen++;
        const cdouble a = alpha[j];
        const int e0 = 2 * slots[0].edge;
        sys.robin_rows[j] = row;
        sys.robin_trace_rows(j, e0) = sc[0].trace_a;
        sys.robin_trace_rows(j, e0 + 1) = sc[0].trace_b;
        sys.matrix(row, e0) += a * sc[0].trace_a;
        sys.matrix(row, e0 + 1) += a * sc[0].trace_b;
        sys.dmatrix(row, e0) += a * sc[0].dtrace_a;
        sys.dmatrix(row, e0 + 1) += a * sc[0].dtrace_b;
      }
    }
    ++row;
  }
  if (row != n) throw NumericError("row catalogue does not fill the system");
  return sys;
}

namespace {

struct ScaledLu {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  Eigen::VectorXd row_scale;  // infinity norms used for equilibration
  double scale_log = 0.0;     // sum of log(row_scale)
  bool zero_row = false;
};

ScaledLu factor_equilibrated(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  ScaledLu f;
  f.row_scale.resize(n);
  Eigen::MatrixXcd scaled = a;
  for (int i = 0; i < n; ++i) {
    const double s = a.row(i).cwiseAbs().maxCoeff();
    f.row_scale[i] = s;
    if (s == 0.0 || !std::isfinite(s)) {
      f.zero_row = true;
      return f;
    }
    scaled.row(i) /= s;
    f.scale_log += std::log(s);
  }
  f.lu.compute(scaled);
  return f;
}

LogDet logdet_from(const ScaledLu& f, int n) {
  if (f.zero_row) return {-kInf, 0.0};
  double logmag = f.scale_log;
  double phase = f.lu.permutationP().determinant() < 0 ? M_PI : 0.0;
  for (int i = 0; i < n; ++i) {
    const cdouble u = f.lu.matrixLU()(i, i);
    const double au = std::abs(u);
    if (au == 0.0) return {-kInf, 0.0};
    logmag += std::log(au);
    phase += std::arg(u);
  }
  return {logmag, wrap_phase(phase)};
}

double hadamard_log(const Eigen::MatrixXcd& a) {
  double h = 0.0;
  for (int i = 0; i < a.rows(); ++i) h += std::log(a.row(i).norm());
  return h;
}

bool finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

LogDet secular_logdet(const SecularSystem& sys) {
  return logdet_from(factor_equilibrated(sys.matrix), static_cast<int>(sys.matrix.rows()));
}

SecularPoint secular_point(const MetricGraph& g, const std::vector<cdouble>& alpha,
                           cdouble lambda, bool with_alpha_derivatives) {
  const SecularSystem sys = assemble_secular(g, alpha, lambda);
  const int n = static_cast<int>(sys.matrix.rows());
  const ScaledLu f = factor_equilibrated(sys.matrix);

  SecularPoint p;
  p.det = logdet_from(f, n);
  p.residual =
      p.det.log_magnitude == -kInf ? 0.0 : std::exp(p.det.log_magnitude - hadamard_log(sys.matrix));

  if (f.zero_row || p.det.log_magnitude == -kInf) {
    p.dlogdet = kInf;
    p.newton_step = 0.0;
    if (with_alpha_derivatives) p.dlogdet_dalpha.assign(g.robin_vertices().size(), 0.0);
    return p;
  }

  Eigen::MatrixXcd rhs = sys.dmatrix;
  for (int i = 0; i < n; ++i) rhs.row(i) /= f.row_scale[i];
  p.dlogdet = f.lu.solve(rhs).trace();
  p.newton_step = finite(p.dlogdet) && std::abs(p.dlogdet) > 0.0
                      ? -1.0 / p.dlogdet
                      : cdouble(0.0, 0.0);

  if (with_alpha_derivatives) {
    const int k = static_cast<int>(g.robin_vertices().size());
    p.dlogdet_dalpha.assign(k, 0.0);
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e[sys.robin_rows[j]] = 1.0 / f.row_scale[sys.robin_rows[j]];
      const Eigen::VectorXcd x = f.lu.solve(e);
      p.dlogdet_dalpha[j] = (sys.robin_trace_rows.row(j) * x).value();
    }
  }
  return p;
}

DetFn secular_det_fn(const MetricGraph& g, std::vector<cdouble> alpha) {
  return [g, alpha = std::move(alpha)](cdouble lambda) -> DetPoint {
    const SecularPoint p = secular_point(g, alpha, lambda);
    return {p.det.log_magnitude, p.det.phase, p.newton_step, p.residual};
  };
}

int count_roots(const MetricGraph& g, const std::vector<cdouble>& alpha, Rect region,
                const ContourOptions& opt) {
  return count_winding(secular_det_fn(g, alpha), region, opt).winding;
}

std::vector<RootResult> find_roots(const MetricGraph& g, const std::vector<cdouble>& alpha,
                                   Rect region, double tol, int workers) {
  SolveOptions opt;
  opt.tol = tol;
  opt.workers = workers;
  return solve_zeros(secular_det_fn(g, alpha), region, opt);
}

std::vector<RootResult> dirichlet_spectrum(const MetricGraph& g, Rect region, double tol,
                                           bool full_decoupling, int workers) {
  const MetricGraph pinned =
      full_decoupling ? g.with_all_dirichlet() : g.with_robin_as_dirichlet();
  return find_roots(pinned, {}, region, tol, workers);
}

cdouble reduced_secular_value(const MetricGraph& g, const std::vector<cdouble>& alpha,
                              cdouble lambda) {
  const int k = static_cast<int>(g.robin_vertices().size());
  if (static_cast<int>(alpha.size()) != k)
    throw DomainError("alpha vector length does not match Robin vertex count");
  Eigen::MatrixXcd m = vertex_dtn(g, lambda).matrix;
  for (int j = 0; j < k; ++j) m(j, j) -= alpha[j];
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

double reduced_secular_residual(const MetricGraph& g, const std::vector<cdouble>& alpha,
                                cdouble lambda) {
  const int k = static_cast<int>(g.robin_vertices().size());
  if (static_cast<int>(alpha.size()) != k)
    throw DomainError("alpha vector length does not match Robin vertex count");
  const Eigen::MatrixXcd m0 = vertex_dtn(g, lambda).matrix;
  Eigen::MatrixXcd m = m0;
  for (int j = 0; j < k; ++j) m(j, j) -= alpha[j];
  const ScaledLu f = factor_equilibrated(m);
  const LogDet d = logdet_from(f, k);
  if (d.log_magnitude == -kInf) return 0.0;
  // Normalize against the scale of the inputs, not of m itself: for k = 1 the
  // row norm of m is the very quantity under test and would cancel to 1.
  double scale_log = 0.0;
  for (int j = 0; j < k; ++j)
    scale_log += std::log(m0.row(j).norm() + std::abs(alpha[j]) + 1.0);
  return std::exp(d.log_magnitude - scale_log);
}

bool near_dirichlet(cdouble lambda, const std::vector<RootResult>& pinned_spectrum,
                    double dist) {
  for (const RootResult& r : pinned_spectrum)
    if (std::abs(lambda - r.lambda) < dist) return true;
  return false;
}

}  // namespace robinq
