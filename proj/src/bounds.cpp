// SPDX-License-Identifier: Apache-2.0
#include "robinq/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "robinq/secular.hpp"

namespace robinq {

namespace {

double cell_l2(double a, double b, double h) {  // integral of |linear|^2 over one cell
  return h * (a * a + a * b + b * b) / 3.0;
}

struct EdgeNorms {
  double l2sq = 0.0;
  double h1sq = 0.0;
};

EdgeNorms edge_norms(const std::vector<double>& vals, double length) {
  const int n = static_cast<int>(vals.size());
  const double h = length / (n - 1);
  EdgeNorms out;
  for (int i = 0; i + 1 < n; ++i) {
    out.l2sq += cell_l2(vals[i], vals[i + 1], h);
    const double d = (vals[i + 1] - vals[i]) / h;
    out.h1sq += d * d * h;
  }
  return out;
}

// Same, over the segment of given arclength anchored at one endpoint
// (end == 0: from x=0; end == 1: ending at x=length).
EdgeNorms partial_norms(const std::vector<double>& vals, double length, int end,
                        double seg) {
  const int n = static_cast<int>(vals.size());
  const double h = length / (n - 1);
  std::vector<double> v = vals;
  if (end == 1) std::reverse(v.begin(), v.end());
  EdgeNorms out;
  double left = seg;
  for (int i = 0; i + 1 < n && left > 0; ++i) {
    const double take = std::min(h, left);
    const double a = v[i];
    const double b = v[i] + (v[i + 1] - v[i]) * (take / h);
    out.l2sq += cell_l2(a, b, take);
    const double d = (v[i + 1] - v[i]) / h;
    out.h1sq += d * d * take;
    left -= take;
  }
  return out;
}

double vertex_value(const MetricGraph& g, const TestFunction& f, int v) {
  const EdgeEnd& ee = g.incident(v).front();
  const std::vector<double>& vals = f.values[ee.edge];
  return ee.end == 0 ? vals.front() : vals.back();
}

// 2 when the vertex cut-offs of the Robin set must share an edge, 1 otherwise.
double robin_trace_factor(const MetricGraph& g) {
  std::vector<char> robin(g.vertex_count(), 0);
  for (int v : g.robin_vertices()) robin[v] = 1;
  for (const Edge& e : g.edges())
    if (robin[e.u] && robin[e.v]) return 2.0;
  return 1.0;
}

}  // namespace

TestFunction random_test_function(const MetricGraph& g, std::uint64_t seed, int nodes) {
  if (nodes < 2) throw DomainError("test function needs at least 2 nodes per edge");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  TestFunction f;
  f.values.resize(g.edge_count());
  for (auto& vals : f.values) {
    vals.resize(nodes);
    for (double& x : vals) x = uni(rng);
  }
  for (int v = 0; v < g.vertex_count(); ++v) {  // continuity by averaging
    double sum = 0.0;
    for (const EdgeEnd& ee : g.incident(v))
      sum += ee.end == 0 ? f.values[ee.edge].front() : f.values[ee.edge].back();
    const double avg = sum / g.incident(v).size();
    for (const EdgeEnd& ee : g.incident(v))
      (ee.end == 0 ? f.values[ee.edge].front() : f.values[ee.edge].back()) = avg;
  }
  return f;
}

TestFunction constant_test_function(const MetricGraph& g, double value, int nodes) {
  TestFunction f;
  f.values.assign(g.edge_count(), std::vector<double>(nodes, value));
  return f;
}

cdouble rayleigh_quotient(const MetricGraph& g, const std::vector<cdouble>& alpha,
                          const TestFunction& f) {
  if (static_cast<int>(f.values.size()) != g.edge_count())
    throw DomainError("test function does not match graph");
  if (alpha.size() != g.robin_vertices().size())
    throw DomainError("alpha vector length does not match Robin vertex count");
  double l2 = 0.0, energy = 0.0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const EdgeNorms n = edge_norms(f.values[e], g.edges()[e].length);
    l2 += n.l2sq;
    energy += n.h1sq;
  }
  if (!(l2 > 0.0)) throw DomainError("test function has zero norm");
  cdouble form = energy;
  for (size_t j = 0; j < alpha.size(); ++j) {
    const double fv = vertex_value(g, f, g.robin_vertices()[j]);
    form += alpha[j] * (fv * fv);
  }
  return form / l2;
}

RangeRegion RangeRegion::constant_alpha(cdouble a, const MetricGraph& g) {
  if (g.robin_vertices().empty()) throw DomainError("graph has no Robin vertices");
  RangeRegion r;
  r.constant = true;
  r.alpha = a;
  // The trace estimate divides by the degree of the vertex carrying the
  // coupling, so the enclosure must use the weakest (smallest) Robin degree.
  r.min_robin_deg = double(*g.min_robin_degree());
  r.ell_min = g.min_edge_length();
  r.trace_factor = robin_trace_factor(g);
  return r;
}

RangeRegion RangeRegion::variable_alpha(std::vector<cdouble> a, const MetricGraph& g) {
  if (g.robin_vertices().empty()) throw DomainError("graph has no Robin vertices");
  if (a.size() != g.robin_vertices().size())
    throw DomainError("alpha vector length does not match Robin vertex count");
  RangeRegion r;
  r.constant = false;
  r.alphas = std::move(a);
  r.min_robin_deg = double(*g.min_robin_degree());
  r.ell_min = g.min_edge_length();
  r.trace_factor = robin_trace_factor(g);
  return r;
}

namespace {

bool member_constant(cdouble z, const RangeRegion& r) {
  const double tol = 1e-9 * (1.0 + std::abs(z));
  const double dd = r.min_robin_deg;
  const double base = r.trace_factor / (dd * r.ell_min);
  if (r.alpha.imag() != 0.0) {
    const double s = z.imag() / r.alpha.imag();
    const double t = z.real() - s * r.alpha.real();
    if (t < -tol || s < -tol) return false;
    return s <= 2.0 * std::sqrt(std::max(t, 0.0)) / dd + base + tol;
  }
  // real coupling: range on the real axis
  if (std::abs(z.imag()) > tol) return false;
  const double a = r.alpha.real();
  if (z.real() >= -tol) return true;
  if (a >= 0.0) return false;
  const double reach = -a * a / (dd * dd) + a * base;
  return z.real() >= reach - tol;
}

// Best-effort feasibility of z = t + sum_j alpha_j s_j with
// 0 <= s_j <= 2 sqrt(tau_j)/D + 2/(D ell), tau >= 0, sum tau <= t.
double variable_residual(cdouble z, const RangeRegion& r, double t,
                         const std::vector<double>& weights) {
  const size_t k = r.alphas.size();
  std::vector<double> cap(k);
  for (size_t j = 0; j < k; ++j)
    cap[j] = 2.0 * std::sqrt(weights[j] * t) / r.min_robin_deg +
             2.0 / (r.min_robin_deg * r.ell_min);
  std::vector<double> s(k, 0.0);
  const cdouble w = z - t;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double moved = 0.0;
    for (size_t j = 0; j < k; ++j) {
      cdouble rj = w;
      for (size_t l = 0; l < k; ++l)
        if (l != j) rj -= r.alphas[l] * s[l];
      const double denom = std::norm(r.alphas[j]);
      double best = 0.0;
      if (denom > 0.0)
        best = std::clamp((rj * std::conj(r.alphas[j])).real() / denom, 0.0, cap[j]);
      moved += std::abs(best - s[j]);
      s[j] = best;
    }
    if (moved < 1e-15) break;
  }
  cdouble res = w;
  for (size_t j = 0; j < k; ++j) res -= r.alphas[j] * s[j];
  return std::abs(res);
}

bool member_variable(cdouble z, const RangeRegion& r) {
  const size_t k = r.alphas.size();
  double asum = 0.0;
  for (const cdouble& a : r.alphas) asum += std::abs(a);
  const double reach = asum / r.min_robin_deg;
  const double t_top =
      std::pow(reach + std::sqrt(reach * reach + std::max(z.real(), 0.0) + std::abs(z) +
                                 asum * 2.0 / (r.min_robin_deg * r.ell_min)),
               2) *
          1.2 +
      1.0;

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(k, 1.0 / k));
  for (size_t j = 0; j < k; ++j) {
    std::vector<double> w(k, 0.0);
    w[j] = 1.0;
    starts.push_back(w);
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int extra = 0; extra < 6; ++extra) {
    std::vector<double> w(k);
    double sum = 0.0;
    for (double& x : w) sum += (x = uni(rng) + 1e-3);
    for (double& x : w) x /= sum;
    starts.push_back(w);
  }

  const double accept = 1e-6 * (1.0 + std::abs(z));
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  std::vector<double> best_w = starts[0];
  for (int i = 0; i < 32; ++i) {
    const double t = t_top * i / 31.0;
    for (const auto& w : starts) {
      const double res = variable_residual(z, r, t, w);
      if (res < best) {
        best = res;
        best_t = t;
        best_w = w;
        if (best < accept) return true;
      }
    }
  }
  double lo = std::max(0.0, best_t - t_top / 31.0), hi = std::min(t_top, best_t + t_top / 31.0);
  for (int iter = 0; iter < 40; ++iter) {
    const double t1 = lo + (hi - lo) / 3, t2 = hi - (hi - lo) / 3;
    const double r1 = variable_residual(z, r, t1, best_w);
    const double r2 = variable_residual(z, r, t2, best_w);
    if (std::min(r1, r2) < accept) return true;
    if (r1 < r2)
      hi = t2;
    else
      lo = t1;
  }
  return variable_residual(z, r, (lo + hi) / 2, best_w) < accept;
}

}  // namespace

bool region_membership(cdouble z, const RangeRegion& region) {
  return region.constant ? member_constant(z, region) : member_variable(z, region);
}

double real_part_lower_bound(cdouble alpha, double min_robin_deg, double ell_min) {
  const double a = alpha.real();
  if (a >= 0.0) return 0.0;
  return -a * a / (min_robin_deg * min_robin_deg) + a / (min_robin_deg * ell_min);
}

double real_part_lower_bound(cdouble alpha, const MetricGraph& g) {
  if (g.robin_vertices().empty()) throw DomainError("graph has no Robin vertices");
  const double a = alpha.real();
  if (a >= 0.0) return 0.0;
  const double dd = double(*g.min_robin_degree());
  return -a * a / (dd * dd) +
         a * robin_trace_factor(g) / (dd * g.min_edge_length());
}

double first_eigenvalue_upper_bounds(double alpha, const MetricGraph& g) {
  if (!(alpha < 0.0)) throw DomainError("upper bounds need a negative coupling");
  const size_t k = g.robin_vertices().size();
  if (k == 0) throw DomainError("graph has no Robin vertices");
  const double dd = double(*g.min_robin_degree());
  const double ell = g.min_edge_length();
  double deep = std::numeric_limits<double>::infinity();
  if (alpha < -dd / ell) {
    const double u = alpha / dd + 1.0 / ell;
    deep = -u * u;
  }
  const double flat = double(k) * alpha / g.total_length();
  return std::min(deep, flat);
}

bool imag_part_bound(cdouble lambda, const std::vector<cdouble>& alpha,
                     const MetricGraph& g) {
  if (alpha.size() != g.robin_vertices().size())
    throw DomainError("alpha vector length does not match Robin vertex count");
  double worst = 0.0;
  for (size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j].real() < 0.0)
      throw DomainError("imaginary-part control needs couplings in the right half-plane");
    worst = std::max(worst,
                     std::abs(alpha[j].imag()) / g.degree(g.robin_vertices()[j]));
  }
  const double bound =
      worst * (2.0 * std::sqrt(std::max(lambda.real(), 0.0)) +
               robin_trace_factor(g) / g.min_edge_length());
  return std::abs(lambda.imag()) <= bound + 1e-9 * (1.0 + std::abs(lambda));
}

TraceMode TraceMode::local(int v, std::map<int, double> xi_by_edge) {
  TraceMode m;
  m.kind = Local;
  m.vertex = v;
  m.xi = std::move(xi_by_edge);
  return m;
}

TraceMode TraceMode::global(std::vector<int> vertices) {
  TraceMode m;
  m.kind = Global;
  m.vertex_set = std::move(vertices);
  return m;
}

double trace_inequality_check(const MetricGraph& g, const TestFunction& f,
                              const TraceMode& mode) {
  double lhs = 0.0, l2 = 0.0, h1 = 0.0;
  double shortest = std::numeric_limits<double>::infinity();

  auto add_slot = [&](int v, const EdgeEnd& ee, double xi) {
    const double len = g.edges()[ee.edge].length;
    const double seg = xi * len;
    const EdgeNorms n = partial_norms(f.values[ee.edge], len, ee.end, seg);
    l2 += n.l2sq;
    h1 += n.h1sq;
    shortest = std::min(shortest, seg);
    (void)v;
  };

  if (mode.kind == TraceMode::Local) {
    const int v = mode.vertex;
    const double fv = vertex_value(g, f, v);
    lhs = g.degree(v) * fv * fv;
    for (const EdgeEnd& ee : g.incident(v)) {
      const auto it = mode.xi.find(ee.edge);
      const double xi = it == mode.xi.end() ? 1.0 : it->second;
      if (!(xi > 0.0 && xi <= 1.0)) throw DomainError("scale factor must be in (0, 1]");
      add_slot(v, ee, xi);
    }
  } else {
    std::vector<char> in_set(g.vertex_count(), 0);
    for (int v : mode.vertex_set) in_set[v] = 1;
    for (int v : mode.vertex_set) {
      const double fv = vertex_value(g, f, v);
      lhs += g.degree(v) * fv * fv;
      for (const EdgeEnd& ee : g.incident(v)) {
        const Edge& ed = g.edges()[ee.edge];
        // halve the reach when the far end also claims this edge (or on
        // loops), so the chosen stars tile each edge at most once
        const int other = ee.end == 0 ? ed.v : ed.u;
        const bool shared = (ed.u == ed.v) || in_set[other];
        add_slot(v, ee, shared ? 0.5 : 1.0);
      }
    }
  }
  const double rhs = 2.0 * std::sqrt(l2) * std::sqrt(h1) + l2 / shortest;
  return rhs - lhs;
}

std::optional<double> star_secular_solve(double alpha, double ell, double D) {
  if (!(ell > 0.0) || !(D > 0.0)) throw DomainError("star model needs positive length and degree");
  if (!(alpha < -D / ell)) return std::nullopt;
  const auto G = [&](double mu) {
    const double r = std::sqrt(mu);
    return r / std::tanh(r * ell) + alpha / D;
  };
  double lo = 0.0, hi = (alpha / D) * (alpha / D);
  // G(0+) = 1/ell + alpha/D < 0 by the precondition; G(hi) > 0 since coth > 1.
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (G(mid) < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  const double mu = (lo + hi) / 2;
  const double cap = alpha / D + 1.0 / ell;
  if (-mu > -cap * cap + 1e-9 * (1.0 + mu))
    throw NumericError("star eigenvalue escaped its guaranteed bound");
  return -mu;
}

int count_negative_eigenvalues(const MetricGraph& g, double alpha) {
  const size_t k = g.robin_vertices().size();
  if (k == 0) throw DomainError("graph has no Robin vertices");
  const double lower = real_part_lower_bound(cdouble(alpha, 0.0), g);
  const double big_r = -lower + 1.0;
  const Rect region{-big_r, -1e-9, -1e-6, 1e-6};
  const std::vector<cdouble> av(k, alpha);
  const int count = count_roots(g, av, region);

  double threshold = 0.0;
  for (int v : g.robin_vertices())
    threshold = std::min(threshold, -2.0 * g.degree(v) / g.shortest_incident(v));
  if (alpha < threshold && count != static_cast<int>(k))
    throw NumericError("negative-eigenvalue count does not match Robin vertex count");
  return count;
}

}  // namespace robinq
