// SPDX-License-Identifier: Apache-2.0
#include "robinq/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "robinq/parallel.hpp"
#include "robinq/secular.hpp"

namespace robinq {

std::vector<cdouble> ParameterPath::alphas(double t) const {
  std::vector<cdouble> out(specs.size());
  for (size_t j = 0; j < specs.size(); ++j)
    out[j] = specs[j].base + t * specs[j].modulus * std::polar(1.0, specs[j].angle);
  return out;
}

std::vector<cdouble> ParameterPath::velocities() const {
  std::vector<cdouble> out(specs.size());
  for (size_t j = 0; j < specs.size(); ++j)
    out[j] = specs[j].modulus * std::polar(1.0, specs[j].angle);
  return out;
}

bool ParameterPath::case1(int j) const {
  return specs[j].modulus > 0 && std::cos(specs[j].angle) < -std::sin(kSectorMargin);
}

bool ParameterPath::case2(int j) const {
  return specs[j].modulus == 0 || std::cos(specs[j].angle) >= 0;
}

int ParameterPath::case1_count() const {
  int m = 0;
  for (size_t j = 0; j < specs.size(); ++j)
    if (case1(static_cast<int>(j))) ++m;
  return m;
}

namespace {

double dist_to_ray(cdouble z) {  // distance to [0, inf)
  return z.real() >= 0 ? std::abs(z.imag()) : std::abs(z);
}

bool finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct Corrector {
  bool ok = false;
  cdouble lambda;
  double residual = 0.0;
};

Corrector correct(const MetricGraph& g, const std::vector<cdouble>& alpha, cdouble guess,
                  int mu, double tol) {
  cdouble z = guess;
  for (int it = 0; it < 50; ++it) {
    const SecularPoint p = secular_point(g, alpha, z);
    const cdouble step = double(mu) * p.newton_step;
    if (!finite(step)) return {};
    z += step;
    if (!finite(z)) return {};
    if (std::abs(step) < tol * (1.0 + std::abs(z)))
      return {true, z, secular_point(g, alpha, z).residual};
  }
  return {};
}

}  // namespace

Branch trace_branch(const MetricGraph& g, const ParameterPath& path, RootResult start,
                    const TraceConfig& cfg) {
  Branch b;
  b.origin = start;
  b.multiplicity = std::max(1, start.multiplicity);
  const int mu = b.multiplicity;
  const double T = path.t_max;
  const std::vector<cdouble> adot = path.velocities();

  double t = cfg.t_start;
  cdouble lam = start.lambda;
  b.samples.push_back({t, lam, start.residual});

  double dt = T / 100.0;
  int streak = 0;
  std::vector<double> dists{dist_to_ray(lam)};

  for (int step = 0; step < cfg.max_steps && t < T * (1.0 - 1e-15); ++step) {
    const std::vector<cdouble> a = path.alphas(t);
    SecularPoint p = secular_point(g, a, lam, /*with_alpha_derivatives=*/true);
    if (p.residual == 0.0) {  // landed on an exact float zero; probe next door
      const cdouble off = lam + 10 * cfg.tol * (1.0 + std::abs(lam));
      p = secular_point(g, a, off, true);
    }
    cdouble v{0.0, 0.0};
    if (finite(p.dlogdet) && std::abs(p.dlogdet) > 0) {
      cdouble num{0.0, 0.0};
      for (size_t j = 0; j < adot.size(); ++j) num += p.dlogdet_dalpha[j] * adot[j];
      v = -num / p.dlogdet;
      if (!finite(v)) v = {0.0, 0.0};
    }

    // Displacement cap keeps the first predictor steps from leaping across
    // the spectrum when t_max is huge.
    double dt_try = std::min(dt, T - t);
    const double cap = 0.1 * (1.0 + std::abs(lam));
    if (std::abs(v) * dt_try > cap) dt_try = cap / std::abs(v);

    const cdouble pred = lam + v * dt_try;
    const Corrector c = correct(g, path.alphas(t + dt_try), pred, mu, cfg.tol);
    const double guard =
        0.25 * std::abs(pred - lam) + 10 * cfg.tol * (1.0 + std::abs(pred));
    if (c.ok && std::abs(c.lambda - pred) <= guard) {
      t += dt_try;
      lam = c.lambda;
      b.samples.push_back({t, lam, c.residual});
      dists.push_back(dist_to_ray(lam));
      if (++streak >= 3) {
        dt = std::max(dt, dt_try) * 2;
        streak = 0;
      }
      const size_t n = dists.size();
      if (dists.back() > cfg.div_threshold * cfg.early_stop_factor && n >= 10) {
        bool rising = true;
        for (size_t i = n - 10; i + 1 < n; ++i)
          if (dists[i + 1] < dists[i]) rising = false;
        if (rising && dists[n - 10] < dists.back()) {
          b.early_stop = true;
          return b;
        }
      }
    } else {
      streak = 0;
      dt = dt_try / 2;
      // The floor scales with the progress made, not with t_max: stalling at
      // small t must not be masked by a huge horizon.
      if (dt < cfg.dt_floor_factor * (1.0 + t)) {
        b.crossing = true;
        b.crossing_t = t;
        b.status = BranchStatus::Undecided;
        return b;
      }
    }
  }
  return b;
}

BranchStatus classify_limit(Branch& b, const std::vector<RootResult>& pinned_spectrum,
                            const TraceConfig& cfg) {
  if (b.samples.empty()) return b.status = BranchStatus::Undecided;
  const size_t n = b.samples.size();
  const size_t w = std::min<size_t>(10, n);
  const cdouble end = b.samples.back().lambda;

  double dend = dist_to_ray(end);
  if (dend > cfg.div_threshold) {
    bool rising = true;
    for (size_t i = n - w; i + 1 < n; ++i)
      if (dist_to_ray(b.samples[i + 1].lambda) < dist_to_ray(b.samples[i].lambda))
        rising = false;
    if (rising && (w < 2 || dist_to_ray(b.samples[n - w].lambda) < dend))
      return b.status = BranchStatus::Divergent;
  }

  const RootResult* best = nullptr;
  double gap_next = std::numeric_limits<double>::infinity();
  for (const RootResult& r : pinned_spectrum)
    if (!best || std::abs(end - r.lambda) < std::abs(end - best->lambda)) best = &r;
  if (!best) return b.status = BranchStatus::Undecided;
  for (const RootResult& r : pinned_spectrum)
    if (&r != best)
      gap_next = std::min(gap_next, std::abs(r.lambda - best->lambda));
  const cdouble limit = best->lambda;

  // A branch can sit on the pinned point for the whole trace (its
  // eigenfunction vanishes at every Robin vertex, so alpha never acts).
  double worst = 0.0;
  for (size_t i = n - w; i < n; ++i)
    worst = std::max(worst, std::abs(b.samples[i].lambda - limit));
  if (worst < cfg.conv_tol) {
    b.limit_point = limit;
    return b.status = BranchStatus::DirichletConvergent;
  }

  bool falling = true;
  for (size_t i = n - w; i + 1 < n; ++i)
    if (std::abs(b.samples[i + 1].lambda - limit) >
        std::abs(b.samples[i].lambda - limit))
      falling = false;
  const bool strict = w >= 2 && std::abs(b.samples[n - w].lambda - limit) >
                                    std::abs(end - limit);
  if (falling && strict) {
    if (std::abs(end - limit) < cfg.conv_tol) {
      b.limit_point = limit;
      return b.status = BranchStatus::DirichletConvergent;
    }
    // Branches merging into a persistent eigenvalue stall while still O(1/t)
    // away; extrapolate the tail under lambda(t) = L + c/t and accept when the
    // limit lands on the pinned point unambiguously.
    if (n >= 2) {
      const BranchSample& s1 = b.samples[n - 2];
      const BranchSample& s2 = b.samples[n - 1];
      if (s1.t > 0.0 && s2.t > 1.05 * s1.t) {
        const cdouble c =
            (s1.lambda - s2.lambda) / (1.0 / s1.t - 1.0 / s2.t);
        const cdouble extrap = s2.lambda - c / s2.t;
        const double slack =
            std::min(0.1 * gap_next, 1e-2 * (1.0 + std::abs(limit)));
        if (std::abs(extrap - limit) < cfg.conv_tol &&
            std::abs(end - limit) < slack) {
          b.limit_point = limit;
          return b.status = BranchStatus::DirichletConvergent;
        }
      }
    }
  }
  return b.status = BranchStatus::Undecided;
}

std::pair<cdouble, double> fit_divergence_law(const Branch& b, const ParameterPath& path,
                                              const MetricGraph& g, int vertex_j) {
  if (!path.case1(vertex_j)) throw DomainError("divergence fit needs a leftward vertex");
  const int v = g.robin_vertices().at(vertex_j);
  const double deg = g.degree(v);
  const double threshold = -5.0 / g.min_edge_length();

  std::vector<cdouble> al, lam;
  for (const BranchSample& s : b.samples) {
    const cdouble a = path.alphas(s.t)[vertex_j];
    if (a.real() < threshold) {
      al.push_back(a);
      lam.push_back(s.lambda);
    }
  }
  if (al.size() < 3) throw NumericError("asymptotic regime not reached");

  // lambda ~ s * (-alpha^2) through the origin; c = 1/sqrt(s).
  cdouble num{0, 0};
  double den = 0;
  for (size_t i = 0; i < al.size(); ++i) {
    const cdouble x = -al[i] * al[i];
    num += std::conj(x) * lam[i];
    den += std::norm(x);
  }
  cdouble c = 1.0 / std::sqrt(num / den);
  if (c.real() < 0) c = -c;

  // Remainder rate: real regression of log-error against Re alpha, skipping
  // samples already at the rounding floor.
  std::vector<double> xs, ys;
  for (size_t i = 0; i < al.size(); ++i) {
    const cdouble err = lam[i] + al[i] * al[i] / (deg * deg);
    if (std::abs(err) < 1e-12 * (1.0 + std::abs(lam[i]))) continue;
    xs.push_back(al[i].real());
    ys.push_back(std::log(std::abs(err)) - 2.0 * std::log(std::abs(al[i])));
  }
  if (xs.size() < 2) throw NumericError("asymptotic regime not reached");
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0) throw NumericError("asymptotic regime not reached");
  return {c, sxy / sxx};
}

namespace {

// Split a degenerate starting root by stepping to a small t > 0 and
// re-solving locally; returns the nearby roots with their multiplicities.
std::vector<RootResult> split_seed(const MetricGraph& g, const ParameterPath& path,
                                   const RootResult& r0, double spacing,
                                   const TraceConfig& cfg) {
  const std::vector<cdouble> a = path.alphas(cfg.seed_t);
  double h = std::min(0.25 * spacing, 0.1 * (1.0 + std::abs(r0.lambda)));
  h = std::max(h, 1e3 * cfg.tol * (1.0 + std::abs(r0.lambda)));
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Rect box{r0.lambda.real() - h, r0.lambda.real() + h,
                   r0.lambda.imag() - h, r0.lambda.imag() + h};
    std::vector<RootResult> found;
    try {
      found = find_roots(g, a, box, cfg.tol);
    } catch (const NumericError&) {
      h *= 1.7;
      continue;
    }
    int mult = 0;
    for (const RootResult& f : found) mult += f.multiplicity;
    if (mult == r0.multiplicity) return found;
    h *= (mult < r0.multiplicity) ? 2.0 : 0.5;
  }
  throw NumericError("could not isolate degenerate branch seeds");
}

}  // namespace

int count_divergent(const MetricGraph& g, const ParameterPath& path, Rect window,
                    const TraceConfig& cfg, int workers) {
  const std::vector<cdouble> a0 = path.alphas(0.0);
  const std::vector<RootResult> roots0 = find_roots(g, a0, window, cfg.tol, workers);

  // Branches heading rightward climb at most one spectral gap as their
  // vertices stiffen toward Dirichlet, so the pinned list must reach one gap
  // (about pi^2/l^2 + 2 pi sqrt(top)/l on a single edge) past the window.
  const double ell = g.min_edge_length();
  const double gap = M_PI * M_PI / (ell * ell) +
                     2.0 * M_PI * std::sqrt(std::max(0.0, window.re_max)) / ell;
  const Rect pinned_region{std::min(window.re_min, -1.0), window.re_max + 2.0 * gap,
                           -0.5, 0.5};
  const std::vector<RootResult> pinned = dirichlet_spectrum(g, pinned_region, cfg.tol);

  struct Seed {
    RootResult root;
    double t0;
  };
  std::vector<Seed> seeds;
  for (size_t i = 0; i < roots0.size(); ++i) {
    const RootResult& r = roots0[i];
    if (r.multiplicity == 1) {
      seeds.push_back({r, 0.0});
      continue;
    }
    double spacing = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < roots0.size(); ++j)
      if (j != i) spacing = std::min(spacing, std::abs(r.lambda - roots0[j].lambda));
    for (const RootResult& s : split_seed(g, path, r, spacing, cfg))
      seeds.push_back({s, cfg.seed_t});
  }

  std::vector<Branch> branches(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), workers, [&](int i) {
    TraceConfig c = cfg;
    c.t_start = seeds[i].t0;
    branches[i] = trace_branch(g, path, seeds[i].root, c);
    classify_limit(branches[i], pinned, cfg);
  });

  int divergent = 0;
  for (const Branch& b : branches) {
    if (b.status == BranchStatus::Undecided)
      throw NumericError("inconclusive at horizon T");
    if (b.status == BranchStatus::Divergent) divergent += b.multiplicity;
  }
  return divergent;
}

}  // namespace robinq
