// SPDX-License-Identifier: Apache-2.0
#include "robinq/rootfind.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "robinq/parallel.hpp"

namespace robinq {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_phase(double d) {
  while (d > kPi) d -= 2 * kPi;
  while (d <= -kPi) d += 2 * kPi;
  return d;
}

struct BoundaryRoot {};  // internal signal: zero sitting on the contour

struct Walker {
  const DetFn& fn;
  const ContourOptions& opt;
  int samples = 0;

  DetPoint eval(cdouble z) {
    if (++samples > opt.max_samples) throw NumericError("ill-conditioned contour");
    DetPoint p = fn(z);
    // |f/f'| estimates the distance to the nearest zero (up to a multiplicity
    // factor).  An absolute |det| floor cannot play this role: against its row
    // norms the determinant runs exponentially small once Im sqrt(lambda)
    // grows, zeros or not.
    const double dist = std::abs(p.newton_step);
    if (!std::isfinite(dist) || !(p.residual > 0) ||
        dist <= opt.boundary_floor * (1.0 + std::abs(z)))
      throw BoundaryRoot{};
    return p;
  }

  // |f'/f| at an endpoint, used to bound how much the phase can really turn
  // across the segment; wrapped differences alone alias at full turns.
  static double speed(const DetPoint& p) {
    const double m = std::abs(p.newton_step);
    return m > 0 ? 1.0 / m : 0.0;
  }

  static cdouble logderiv(const DetPoint& p) {
    return p.newton_step == cdouble(0) ? cdouble(0) : -1.0 / p.newton_step;
  }

  // Endpoint data alone aliases at whole turns: two zeros under one segment
  // advance the phase by 2*pi (wraps to ~0) while their pulls on f'/f cancel
  // over wide stretches of the contour, and a lone midpoint probe still fails
  // when one half-increment crosses pi and wraps against the other. A leaf is
  // accepted only when midpoint and quarter-point increments each stay inside
  // (-pi/2, pi/2), sum consistently, and agree with the Simpson integral of
  // the logarithmic derivative.
  double segment(cdouble z0, const DetPoint& p0, cdouble z1, const DetPoint& p1,
                 int depth) {
    const double d = wrap_phase(p1.phase - p0.phase);
    const double turn_bound = std::abs(z1 - z0) * std::max(speed(p0), speed(p1));
    const bool smooth = std::abs(d) < kPi / 2 && turn_bound < kPi / 2;
    if (!smooth && depth > 52) throw NumericError("ill-conditioned contour");
    const cdouble zm = (z0 + z1) / 2.0;
    const DetPoint pm = eval(zm);
    if (smooth) {
      const double dh0 = wrap_phase(pm.phase - p0.phase);
      const double dh1 = wrap_phase(p1.phase - pm.phase);
      bool ok = std::abs(dh0) < kPi / 2 && std::abs(dh1) < kPi / 2 &&
                std::abs(dh0 + dh1 - d) < 1e-3 &&
                std::abs(z1 - z0) * speed(pm) < kPi / 2;
      if (ok) {
        const cdouble est =
            (z1 - z0) * (logderiv(p0) + 4.0 * logderiv(pm) + logderiv(p1)) / 6.0;
        ok = std::abs(est.imag() - (dh0 + dh1)) < kPi / 2 &&
             std::abs(est.real() - (p1.log_magnitude - p0.log_magnitude)) < kPi / 2;
      }
      if (ok) {
        const DetPoint q1 = eval((z0 + zm) / 2.0);
        const DetPoint q3 = eval((zm + z1) / 2.0);
        const double e1 = wrap_phase(q1.phase - p0.phase);
        const double e2 = wrap_phase(pm.phase - q1.phase);
        const double e3 = wrap_phase(q3.phase - pm.phase);
        const double e4 = wrap_phase(p1.phase - q3.phase);
        const double fine = e1 + e2 + e3 + e4;
        if (std::abs(e1) < kPi / 2 && std::abs(e2) < kPi / 2 &&
            std::abs(e3) < kPi / 2 && std::abs(e4) < kPi / 2 &&
            std::abs(fine - (dh0 + dh1)) < 1e-3)
          return fine;
      }
      if (depth > 52) throw NumericError("ill-conditioned contour");
    }
    return segment(z0, p0, zm, pm, depth + 1) + segment(zm, pm, z1, p1, depth + 1);
  }
};

int walk_rect(const DetFn& fn, const Rect& r, const ContourOptions& opt,
              int& samples_out) {
  Walker w{fn, opt};
  const cdouble c[4] = {{r.re_min, r.im_min},
                        {r.re_max, r.im_min},
                        {r.re_max, r.im_max},
                        {r.re_min, r.im_max}};
  DetPoint p[4];
  for (int i = 0; i < 4; ++i) p[i] = w.eval(c[i]);
  double total = 0;
  for (int i = 0; i < 4; ++i) total += w.segment(c[i], p[i], c[(i + 1) % 4], p[(i + 1) % 4], 0);
  samples_out = w.samples;
  const double turns = total / (2 * kPi);
  const int winding = static_cast<int>(std::lround(turns));
  if (std::abs(turns - winding) > 0.25 || winding < 0)
    throw BoundaryRoot{};  // phase bookkeeping failed; treat as boundary trouble
  return winding;
}

}  // namespace

ContourCount count_winding(const DetFn& fn, Rect region, const ContourOptions& opt) {
  ContourCount out;
  out.region = region;
  for (int attempt = 0;; ++attempt) {
    try {
      int samples = 0;
      out.winding = walk_rect(fn, out.region, opt, samples);
      out.samples += samples;
      return out;
    } catch (const BoundaryRoot&) {
      if (attempt >= opt.max_nudges)
        throw NumericError("root persists on region boundary after nudging");
      const double by = std::max(1e-6 * region.diameter(),
                                 1e-13 * (1.0 + std::abs(region.center())));
      out.region = out.region.expanded(by);
      out.nudged = true;
    }
  }
}

namespace {

struct Box {
  Rect rect;
  int count;
};

struct PolishOutcome {
  bool ok = false;
  cdouble lambda;
  double residual = 0.0;
};

PolishOutcome newton_polish(const DetFn& fn, cdouble start, int mult, double tol,
                            const Rect& home) {
  cdouble z = start;
  for (int it = 0; it < 50; ++it) {
    const DetPoint p = fn(z);
    const cdouble step = double(mult) * p.newton_step;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
    z += step;
    if (!home.contains(z, 0.5 * home.diameter())) return {};  // ran away
    if (std::abs(step) < tol * (1.0 + std::abs(z))) {
      if (!home.contains(z, 1e-9 * (1.0 + home.diameter()))) return {};
      return {true, z, fn(z).residual};
    }
  }
  return {};
}

// Jitter fractions for the subdivision cuts; retried in order when a child
// count fails to add up (a zero sitting on a cut).
constexpr double kJitter[3] = {0.00618, -0.00977, 0.01345};

// Multiplicity-scaled Newton happily converges to one zero of a cluster of
// several, so a polished point is trusted only when a small contour around it
// recovers the box's whole count.
bool polish_holds_count(const DetFn& fn, cdouble z, const Box& box,
                        const SolveOptions& opt) {
  const double r = std::max(20 * opt.tol, 1e-9) * (1.0 + std::abs(z));
  Rect small{z.real() - r, z.real() + r, z.imag() - r, z.imag() + r};
  small.re_min = std::max(small.re_min, box.rect.re_min);
  small.re_max = std::min(small.re_max, box.rect.re_max);
  small.im_min = std::max(small.im_min, box.rect.im_min);
  small.im_max = std::min(small.im_max, box.rect.im_max);
  if (!(small.re_min < small.re_max && small.im_min < small.im_max)) return false;
  try {
    return count_winding(fn, small, opt.contour).winding == box.count;
  } catch (const NumericError&) {
    return false;
  }
}

}  // namespace

std::vector<RootResult> solve_zeros(const DetFn& fn, Rect region, const SolveOptions& opt) {
  const ContourCount total = count_winding(fn, region, opt.contour);
  std::vector<RootResult> roots;
  if (total.winding == 0) return roots;

  std::atomic<long long> corrections{0};
  std::vector<Box> queue{{total.region, total.winding}};
  while (!queue.empty()) {
    const int nb = static_cast<int>(queue.size());
    std::vector<std::vector<Box>> child_slots(nb);
    std::vector<std::vector<RootResult>> leaf_slots(nb);
    parallel_for(nb, opt.workers, [&](int bi) {
      const Box box = queue[bi];
      const bool tiny = box.rect.diameter() < opt.tol;
      // Multiplicity-scaled Newton first: converges on genuine multiple roots
      // (where ever-finer subdivision cuts would graze the root), cycles
      // without converging on clusters of distinct roots.
      PolishOutcome po =
          newton_polish(fn, box.rect.center(), box.count, opt.tol, box.rect);
      if (po.ok && polish_holds_count(fn, po.lambda, box, opt)) {
        leaf_slots[bi].push_back({po.lambda, box.count, po.residual});
        return;
      }
      if (tiny) {  // cluster below resolution: report the box as one root
        const cdouble c = box.rect.center();
        leaf_slots[bi].push_back({c, box.count, fn(c).residual});
        return;
      }
      // Elongated boxes split across the long axis only; cutting a thin box
      // the other way would lay the new edge alongside whatever root line
      // made it thin (e.g. a real spectrum inside a flat window).
      struct Attempt {
        int sum = 0;
        std::vector<Box> kids;
        bool valid = false;
      };
      Attempt tries[3];
      bool settled = false;
      for (int jit = 0; jit < 3 && !settled; ++jit) {
        const double cx = box.rect.re_min + box.rect.width() * (0.5 + kJitter[jit]);
        const double cy = box.rect.im_min + box.rect.height() * (0.5 + kJitter[jit]);
        std::vector<Rect> parts;
        if (box.rect.width() > 2 * box.rect.height()) {
          parts = {{box.rect.re_min, cx, box.rect.im_min, box.rect.im_max},
                   {cx, box.rect.re_max, box.rect.im_min, box.rect.im_max}};
        } else if (box.rect.height() > 2 * box.rect.width()) {
          parts = {{box.rect.re_min, box.rect.re_max, box.rect.im_min, cy},
                   {box.rect.re_min, box.rect.re_max, cy, box.rect.im_max}};
        } else {
          parts = {{box.rect.re_min, cx, box.rect.im_min, cy},
                   {cx, box.rect.re_max, box.rect.im_min, cy},
                   {box.rect.re_min, cx, cy, box.rect.im_max},
                   {cx, box.rect.re_max, cy, box.rect.im_max}};
        }
        Attempt a;
        a.valid = true;
        for (const Rect& q : parts) {
          try {
            ContourCount cc = count_winding(fn, q, opt.contour);
            if (cc.winding > 0) a.kids.push_back({cc.region, cc.winding});
            a.sum += cc.winding;
          } catch (const NumericError&) {
            a.valid = false;
            break;
          }
        }
        tries[jit] = std::move(a);
        if (tries[jit].valid && tries[jit].sum == box.count) {
          child_slots[bi] = std::move(tries[jit].kids);
          settled = true;
        }
      }
      // Two independent jittered partitions that agree with each other
      // overrule the parent: its own boundary walk miscounted.
      for (int a = 0; a < 3 && !settled; ++a)
        for (int b = a + 1; b < 3 && !settled; ++b)
          if (tries[a].valid && tries[b].valid && tries[a].sum == tries[b].sum) {
            corrections += tries[a].sum - box.count;
            child_slots[bi] = std::move(tries[a].kids);
            settled = true;
          }
      if (!settled) {
        // Every jittered partition failed. In a box already small against its
        // scale the usual cause is a zero pair so close that the determinant
        // cancels below rounding noise between them: no cut through that band
        // has a walkable phase. Report the cluster at the box's resolution
        // rather than subdividing into noise.
        const cdouble c = box.rect.center();
        const DetPoint pc = fn(c);
        if (box.rect.diameter() < 1e-6 * (1.0 + std::abs(c)) &&
            pc.residual < 1e-6) {
          leaf_slots[bi].push_back({c, box.count, pc.residual});
          return;
        }
        throw NumericError("quadtree subdivision inconsistent");
      }
    });
    std::vector<Box> next;
    for (int bi = 0; bi < nb; ++bi) {
      for (const RootResult& r : leaf_slots[bi]) roots.push_back(r);
      for (const Box& b : child_slots[bi]) next.push_back(b);
    }
    queue = std::move(next);
  }

  int mult_sum = 0;
  for (const RootResult& r : roots) mult_sum += r.multiplicity;
  if (mult_sum != total.winding + corrections.load())
    throw NumericError("winding bookkeeping inconsistent");
  std::sort(roots.begin(), roots.end(), [](const RootResult& a, const RootResult& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return roots;
}

}  // namespace robinq
