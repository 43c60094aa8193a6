// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "robinq/graph.hpp"

namespace fixtures {

using robinq::cdouble;
using robinq::Edge;
using robinq::MetricGraph;
using robinq::Vertex;
using robinq::VertexCondition;

inline MetricGraph interval(VertexCondition a, VertexCondition b, double ell = 1.0) {
  return MetricGraph({{"a", a}, {"b", b}}, {{0, 1, ell}});
}

inline MetricGraph pt_interval(double t) {
  return interval(VertexCondition::robin({0.0, -t}), VertexCondition::robin({0.0, t}));
}

inline MetricGraph dirichlet_interval(double ell = 1.0) {
  return interval(VertexCondition::dirichlet(), VertexCondition::dirichlet(), ell);
}

// Equilateral star: center first, then `arms` leaves.
inline MetricGraph star(int arms, VertexCondition center, VertexCondition leaf,
                        double ell = 1.0) {
  std::vector<Vertex> vs{{"c", center}};
  std::vector<Edge> es;
  for (int i = 0; i < arms; ++i) {
    vs.push_back({"l" + std::to_string(i + 1), leaf});
    es.push_back({0, i + 1, ell});
  }
  return MetricGraph(vs, es);
}

inline MetricGraph star3(cdouble alpha) {
  return star(3, VertexCondition::robin(alpha), VertexCondition::standard());
}

// v1 -- v2 -- v3, unit edges.
inline MetricGraph path3(VertexCondition c1, VertexCondition c2, VertexCondition c3) {
  return MetricGraph({{"v1", c1}, {"v2", c2}, {"v3", c3}}, {{0, 1, 1.0}, {1, 2, 1.0}});
}

inline MetricGraph path3_ends_robin(cdouble a) {
  return path3(VertexCondition::robin(a), VertexCondition::standard(),
               VertexCondition::robin(a));
}

// Unit triangle with a unit pendant edge hanging off vertex c.
inline MetricGraph cycle_pendant(cdouble alpha_pendant) {
  return MetricGraph({{"a", VertexCondition::standard()},
                      {"b", VertexCondition::standard()},
                      {"c", VertexCondition::standard()},
                      {"d", VertexCondition::robin(alpha_pendant)}},
                     {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {2, 3, 1.0}});
}

// Complete graph on 4 vertices, all Robin, lengths in {1, 1.25, 1.5}.
inline MetricGraph k4(cdouble alpha) {
  const VertexCondition r = VertexCondition::robin(alpha);
  return MetricGraph({{"p", r}, {"q", r}, {"r", r}, {"s", r}},
                     {{0, 1, 1.0},
                      {0, 2, 1.25},
                      {0, 3, 1.5},
                      {1, 2, 1.5},
                      {1, 3, 1.25},
                      {2, 3, 1.0}});
}

// One loop at `a` plus a pendant edge; exercises the simplification pass.
inline MetricGraph loop_pendant() {
  return MetricGraph(
      {{"a", VertexCondition::robin({-1.0, 0.0})}, {"b", VertexCondition::standard()}},
      {{0, 0, 2.0}, {0, 1, 1.0}});
}

inline MetricGraph parallel_pair() {
  return MetricGraph(
      {{"a", VertexCondition::standard()}, {"b", VertexCondition::standard()}},
      {{0, 1, 1.0}, {0, 1, 1.5}});
}

// The five standing fixture graphs used by the property suites.
inline std::vector<MetricGraph> standard_fixtures() {
  return {pt_interval(3.0), star3({-30.0, 0.0}), path3_ends_robin({-10.0, 0.0}),
          cycle_pendant({-2.0, 0.0}), k4({-6.0, 0.0})};
}

}  // namespace fixtures
