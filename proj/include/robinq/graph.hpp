// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robinq/common.hpp"

namespace robinq {

enum class VertexKind { Robin, Standard, Dirichlet };

struct VertexCondition {
  VertexKind kind = VertexKind::Standard;
  cdouble alpha{0.0, 0.0};  // coupling strength, Robin only

  static VertexCondition robin(cdouble a) { return {VertexKind::Robin, a}; }
  static VertexCondition standard() { return {VertexKind::Standard, {}}; }
  static VertexCondition dirichlet() { return {VertexKind::Dirichlet, {}}; }
};

struct Vertex {
  std::string id;
  VertexCondition cond;
};

struct Edge {
  int u = -1;  // indices into the vertex list
  int v = -1;
  double length = 0.0;
};

// One endpoint of an edge as seen from a vertex: `end == 0` means the x=0
// endpoint, `end == 1` the x=length endpoint.
struct EdgeEnd {
  int edge;
  int end;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

class MetricGraph {
 public:
  MetricGraph() = default;
  MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  int degree(int v) const { return degree_[v]; }  // loops count twice
  const std::vector<EdgeEnd>& incident(int v) const { return incidence_[v]; }

  // Vertex subsets, each in vertex-list order.
  const std::vector<int>& robin_vertices() const { return robin_; }
  const std::vector<int>& standard_vertices() const { return standard_; }
  const std::vector<int>& dirichlet_vertices() const { return dirichlet_; }

  // Index set for the vertex DtN matrix: Robin vertices first (list order),
  // then Standard vertices; Dirichlet vertices are excluded.
  const std::vector<int>& dtn_vertices() const { return dtn_; }
  int dtn_index(int v) const { return dtn_index_[v]; }  // -1 for Dirichlet

  int find_vertex(const std::string& id) const;  // -1 if absent

  double total_length() const;
  double min_edge_length() const;
  std::optional<int> min_robin_degree() const;
  double shortest_incident(int v) const;
  bool is_simple() const;  // no loops, no parallel edges
  bool is_connected() const;

  std::vector<cdouble> robin_alphas() const;

  ValidationReport validate() const;

  // Copies with modified conditions; Robin ordering conventions preserved.
  MetricGraph with_robin_alphas(const std::vector<cdouble>& alphas) const;
  MetricGraph with_robin_as_dirichlet() const;  // the operator behind sigma(-Delta^D_{V_R})
  MetricGraph with_all_dirichlet() const;       // full decoupling -Delta^D_V

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<int> degree_;
  std::vector<std::vector<EdgeEnd>> incidence_;
  std::vector<int> robin_, standard_, dirichlet_, dtn_, dtn_index_;
};

// Splits loops and parallel-edge bundles with midpoint vertices until the
// graph is simple. Identity on already-simple graphs.
MetricGraph subdivide_special_edges(const MetricGraph& g);

MetricGraph parse_graph_json(const std::string& text);
std::string write_graph_json(const MetricGraph& g);
MetricGraph load_graph_file(const std::string& path);

}  // namespace robinq
