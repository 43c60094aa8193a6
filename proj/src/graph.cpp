// SPDX-License-Identifier: Apache-2.0
#include "robinq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace robinq {

MetricGraph::MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const int n = static_cast<int>(vertices_.size());
  degree_.assign(n, 0);
  incidence_.assign(n, {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n)
      throw DomainError("edge endpoint out of range");
    degree_[ed.u] += 1;
    degree_[ed.v] += 1;
    incidence_[ed.u].push_back({e, 0});
    incidence_[ed.v].push_back({e, 1});
  }
  dtn_index_.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    switch (vertices_[v].cond.kind) {
      case VertexKind::Robin: robin_.push_back(v); break;
      case VertexKind::Standard: standard_.push_back(v); break;
      case VertexKind::Dirichlet: dirichlet_.push_back(v); break;
    }
  }
  for (int v : robin_) {
    dtn_index_[v] = static_cast<int>(dtn_.size());
    dtn_.push_back(v);
  }
  for (int v : standard_) {
    dtn_index_[v] = static_cast<int>(dtn_.size());
    dtn_.push_back(v);
  }
}

int MetricGraph::find_vertex(const std::string& id) const {
  for (int v = 0; v < vertex_count(); ++v)
    if (vertices_[v].id == id) return v;
  return -1;
}

double MetricGraph::total_length() const {
  double s = 0.0;
  for (const Edge& e : edges_) s += e.length;
  return s;
}

double MetricGraph::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_) m = std::min(m, e.length);
  return m;
}

std::optional<int> MetricGraph::min_robin_degree() const {
  std::optional<int> m;
  for (int v : robin_)
    if (!m || degree_[v] < *m) m = degree_[v];
  return m;
}

double MetricGraph::shortest_incident(int v) const {
  double m = std::numeric_limits<double>::infinity();
  for (const EdgeEnd& ee : incidence_[v]) m = std::min(m, edges_[ee.edge].length);
  return m;
}

bool MetricGraph::is_simple() const {
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges_) {
    if (e.u == e.v) return false;
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) return false;
  }
  return true;
}

bool MetricGraph::is_connected() const {
  const int n = vertex_count();
  if (n == 0) return true;
  std::vector<char> vis(n, 0);
  std::vector<int> stack{0};
  vis[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const EdgeEnd& ee : incidence_[v]) {
      const Edge& ed = edges_[ee.edge];
      int w = (ee.end == 0) ? ed.v : ed.u;
      if (!vis[w]) {
        vis[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(vis.begin(), vis.end(), [](char c) { return c != 0; });
}

std::vector<cdouble> MetricGraph::robin_alphas() const {
  std::vector<cdouble> out;
  out.reserve(robin_.size());
  for (int v : robin_) out.push_back(vertices_[v].cond.alpha);
  return out;
}

ValidationReport MetricGraph::validate() const {
  ValidationReport rep;
  if (vertices_.empty()) rep.violations.push_back("graph has no vertices");
  if (edges_.empty()) rep.violations.push_back("graph has no edges");
  std::set<std::string> ids;
  for (const Vertex& v : vertices_) {
    if (v.id.empty()) rep.violations.push_back("vertex with empty id");
    if (!ids.insert(v.id).second)
      rep.violations.push_back("duplicate vertex id: " + v.id);
  }
  for (size_t e = 0; e < edges_.size(); ++e) {
    if (!(edges_[e].length > 0.0) || !std::isfinite(edges_[e].length)) {
      std::ostringstream os;
      os << "edge " << e << " has non-positive length";
      rep.violations.push_back(os.str());
    }
  }
  if (!edges_.empty() && !is_connected())
    rep.violations.push_back("graph is not connected");
  for (int v = 0; v < vertex_count(); ++v)
    if (degree_[v] == 0)
      rep.violations.push_back("isolated vertex: " + vertices_[v].id);
  return rep;
}

MetricGraph MetricGraph::with_robin_alphas(const std::vector<cdouble>& alphas) const {
  if (alphas.size() != robin_.size())
    throw DomainError("alpha vector length does not match Robin vertex count");
  std::vector<Vertex> vs = vertices_;
  for (size_t j = 0; j < robin_.size(); ++j) vs[robin_[j]].cond.alpha = alphas[j];
  return MetricGraph(std::move(vs), edges_);
}

MetricGraph MetricGraph::with_robin_as_dirichlet() const {
  std::vector<Vertex> vs = vertices_;
  for (int v : robin_) vs[v].cond = VertexCondition::dirichlet();
  return MetricGraph(std::move(vs), edges_);
}

MetricGraph MetricGraph::with_all_dirichlet() const {
  std::vector<Vertex> vs = vertices_;
  for (Vertex& v : vs) v.cond = VertexCondition::dirichlet();
  return MetricGraph(std::move(vs), edges_);
}

namespace {

// One subdivision sweep: every loop gets a midpoint, and in every bundle of
// parallel edges all edges but the first get midpoints. May need a second
// sweep: a loop split once yields two parallel edges.
MetricGraph subdivide_once(const MetricGraph& g, bool& changed) {
  changed = false;
  std::vector<Vertex> vs = g.vertices();
  std::vector<Edge> es;
  std::set<std::pair<int, int>> seen;
  int fresh = 0;
  auto new_vertex = [&]() {
    std::string id;
    do {
      id = "_s" + std::to_string(fresh++);
    } while (g.find_vertex(id) >= 0);
    vs.push_back({id, VertexCondition::standard()});
    return static_cast<int>(vs.size()) - 1;
  };
  for (const Edge& e : g.edges()) {
    bool split = false;
    if (e.u == e.v) {
      split = true;
    } else {
      auto key = std::minmax(e.u, e.v);
      if (!seen.insert(key).second) split = true;
    }
    if (split) {
      int m = new_vertex();
      es.push_back({e.u, m, e.length / 2});
      es.push_back({m, e.v, e.length / 2});
      changed = true;
    } else {
      es.push_back(e);
    }
  }
  return MetricGraph(std::move(vs), std::move(es));
}

}  // namespace

MetricGraph subdivide_special_edges(const MetricGraph& g) {
  MetricGraph cur = g;
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    MetricGraph next = subdivide_once(cur, changed);
    if (!changed) return cur;
    cur = std::move(next);
  }
  if (!cur.is_simple()) throw NumericError("subdivision did not terminate");
  return cur;
}

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw DomainError(std::string("unknown key \"") + it.key() + "\" in " + where);
  }
}

VertexCondition parse_condition(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "standard") return VertexCondition::standard();
    if (s == "dirichlet") return VertexCondition::dirichlet();
    throw DomainError("unknown vertex condition: " + s);
  }
  if (j.is_object()) {
    reject_unknown(j, {"robin"}, "vertex condition");
    if (!j.contains("robin")) throw DomainError("vertex condition object needs \"robin\"");
    const json& r = j.at("robin");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
      throw DomainError("\"robin\" must be [re, im]");
    return VertexCondition::robin({r[0].get<double>(), r[1].get<double>()});
  }
  throw DomainError("vertex condition must be a string or {\"robin\": [re, im]}");
}

}  // namespace

MetricGraph parse_graph_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("top level must be an object");
  reject_unknown(j, {"vertices", "edges"}, "graph");
  if (!j.contains("vertices") || !j.contains("edges"))
    throw DomainError("graph needs \"vertices\" and \"edges\"");

  std::vector<Vertex> vs;
  std::map<std::string, int> index;
  for (const json& vj : j.at("vertices")) {
    if (!vj.is_object()) throw DomainError("vertex entries must be objects");
    reject_unknown(vj, {"id", "condition"}, "vertex");
    if (!vj.contains("id") || !vj.at("id").is_string())
      throw DomainError("vertex needs a string \"id\"");
    Vertex v;
    v.id = vj.at("id").get<std::string>();
    v.cond = vj.contains("condition") ? parse_condition(vj.at("condition"))
                                      : VertexCondition::standard();
    if (index.count(v.id)) throw DomainError("duplicate vertex id: " + v.id);
    index[v.id] = static_cast<int>(vs.size());
    vs.push_back(std::move(v));
  }

  std::vector<Edge> es;
  for (const json& ej : j.at("edges")) {
    if (!ej.is_object()) throw DomainError("edge entries must be objects");
    reject_unknown(ej, {"from", "to", "length"}, "edge");
    if (!ej.contains("from") || !ej.contains("to") || !ej.contains("length"))
      throw DomainError("edge needs \"from\", \"to\", \"length\"");
    if (!ej.at("from").is_string() || !ej.at("to").is_string())
      throw DomainError("edge endpoints must be vertex ids");
    if (!ej.at("length").is_number()) throw DomainError("edge length must be a number");
    Edge e;
    auto fu = index.find(ej.at("from").get<std::string>());
    auto fv = index.find(ej.at("to").get<std::string>());
    if (fu == index.end() || fv == index.end())
      throw DomainError("edge references unknown vertex");
    e.u = fu->second;
    e.v = fv->second;
    e.length = ej.at("length").get<double>();
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw DomainError("edge length must be positive");
    es.push_back(e);
  }
  return MetricGraph(std::move(vs), std::move(es));
}

std::string write_graph_json(const MetricGraph& g) {
  json j;
  j["vertices"] = json::array();
  for (const Vertex& v : g.vertices()) {
    json vj;
    vj["id"] = v.id;
    switch (v.cond.kind) {
      case VertexKind::Standard: vj["condition"] = "standard"; break;
      case VertexKind::Dirichlet: vj["condition"] = "dirichlet"; break;
      case VertexKind::Robin:
        vj["condition"] = {{"robin", {v.cond.alpha.real(), v.cond.alpha.imag()}}};
        break;
    }
    j["vertices"].push_back(vj);
  }
  j["edges"] = json::array();
  for (const Edge& e : g.edges()) {
    j["edges"].push_back({{"from", g.vertices()[e.u].id},
                          {"to", g.vertices()[e.v].id},
                          {"length", e.length}});
  }
  return j.dump(2) + "\n";
}

MetricGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph_json(buf.str());
}

}  // namespace robinq
