// SPDX-License-Identifier: Apache-2.0
//
// robinq: spectra of metric-graph Laplacians with complex vertex couplings.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "robinq/bounds.hpp"
#include "robinq/continuation.hpp"
#include "robinq/dtn.hpp"
#include "robinq/fd_oracle.hpp"
#include "robinq/graph.hpp"
#include "robinq/parallel.hpp"
#include "robinq/secular.hpp"

namespace {

using robinq::cdouble;
using robinq::DomainError;
using robinq::MetricGraph;
using robinq::Rect;
using robinq::RootResult;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

cdouble parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(text), 0.0};
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw DomainError("cannot parse complex value '" + text + "' (want re or re,im)");
  }
}

MetricGraph apply_alpha_overrides(const MetricGraph& g,
                                  const std::vector<std::string>& specs) {
  std::vector<cdouble> alphas = g.robin_alphas();
  for (const std::string& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      const cdouble a = parse_complex(spec);
      std::fill(alphas.begin(), alphas.end(), a);
      continue;
    }
    const std::string id = spec.substr(0, eq);
    const int v = g.find_vertex(id);
    if (v < 0) throw DomainError("unknown vertex id in alpha override: " + id);
    const auto& rv = g.robin_vertices();
    const auto it = std::find(rv.begin(), rv.end(), v);
    if (it == rv.end())
      throw DomainError("alpha override targets a non-Robin vertex: " + id);
    alphas[it - rv.begin()] = parse_complex(spec.substr(eq + 1));
  }
  return g.with_robin_alphas(alphas);
}

Rect checked_region(const std::vector<double>& r) {
  if (r.size() != 4) throw DomainError("region needs four numbers");
  const Rect rect{r[0], r[1], r[2], r[3]};
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
    throw DomainError("region is degenerate");
  return rect;
}

void check_tol(double tol) {
  if (!(tol >= 1e-14 && tol <= 1e-2))
    throw DomainError("tolerance outside [1e-14, 1e-2]");
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw DomainError("cannot open output file: " + path);
      os = &file;
    }
  }
  std::ostream& stream() { return *os; }
};

const char* status_name(robinq::BranchStatus s) {
  switch (s) {
    case robinq::BranchStatus::Divergent:
      return "divergent";
    case robinq::BranchStatus::DirichletConvergent:
      return "dirichlet_convergent";
    default:
      return "undecided";
  }
}

void emit_roots(std::ostream& os, const std::vector<RootResult>& roots) {
  os << "re_lambda,im_lambda,multiplicity,residual\n";
  for (const RootResult& r : roots)
    os << fmt(r.lambda.real()) << ',' << fmt(r.lambda.imag()) << ',' << r.multiplicity
       << ',' << fmt(r.residual) << '\n';
}

struct SweepDirection {
  double modulus = 0.0;
  double angle = 0.0;
};

SweepDirection parse_direction(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos)
    throw DomainError("cannot parse direction '" + text + "' (want modulus@angle)");
  try {
    SweepDirection d{std::stod(text.substr(0, at)), std::stod(text.substr(at + 1))};
    if (d.modulus < 0.0) throw DomainError("direction modulus must be >= 0");
    return d;
  } catch (const std::exception&) {
    throw DomainError("cannot parse direction '" + text + "' (want modulus@angle)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues of Laplacians on metric graphs with complex Robin couplings"};
  app.require_subcommand(1);

  std::string graph_path, output_path;
  std::vector<std::string> alpha_specs;
  std::vector<double> region_raw;
  double tol = 1e-10;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  auto add_common = [&](CLI::App* sub, bool needs_region) {
    sub->add_option("--graph", graph_path, "graph JSON file")->required();
    sub->add_option("--alpha", alpha_specs,
                    "coupling override: re[,im] for all Robin vertices or id=re[,im]");
    sub->add_option("--tol", tol, "root tolerance");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--output", output_path, "output file (default stdout)");
    auto* reg = sub->add_option("--region", region_raw,
                                "re_min re_max im_min im_max")->expected(4);
    if (needs_region) reg->required();
  };

  auto* c_validate = app.add_subcommand("validate", "check a graph file");
  c_validate->add_option("--graph", graph_path, "graph JSON file")->required();

  auto* c_spectrum = app.add_subcommand("spectrum", "eigenvalues in a window");
  add_common(c_spectrum, true);

  auto* c_dirichlet =
      app.add_subcommand("dirichlet-spectrum", "spectrum with Robin vertices pinned");
  add_common(c_dirichlet, true);

  auto* c_dtn = app.add_subcommand("dtn", "vertex response matrix at one lambda");
  std::string lambda_spec;
  add_common(c_dtn, false);
  c_dtn->add_option("--lambda", lambda_spec, "spectral parameter re[,im]")->required();

  auto* c_sweep = app.add_subcommand("sweep", "trace eigenvalue branches along a ray");
  std::vector<std::string> direction_specs;
  double t_max = 1.0;
  int samples = 50;
  double div_threshold = 1e3, conv_tol = 1e-6, dt_floor_factor = 1e-8;
  add_common(c_sweep, true);
  c_sweep->add_option("--direction", direction_specs,
                      "modulus@angle for all Robin vertices or id=modulus@angle")
      ->required();
  c_sweep->add_option("--t-max", t_max, "parameter horizon")->required();
  c_sweep->add_option("--samples", samples, "max CSV rows per branch");
  c_sweep->add_option("--div-threshold", div_threshold, "divergence distance threshold");
  c_sweep->add_option("--conv-tol", conv_tol, "pinned-limit matching tolerance");
  c_sweep->add_option("--dt-floor-factor", dt_floor_factor, "min step as fraction of t-max");

  auto* c_bounds = app.add_subcommand("bounds", "spectral enclosure bounds");
  add_common(c_bounds, false);

  auto* c_sample = app.add_subcommand("sample-range", "random Rayleigh quotients");
  int n_samples = 200;
  std::uint64_t seed = 1;
  add_common(c_sample, false);
  c_sample->add_option("--samples", n_samples, "sample count");
  c_sample->add_option("--seed", seed, "RNG seed");

  auto* c_oracle =
      app.add_subcommand("oracle-compare", "secular roots vs discretized eigenvalues");
  double nodes_per_unit = 64.0;
  add_common(c_oracle, true);
  c_oracle->add_option("--nodes", nodes_per_unit, "mesh nodes per unit length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    check_tol(tol);
    if (workers < 1) throw DomainError("worker count must be positive");

    if (app.got_subcommand(c_validate)) {
      const MetricGraph g = robinq::load_graph_file(graph_path);
      const robinq::ValidationReport report = g.validate();
      if (!report.ok()) {
        for (const std::string& v : report.violations)
          std::cerr << "invalid: " << v << '\n';
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }

    MetricGraph g = apply_alpha_overrides(robinq::load_graph_file(graph_path),
                                          alpha_specs);
    const robinq::ValidationReport report = g.validate();
    if (!report.ok()) throw DomainError("invalid graph: " + report.violations.front());
    Output out(output_path);

    if (app.got_subcommand(c_spectrum)) {
      const Rect rect = checked_region(region_raw);
      const auto roots = robinq::find_roots(g, g.robin_alphas(), rect, tol, workers);
      const auto pinned = robinq::dirichlet_spectrum(g, rect, tol, false, workers);
      for (const RootResult& r : roots)
        if (robinq::near_dirichlet(r.lambda, pinned))
          std::cerr << "warning: root " << fmt(r.lambda.real()) << (r.lambda.imag() < 0 ? "-" : "+")
                    << fmt(std::abs(r.lambda.imag())) << "i lies within 1e-6 of the pinned spectrum;"
                    << " the reduced-determinant cross-check does not apply there\n";
      emit_roots(out.stream(), roots);
      return 0;
    }

    if (app.got_subcommand(c_dirichlet)) {
      const Rect rect = checked_region(region_raw);
      emit_roots(out.stream(),
                 robinq::dirichlet_spectrum(g, rect, tol, false, workers));
      return 0;
    }

    if (app.got_subcommand(c_dtn)) {
      const cdouble lambda = parse_complex(lambda_spec);
      const Eigen::MatrixXcd m = robinq::vertex_dtn(g, lambda).matrix;
      out.stream() << "row,col,re,im\n";
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          out.stream() << i << ',' << j << ',' << fmt(m(i, j).real()) << ','
                       << fmt(m(i, j).imag()) << '\n';
      return 0;
    }

    if (app.got_subcommand(c_sweep)) {
      const Rect rect = checked_region(region_raw);
      const auto& rv = g.robin_vertices();
      robinq::ParameterPath path;
      path.t_max = t_max;
      path.specs.resize(rv.size());
      const auto bases = g.robin_alphas();
      for (size_t j = 0; j < rv.size(); ++j) path.specs[j].base = bases[j];
      for (const std::string& spec : direction_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
          const SweepDirection d = parse_direction(spec);
          for (auto& s : path.specs) {
            s.modulus = d.modulus;
            s.angle = d.angle;
          }
          continue;
        }
        const int v = g.find_vertex(spec.substr(0, eq));
        const auto it = v < 0 ? rv.end() : std::find(rv.begin(), rv.end(), v);
        if (it == rv.end())
          throw DomainError("unknown or non-Robin vertex id in direction: " +
                            spec.substr(0, eq));
        const SweepDirection d = parse_direction(spec.substr(eq + 1));
        path.specs[it - rv.begin()].modulus = d.modulus;
        path.specs[it - rv.begin()].angle = d.angle;
      }

      robinq::TraceConfig cfg;
      cfg.tol = tol;
      cfg.div_threshold = div_threshold;
      cfg.conv_tol = conv_tol;
      cfg.dt_floor_factor = dt_floor_factor;
      const auto roots0 = robinq::find_roots(g, path.alphas(0.0), rect, tol, workers);
      // one spectral gap of slack: rightward branches climb past re_max while
      // settling onto the pinned spectrum
      const double ell = g.min_edge_length();
      const double gap = M_PI * M_PI / (ell * ell) +
                         2.0 * M_PI * std::sqrt(std::max(0.0, rect.re_max)) / ell;
      const Rect pinned_window{std::min(rect.re_min, -1.0), rect.re_max + 2.0 * gap,
                               -0.5, 0.5};
      const auto pinned = robinq::dirichlet_spectrum(g, pinned_window, cfg.tol, false, workers);

      std::vector<robinq::Branch> branches(roots0.size());
      robinq::parallel_for(roots0.size(), workers, [&](size_t i) {
        branches[i] = robinq::trace_branch(g, path, roots0[i], cfg);
        robinq::classify_limit(branches[i], pinned, cfg);
      });

      auto& os = out.stream();
      os << "t";
      for (int v : rv) os << ",re_alpha_" << g.vertices()[v].id;
      for (int v : rv) os << ",im_alpha_" << g.vertices()[v].id;
      os << ",re_lambda,im_lambda,status\n";
      for (const robinq::Branch& b : branches) {
        const size_t n = b.samples.size();
        std::vector<size_t> picks;
        if (n <= static_cast<size_t>(samples)) {
          picks.resize(n);
          for (size_t i = 0; i < n; ++i) picks[i] = i;
        } else {
          for (int i = 0; i < samples; ++i)
            picks.push_back(i * (n - 1) / (samples - 1));
        }
        for (size_t i : picks) {
          const robinq::BranchSample& s = b.samples[i];
          os << fmt(s.t);
          const auto a = path.alphas(s.t);
          for (const cdouble& aj : a) os << ',' << fmt(aj.real());
          for (const cdouble& aj : a) os << ',' << fmt(aj.imag());
          os << ',' << fmt(s.lambda.real()) << ',' << fmt(s.lambda.imag()) << ','
             << status_name(b.status) << '\n';
        }
      }
      return 0;
    }

    if (app.got_subcommand(c_bounds)) {
      const auto alphas = g.robin_alphas();
      if (alphas.empty()) throw DomainError("graph has no Robin vertices");
      for (const cdouble& a : alphas)
        if (a != alphas.front())
          throw DomainError("bounds need one constant coupling; pass --alpha");
      const cdouble a = alphas.front();
      const double dd = double(*g.min_robin_degree());
      auto& os = out.stream();
      os << "name,value\n";
      os << "min_robin_degree," << fmt(dd) << '\n';
      os << "min_edge_length," << fmt(g.min_edge_length()) << '\n';
      os << "total_length," << fmt(g.total_length()) << '\n';
      os << "robin_count," << alphas.size() << '\n';
      os << "real_part_lower_bound,"
         << fmt(robinq::real_part_lower_bound(a, g)) << '\n';
      if (a.imag() == 0.0 && a.real() < 0.0)
        os << "first_eigenvalue_upper_bound,"
           << fmt(robinq::first_eigenvalue_upper_bounds(a.real(), g)) << '\n';
      return 0;
    }

    if (app.got_subcommand(c_sample)) {
      const auto alphas = g.robin_alphas();
      if (alphas.empty()) throw DomainError("graph has no Robin vertices");
      bool constant = true;
      for (const cdouble& a : alphas) constant = constant && a == alphas.front();
      const robinq::RangeRegion region =
          constant ? robinq::RangeRegion::constant_alpha(alphas.front(), g)
                   : robinq::RangeRegion::variable_alpha(alphas, g);
      auto& os = out.stream();
      os << "re_q,im_q,member\n";
      for (int i = 0; i < n_samples; ++i) {
        const auto f = robinq::random_test_function(g, seed + i);
        const cdouble q = robinq::rayleigh_quotient(g, alphas, f);
        os << fmt(q.real()) << ',' << fmt(q.imag()) << ','
           << (robinq::region_membership(q, region) ? 1 : 0) << '\n';
      }
      return 0;
    }

    if (app.got_subcommand(c_oracle)) {
      const Rect rect = checked_region(region_raw);
      const auto alphas = g.robin_alphas();
      const auto secular = robinq::find_roots(g, alphas, rect, tol, workers);
      const auto op = robinq::discretize(g, alphas, nodes_per_unit);
      auto discrete = robinq::eigs_window(op, rect);
      std::vector<char> used(discrete.size(), 0);
      auto& os = out.stream();
      os << "kind,re_secular,im_secular,re_discrete,im_discrete,error\n";
      for (const RootResult& r : secular) {
        for (int copy = 0; copy < r.multiplicity; ++copy) {
          int best = -1;
          double best_d = std::numeric_limits<double>::infinity();
          for (size_t i = 0; i < discrete.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(discrete[i] - r.lambda);
            if (d < best_d) {
              best_d = d;
              best = static_cast<int>(i);
            }
          }
          const double allow = 5.0 * op.h_max * op.h_max * (1.0 + std::abs(r.lambda));
          if (best >= 0 && best_d <= allow) {
            used[best] = 1;
            os << "pair," << fmt(r.lambda.real()) << ',' << fmt(r.lambda.imag()) << ','
               << fmt(discrete[best].real()) << ',' << fmt(discrete[best].imag()) << ','
               << fmt(best_d) << '\n';
          } else {
            os << "unmatched_secular," << fmt(r.lambda.real()) << ','
               << fmt(r.lambda.imag()) << ",,," << '\n';
          }
        }
      }
      for (size_t i = 0; i < discrete.size(); ++i)
        if (!used[i])
          os << "unmatched_discrete,,," << fmt(discrete[i].real()) << ','
             << fmt(discrete[i].imag()) << ",\n";
      return 0;
    }

    throw DomainError("no subcommand selected");
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const robinq::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
