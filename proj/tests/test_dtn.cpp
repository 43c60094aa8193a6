// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "robinq/dtn.hpp"
#include "robinq/kernels.hpp"

using namespace robinq;

namespace {

constexpr double kCoth1 = 1.3130352854993312;
constexpr double kCsch1 = 0.8509181282393216;
constexpr double kTanh1 = 0.7615941559557649;

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Closed form for the equilateral 3-star with standard leaves: the response
// seen from the center reduces to 3 sqrt(l) tan(sqrt(l)).
cdouble star3_response(cdouble lam) {
  const cdouble rt = std::sqrt(lam);
  return 3.0 * rt * std::tan(rt);
}

}  // namespace

TEST_CASE("single edge reproduces the edge response") {
  const MetricGraph g = fixtures::interval(VertexCondition::robin({1.0, 0.0}),
                                           VertexCondition::robin({2.0, 0.0}));
  const FullDtn full = assemble_full_dtn(g, {-1.0, 0.0});
  REQUIRE(full.matrix.rows() == 2);
  const EdgeDtn d = edge_dtn({-1.0, 0.0}, 1.0);
  CHECK(std::abs(full.matrix(0, 0) - d.a) < 1e-14);
  CHECK(std::abs(full.matrix(1, 1) - d.a) < 1e-14);
  CHECK(std::abs(full.matrix(0, 1) - d.b) < 1e-14);
  CHECK(std::abs(full.matrix(1, 0) - d.b) < 1e-14);

  // k = n: reduction is the identity.
  const ReducedDtn red = reduce_dtn(full, 2);
  CHECK(red.k_rcond == 1.0);
  CHECK((red.matrix - full.matrix).norm() == 0.0);
}

TEST_CASE("3-star full matrix by hand") {
  const MetricGraph g = fixtures::star3({-30.0, 0.0});
  const FullDtn full = assemble_full_dtn(g, {-1.0, 0.0});
  REQUIRE(full.matrix.rows() == 4);
  CHECK(full.vertex_order == std::vector<int>{0, 1, 2, 3});

  CHECK(std::abs(full.matrix(0, 0) - cdouble{-3.0 * kCoth1, 0.0}) < 1e-13);
  for (int l = 1; l < 4; ++l) {
    CHECK(std::abs(full.matrix(l, l) - cdouble{-kCoth1, 0.0}) < 1e-13);
    CHECK(std::abs(full.matrix(0, l) - cdouble{kCsch1, 0.0}) < 1e-13);
    CHECK(std::abs(full.matrix(l, 0) - cdouble{kCsch1, 0.0}) < 1e-13);
  }
  for (int l = 1; l < 4; ++l)
    for (int m = 1; m < 4; ++m)
      if (l != m) CHECK(std::abs(full.matrix(l, m)) == 0.0);

  // Transpose symmetry holds exactly for complex lambda too.
  const FullDtn fc = assemble_full_dtn(g, {2.0, 3.0});
  CHECK((fc.matrix - fc.matrix.transpose()).norm() == 0.0);
}

TEST_CASE("Schur reduction onto the center") {
  const MetricGraph g = fixtures::star3({-30.0, 0.0});
  const ReducedDtn red = vertex_dtn(g, {-1.0, 0.0});
  REQUIRE(red.matrix.rows() == 1);
  CHECK(std::abs(red.matrix(0, 0) - cdouble{-3.0 * kTanh1, 0.0}) < 1e-13);
  CHECK(std::abs(red.matrix(0, 0) - cdouble{-2.2847824678672946, 0.0}) < 1e-13);

  // Independent closed form across real and complex lambda.
  for (const cdouble lam : {cdouble{-7.0, 0.0}, cdouble{2.2, 0.0}, cdouble{5.0, 4.0},
                            cdouble{-11.0, -3.0}}) {
    const ReducedDtn r = vertex_dtn(g, lam);
    CHECK(std::abs(r.matrix(0, 0) - star3_response(lam)) <
          1e-10 * (1.0 + std::abs(star3_response(lam))));
  }
}

TEST_CASE("singular interior block is reported") {
  // lambda = pi^2/4 pins the leaf block exactly (cot(pi/2) = 0).
  const MetricGraph g = fixtures::star3({-30.0, 0.0});
  CHECK_THROWS_WITH_AS(vertex_dtn(g, {M_PI * M_PI / 4.0, 0.0}),
                       doctest::Contains("near Dirichlet spectrum"), NumericError);
  // Edge poles are caught before assembly completes.
  CHECK_THROWS_WITH_AS(assemble_full_dtn(g, {M_PI * M_PI, 0.0}),
                       doctest::Contains("edge Dirichlet pole"), NumericError);
  // Loops and parallel edges must be split first.
  CHECK_THROWS_AS(assemble_full_dtn(fixtures::loop_pendant(), {-1.0, 0.0}), DomainError);
}

TEST_CASE("simple pole growth toward the pinned spectrum") {
  const MetricGraph g = fixtures::star3({-30.0, 0.0});
  const double pole = M_PI * M_PI / 4.0;
  std::vector<double> lr, ln;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    double biggest = 0.0;
    for (const cdouble dir : {cdouble{1, 0}, cdouble{-1, 0}, cdouble{0, 1}}) {
      const ReducedDtn red = vertex_dtn(g, pole + r * dir);
      biggest = std::max(biggest, red.matrix.norm());
    }
    lr.push_back(std::log(r));
    ln.push_back(std::log(biggest));
  }
  CHECK(std::abs(slope(lr, ln) + 1.0) < 0.02);
}

TEST_CASE("deep asymptotics approach i sqrt(lambda) D at the shortest-edge rate") {
  // Both fixtures keep every vertex Robin, so the off-diagonal couplings that
  // carry the slowest exponential survive the (trivial) reduction.
  struct Case {
    MetricGraph g;
    double ell_min;
  };
  const std::vector<Case> cases{
      {fixtures::interval(VertexCondition::robin({1.0, 0.0}),
                          VertexCondition::robin({1.0, 0.0})),
       1.0},
      {fixtures::k4({-6.0, 0.0}), 1.0}};
  for (const Case& c : cases) {
    std::vector<double> taus{8.0, 12.0, 16.0}, logs;
    for (double tau : taus) {
      const cdouble lam = -tau * tau;
      const cdouble rt = std::sqrt(lam);
      const ReducedDtn red = vertex_dtn(c.g, lam);
      Eigen::MatrixXcd limit =
          Eigen::MatrixXcd::Zero(red.matrix.rows(), red.matrix.cols());
      for (int j = 0; j < red.matrix.rows(); ++j)
        limit(j, j) = cdouble{0.0, 1.0} * rt *
                      double(c.g.degree(c.g.robin_vertices()[size_t(j)]));
      const double dev = (red.matrix - limit).norm();
      CHECK(dev <= 20.0 * std::abs(rt) * std::exp(-c.ell_min * tau));
      logs.push_back(std::log(dev / std::abs(rt)));
    }
    CHECK(std::abs(slope(taus, logs) + c.ell_min) < 0.10 * c.ell_min);
  }
}

TEST_CASE("response eigenvalues trail i sqrt(lambda) times the degrees") {
  // Path with all three vertices Robin: degree pattern (1, 2, 1).
  const MetricGraph g = fixtures::path3(VertexCondition::robin({1.0, 0.0}),
                                        VertexCondition::robin({-2.0, 0.0}),
                                        VertexCondition::robin({0.5, 0.0}));
  const double tau = 12.0;
  const cdouble lam = -tau * tau;
  const cdouble rt = std::sqrt(lam);
  const ReducedDtn red = vertex_dtn(g, lam);
  const std::vector<cdouble> mu = dtn_eigenvalues(red.matrix);
  std::vector<cdouble> want{cdouble{0, 1} * rt * 1.0, cdouble{0, 1} * rt * 1.0,
                            cdouble{0, 1} * rt * 2.0};  // modulus order
  REQUIRE(mu.size() == want.size());
  for (size_t i = 0; i < mu.size(); ++i)
    CHECK(std::abs(mu[i] - want[i]) < 20.0 * tau * std::exp(-tau));
}

TEST_CASE("small dense eigensolver sanity") {
  Eigen::MatrixXcd swap(2, 2);
  swap << 0, 1, 1, 0;
  const std::vector<cdouble> mu = dtn_eigenvalues(swap);
  REQUIRE(mu.size() == 2);
  CHECK(std::abs(mu[0] - cdouble{-1, 0}) < 1e-12);
  CHECK(std::abs(mu[1] - cdouble{1, 0}) < 1e-12);

  // Companion matrix of z^3 - 1: the cube roots of unity.
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(3, 3);
  comp(0, 2) = 1;
  comp(1, 0) = 1;
  comp(2, 1) = 1;
  const std::vector<cdouble> roots = dtn_eigenvalues(comp);
  REQUIRE(roots.size() == 3);
  for (const cdouble& z : roots) CHECK(std::abs(z * z * z - 1.0) < 1e-12);
}
