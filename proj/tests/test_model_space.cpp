#include <doctest.h>

#include <cmath>
#include <random>

#include "gausscap/error.hpp"
#include "gausscap/gauss_rules.hpp"
#include "gausscap/model_space.hpp"

using namespace gausscap;

TEST_CASE("hermite values") {
  CHECK(hermite_eval(0, 3.7) == 1.0);
  CHECK(hermite_eval(1, 2.0) == 2.0);
  CHECK(std::abs(hermite_eval(2, 1.0)) < 1e-15);
  // closed form h_3 = (x^3 - 3x)/sqrt(6)
  for (double x : {-1.3, 0.2, 2.5})
    CHECK(hermite_eval(3, x) == doctest::Approx((x * x * x - 3 * x) / std::sqrt(6.0)).epsilon(1e-14));
  CHECK_THROWS_AS(hermite_eval(-1, 0.0), ValidationError);
}

TEST_CASE("small grids") {
  auto g1 = build_grid({1, 0, 1});
  REQUIRE(g1.size() == 1);
  CHECK(g1.nodes(0, 0) == 0.0);
  CHECK(g1.weights(0) == doctest::Approx(1.0));

  auto g2 = build_grid({1, 1, 2});
  CHECK(g2.nodes(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(g2.nodes(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g2.weights(0) == doctest::Approx(0.5).epsilon(1e-14));

  auto g3 = build_grid({2, 1, 2});
  REQUIRE(g3.size() == 4);
  for (size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(g3.nodes(static_cast<Eigen::Index>(j), 0)) == doctest::Approx(1.0));
    CHECK(std::abs(g3.nodes(static_cast<Eigen::Index>(j), 1)) == doctest::Approx(1.0));
    CHECK(g3.weights(static_cast<Eigen::Index>(j)) == doctest::Approx(0.25));
  }
  CHECK_THROWS_AS(build_grid({1, 0, 401}), NumericalError);
}

TEST_CASE("one-dimensional exactness against normal moments") {
  // E x^{2k} = (2k-1)!!
  for (int Q : {3, 10, 25, 60}) {
    auto r = gauss_hermite(Q);
    for (int k = 0; 2 * k <= 2 * Q - 1; ++k) {
      if (k > 12) break;
      double s = 0.0;
      for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
      double df = 1.0;
      for (int j = 2 * k - 1; j > 0; j -= 2) df *= j;
      CHECK(s == doctest::Approx(df).epsilon(1e-11));
    }
  }
}

TEST_CASE("orthonormality on the tensor grid") {
  SpectralGrid sg({2, 7, 8});
  const auto& H = sg.basis_at_nodes();
  Eigen::MatrixXd G = H.transpose() * sg.grid().weights.asDiagonal() * H;
  CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("tail weights keep relative accuracy at high order") {
  // high-degree Hermite functions live on the outer nodes, where the weights
  // are far below machine epsilon
  for (int Q : {61, 101, 161}) {
    SpectralGrid sg({1, Q - 1, Q});
    const auto& H = sg.basis_at_nodes();
    Eigen::MatrixXd G = H.transpose() * sg.grid().weights.asDiagonal() * H;
    CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("expand examples and round trip") {
  SpectralGrid sg({1, 4, 5});
  auto one = expand([](std::span<const double>) { return 1.0; }, sg);
  CHECK(one.coeff(MultiIndex({0})) == doctest::Approx(1.0));
  CHECK(one.coeffs().tail(4).cwiseAbs().maxCoeff() < 1e-14);

  auto x = expand([](std::span<const double> p) { return p[0]; }, sg);
  CHECK(x.coeff(MultiIndex({1})) == doctest::Approx(1.0));
  CHECK(eval(x, std::vector<double>{0.5}) == doctest::Approx(0.5));

  auto x2 = expand([](std::span<const double> p) { return p[0] * p[0]; }, sg);
  CHECK(x2.coeff(MultiIndex({0})) == doctest::Approx(1.0));
  CHECK(x2.coeff(MultiIndex({2})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::abs(x2.coeff(MultiIndex({1}))) < 1e-14);
  CHECK(eval(x2, std::vector<double>{2.0}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(eval(x2, std::vector<double>{1.0, 2.0}), ValidationError);
  CHECK(x2.coeff(MultiIndex({9})) == 0.0);
}

TEST_CASE("Parseval and expand-eval identity") {
  SpectralGrid sg({2, 6, 7});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(static_cast<Eigen::Index>(sg.basis_size()));
  for (auto& v : c) v = nd(rng);
  auto u = sg.from_coeffs(c);
  Eigen::VectorXd vals = sg.nodal_values(u);
  CHECK(c.squaredNorm() == doctest::Approx(sg.grid().weights.dot(vals.cwiseAbs2())).epsilon(1e-10));
  auto back = sg.expand_nodal(vals);
  CHECK((back.coeffs() - c).cwiseAbs().maxCoeff() < 1e-10);
  // pointwise eval matches tabulated basis
  for (size_t j = 0; j < sg.node_count(); j += 5)
    CHECK(eval(u, sg.grid().node(j)) == doctest::Approx(vals(static_cast<Eigen::Index>(j))).epsilon(1e-10));
}

TEST_CASE("graded-lex order and JSON round trip") {
  MultiIndexSet s(2, 2);
  REQUIRE(s.size() == 6);
  CHECK(s[0].degrees() == std::vector<int>{0, 0});
  CHECK(s[1].degrees() == std::vector<int>{0, 1});
  CHECK(s[2].degrees() == std::vector<int>{1, 0});
  CHECK(s[3].degrees() == std::vector<int>{0, 2});
  CHECK(s[5].degrees() == std::vector<int>{2, 0});
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);

  SpectralGrid sg({2, 3, 4});
  Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(sg.basis_size()), -1.0, 2.0);
  auto u = sg.from_coeffs(c);
  auto j = expansion_to_json(u);
  CHECK(j["n"] == 2);
  CHECK(j["entries"].size() == sg.basis_size());
  auto v = expansion_from_json(nlohmann::json::parse(j.dump()), sg);
  CHECK(v.coeffs() == c);
}

TEST_CASE("time rules") {
  // generalized Laguerre reproduces Gamma moments
  auto lag = gauss_laguerre(20, 0.5);
  double m1 = 0.0;
  for (size_t i = 0; i < lag.nodes.size(); ++i) m1 += lag.weights[i] * lag.nodes[i];
  CHECK(m1 == doctest::Approx(1.5).epsilon(1e-12));

  // exponential rule: int e^{-m t} t^a e^{-t} dt / Gamma(a+1) = (1+m)^{-(a+1)}
  for (double a : {-0.5, 0.0, 0.5, 1.0}) {
    auto r = exponential_time_rule(40, a);
    for (int m : {0, 1, 2, 5, 12, 30, 79}) {
      double s = 0.0;
      for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::exp(-m * r.nodes[i]);
      CHECK(s == doctest::Approx(std::pow(1.0 + m, -(a + 1.0))).epsilon(1e-12));
    }
  }
}

TEST_CASE("model space validation") {
  CHECK_THROWS_AS(GaussModelSpace({1, 4, 4}).validate(), ValidationError);
  CHECK_THROWS_AS(GaussModelSpace({0, 1, 4}).validate(), ValidationError);
  CHECK_NOTHROW(GaussModelSpace({3, 4, 5}).validate());
}
