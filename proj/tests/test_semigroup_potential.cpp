#include <doctest.h>

#include <cmath>
#include <random>

#include "gausscap/error.hpp"
#include "gausscap/potential.hpp"
#include "gausscap/semigroup.hpp"

using namespace gausscap;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

// Richardson-extrapolated central difference along h.
double fd1(const std::function<double(double)>& g, double step = 1e-3) {
  auto c = [&](double s) { return (g(s) - g(-s)) / (2 * s); };
  return (4 * c(step / 2) - c(step)) / 3;
}
double fd2(const std::function<double(double)>& g, double step = 1e-2) {
  auto c = [&](double s) { return (g(s) - 2 * g(0.0) + g(-s)) / (s * s); };
  return (4 * c(step / 2) - c(step)) / 3;
}

}  // namespace

TEST_CASE("mehler examples") {
  auto g = build_grid({1, 6, 12});
  ScalarField one = [](std::span<const double>) { return 1.0; };
  ScalarField h1 = [](std::span<const double> x) { return x[0]; };
  ScalarField h2 = [](std::span<const double> x) { return hermite_eval(2, x[0]); };
  CHECK(mehler_apply(one, 0.3, pt({1.7}), g) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mehler_apply(h1, std::log(2.0), pt({1.0}), g) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(mehler_apply(h2, 20.0, pt({0.0}), g)) < 1e-8);
  CHECK_THROWS_AS(mehler_apply(one, 0.0, pt({0.0}), g), ValidationError);
}

TEST_CASE("spectral semigroup against Mehler") {
  SpectralGrid sg({2, 6, 7});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ut(0.01, 3.0);
  Eigen::VectorXd c(static_cast<Eigen::Index>(sg.basis_size()));
  for (auto& v : c) v = nd(rng);
  auto u = sg.from_coeffs(c);
  ScalarField f = [&](std::span<const double> x) { return eval(u, x); };
  for (int trial = 0; trial < 20; ++trial) {
    const double t = ut(rng);
    auto x = pt({nd(rng), nd(rng)});
    CHECK(eval(spectral_apply(u, t), x) == doctest::Approx(mehler_apply(f, t, x, sg.grid())).epsilon(1e-10));
  }
  auto a = spectral_apply(spectral_apply(u, 0.3), 0.7);
  auto b = spectral_apply(u, 1.0);
  CHECK((a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(spectral_apply(u, 0.0).coeffs() == c);
}

TEST_CASE("spectral_apply coefficient examples") {
  SpectralGrid sg({1, 3, 4});
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c(1) = 1.0;
  CHECK(spectral_apply(sg.from_coeffs(c), std::log(2.0)).coeffs()(1) == doctest::Approx(0.5));
  c.setZero();
  c(2) = 1.0;
  CHECK(spectral_apply(sg.from_coeffs(c), std::log(2.0)).coeffs()(2) == doctest::Approx(0.25));
  CHECK_THROWS_AS(spectral_apply(sg.from_coeffs(c), -1.0), ValidationError);
}

TEST_CASE("maximal function") {
  auto g = build_grid({1, 4, 8});
  auto tg = TimeGrid::log_spaced();
  REQUIRE(tg.values.size() == 64);
  ScalarField sq = [](std::span<const double> x) { return x[0] * x[0]; };
  CHECK(maximal_function(sq, pt({2.0}), tg, g) == doctest::Approx(4.0));
  ScalarField one = [](std::span<const double>) { return 1.0; };
  CHECK(maximal_function(one, pt({0.3}), tg, g) == doctest::Approx(1.0));
  TimeGrid empty;
  empty.includes_zero_limit = empty.includes_infinity_limit = false;
  CHECK_THROWS_AS(maximal_function(one, pt({0.0}), empty, g), ValidationError);
}

TEST_CASE("Cameron-Martin derivatives against finite differences") {
  auto g = build_grid({2, 6, 10});
  ScalarField f = [](std::span<const double> x) { return x[0] * x[0] * x[1] + 0.5 * x[1] * x[1] * x[1] - x[0]; };
  const double t = 0.4;
  auto x = pt({0.3, -0.8});
  auto h = pt({0.6, 0.8});
  auto along = [&](double s) {
    auto y = pt({x[0] + s * h[0], x[1] + s * h[1]});
    return mehler_apply(f, t, y, g);
  };
  CHECK(mehler_derivative(f, t, x, h, 1, g) == doctest::Approx(fd1(along)).epsilon(1e-7));
  CHECK(mehler_derivative(f, t, x, h, 2, g) == doctest::Approx(fd2(along)).epsilon(1e-6));

  auto g1 = build_grid({1, 4, 8});
  ScalarField one = [](std::span<const double>) { return 1.0; };
  ScalarField h1 = [](std::span<const double> y) { return y[0]; };
  ScalarField h2 = [](std::span<const double> y) { return hermite_eval(2, y[0]); };
  CHECK(std::abs(mehler_derivative(one, 0.5, pt({0.2}), pt({1.0}), 1, g1)) < 1e-14);
  CHECK(mehler_derivative(h1, 0.5, pt({0.2}), pt({1.0}), 1, g1) == doctest::Approx(std::exp(-0.5)));
  CHECK(mehler_derivative(h2, std::log(2.0), pt({0.0}), pt({1.0}), 2, g1) ==
        doctest::Approx(std::sqrt(2.0) / 4));
  CHECK_THROWS_AS(mehler_derivative(h1, 0.5, pt({0.2}), pt({2.0}), 1, g1), ValidationError);
  CHECK_THROWS_AS(mehler_derivative(h1, 0.5, pt({0.2}), pt({1.0}), 3, g1), ValidationError);
}

TEST_CASE("Bessel potential: spectral and quadrature") {
  SpectralGrid sg({1, 4, 8});
  Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
  c(0) = 1;
  CHECK(bessel_spectral(sg.from_coeffs(c), 3.0).coeffs()(0) == 1.0);
  c.setZero();
  c(1) = 1;
  CHECK(bessel_spectral(sg.from_coeffs(c), 2.0).coeffs()(1) == doctest::Approx(0.5));
  c.setZero();
  c(2) = 1;
  CHECK(bessel_spectral(sg.from_coeffs(c), 4.0).coeffs()(2) == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(bessel_spectral(sg.from_coeffs(c), 0.0), ValidationError);

  ScalarField one = [](std::span<const double>) { return 1.0; };
  ScalarField h1 = [](std::span<const double> y) { return y[0]; };
  ScalarField h2 = [](std::span<const double> y) { return hermite_eval(2, y[0]); };
  CHECK(bessel_quadrature(one, 1.3, pt({0.4}), sg.grid()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(bessel_quadrature(h1, 2.0, pt({1.0}), sg.grid()) - 0.5) < 1e-8);
  for (double x : {-1.2, 0.0, 2.3})
    CHECK(std::abs(bessel_quadrature(h2, 1.0, pt({x}), sg.grid()) - hermite_eval(2, x) / std::sqrt(3.0)) < 1e-8);
  // the plain Laguerre rule is far less accurate for high degree
  ScalarField h8 = [](std::span<const double> y) { return hermite_eval(4, y[0]); };
  const double exact = std::pow(5.0, -1.0) * hermite_eval(4, 1.5);
  CHECK(std::abs(bessel_quadrature(h8, 2.0, pt({1.5}), sg.grid(), 40, TimeRule::exponential) - exact) < 1e-12);
  CHECK(std::abs(bessel_quadrature(h8, 2.0, pt({1.5}), sg.grid(), 40, TimeRule::laguerre) - exact) < 1e-4);

  // potentials compose additively in r
  Eigen::VectorXd rnd = Eigen::VectorXd::LinSpaced(5, 1.0, -2.0);
  auto u = sg.from_coeffs(rnd);
  auto ab = bessel_spectral(bessel_spectral(u, 1.0), 2.5).coeffs();
  CHECK((ab - bessel_spectral(u, 3.5).coeffs()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("derivatives on expansions") {
  SpectralGrid sg({1, 4, 5});
  Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
  c(2) = 1;
  auto d = h_derivative(sg.from_coeffs(c), 0);
  CHECK(d.coeffs()(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(d.coeffs().cwiseAbs().sum() == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(h_derivative(d, 1), ValidationError);

  SpectralGrid s2({2, 3, 4});
  auto x1x2 = expand([](std::span<const double> x) { return x[0] * x[1]; }, s2);
  CHECK(dk_hs_norm(x1x2, 2, pt({0.3, 5.0})) == doctest::Approx(std::sqrt(2.0)));
  auto T = derivative_tensor(x1x2, 2, pt({0.1, 0.2}));
  CHECK(T.asymmetry() < 1e-14);
  // finite difference of the first derivative of a cubic
  auto cub = expand([](std::span<const double> x) { return x[0] * x[0] * x[1] - x[1]; }, s2);
  auto grad = derivative_tensor(cub, 1, pt({0.7, -0.4}));
  auto along = [&](double s) { return eval(cub, pt({0.7 + s, -0.4})); };
  CHECK(grad.entries[0] == doctest::Approx(fd1(along)).epsilon(1e-9));
}

TEST_CASE("Sobolev norms and Meyer ratio") {
  SpectralGrid sg({1, 4, 8});
  Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
  c(0) = -2.5;
  auto k = sg.from_coeffs(c);
  CHECK(sobolev_norm(k, {3, 1.7}, sg) == doctest::Approx(2.5));
  c.setZero();
  c(1) = 1;
  auto x = sg.from_coeffs(c);
  CHECK(sobolev_norm(x, {1, 2.0}, sg) == doctest::Approx(2.0));
  CHECK(sobolev_norm(x, {2, 2.0}, sg) == doctest::Approx(2.0));
  CHECK(meyer_ratio(x, {1, 2.0}, sg) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(meyer_ratio(k, {2, 3.0}, sg) == doctest::Approx(1.0));
  CHECK_THROWS_AS(meyer_ratio(sg.zero(), {1, 2.0}, sg), ValidationError);

  // operator form agrees with the expansion form
  SpectralGrid s2({2, 5, 6});
  Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(s2.basis_size()), -1.0, 1.0);
  auto u = s2.from_coeffs(r);
  for (int order : {0, 1, 2}) {
    DerivativeOperators ops(s2, order);
    auto norms = ops.nodal_hs_norms(r);
    for (size_t j = 0; j < s2.node_count(); j += 7)
      CHECK(norms(static_cast<Eigen::Index>(j)) == doctest::Approx(dk_hs_norm(u, order, s2.grid().node(j))).epsilon(1e-10));
  }
  // isometry: ||V_r u||_{s+r} = ||u||_s
  CHECK(bessel_norm(bessel_spectral(u, 2.0), 3.0, 3.0, s2) == doctest::Approx(bessel_norm(u, 1.0, 3.0, s2)).epsilon(1e-12));
}

TEST_CASE("HS norm estimate") {
  DerivativeTensorSample a{1, 2, {0, 0}, {1.0, 0.0}};
  auto r1 = hs_bound_check(a, 50, 10);
  CHECK(r1.hs_norm == doctest::Approx(1.0));
  CHECK(r1.sup_estimate == doctest::Approx(1.0));
  CHECK(r1.bound == doctest::Approx(2.0));
  CHECK(r1.holds);
  DerivativeTensorSample id{2, 2, {0, 0}, {1, 0, 0, 1}};
  auto r2 = hs_bound_check(id);
  CHECK(r2.hs_norm == doctest::Approx(std::sqrt(2.0)));
  CHECK(r2.sup_estimate == doctest::Approx(1.0));
  CHECK(r2.bound == doctest::Approx(8.0));
  DerivativeTensorSample e11{2, 2, {0, 0}, {1, 0, 0, 0}};
  CHECK(hs_bound_check(e11).sup_estimate == doctest::Approx(1.0));
  // supremum is the spectral radius for symmetric matrices
  DerivativeTensorSample m{2, 3, {0, 0, 0}, {2, 1, 0, 1, -1, 0.5, 0, 0.5, 0.3}};
  Eigen::Matrix3d M;
  M << 2, 1, 0, 1, -1, 0.5, 0, 0.5, 0.3;
  const double rho = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(M).eigenvalues().cwiseAbs().maxCoeff();
  CHECK(hs_bound_check(m).sup_estimate == doctest::Approx(rho).epsilon(1e-6));
  DerivativeTensorSample bad{2, 2, {0, 0}, {1, 2, 0, 1}};
  CHECK_THROWS_AS(hs_bound_check(bad), ValidationError);
}
