#include <doctest.h>

#include <cmath>

#include "gausscap/error.hpp"
#include "gausscap/truncation.hpp"

using namespace gausscap;

TEST_CASE("smooth step values") {
  CHECK(smooth_step(0.25) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.4 + 0.7 * i / 2000.0;
    const double v = smooth_step(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v >= prev);
    prev = v;
  }
  // s(u) + s(1-u) = 1
  for (double t : {0.55, 0.6, 0.83})
    CHECK(smooth_step(t) + smooth_step(1.5 - t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("jet derivatives against finite differences") {
  for (double t : {0.58, 0.7, 0.75, 0.91}) {
    const auto jet = smooth_step_jet(t, 4);
    const double h = 1e-4;
    const double d1 = (smooth_step(t + h) - smooth_step(t - h)) / (2 * h);
    const double d2 = (smooth_step(t + h) - 2 * smooth_step(t) + smooth_step(t - h)) / (h * h);
    CHECK(jet[1] == doctest::Approx(d1).epsilon(1e-6));
    CHECK(jet[2] == doctest::Approx(d2).epsilon(1e-4));
    // third and fourth from differences of the jet itself
    const auto jp = smooth_step_jet(t + h, 4);
    const auto jm = smooth_step_jet(t - h, 4);
    CHECK(jet[3] == doctest::Approx((jp[2] - jm[2]) / (2 * h)).epsilon(1e-5));
    CHECK(jet[4] == doctest::Approx((jp[3] - jm[3]) / (2 * h)).epsilon(1e-5));
  }
  for (double v : smooth_step_jet(0.5 + 1e-5, 4)) CHECK(v == 0.0);
}

TEST_CASE("derivative bounds") {
  const auto L = derivative_bounds(4);
  CHECK(L[0] <= 2.0);
  CHECK(L[0] >= 1.0);
  for (double v : L) CHECK(std::isfinite(v));
  CHECK(L[1] > 1.0);
  for (double v : derivative_bounds(4, 501, 0.1, 0.4999)) CHECK(v == 0.0);
  CHECK_THROWS_AS(derivative_bounds(0), ValidationError);
  auto T = SmoothTruncation::standard();
  CHECK(T.L == *std::max_element(T.bounds.begin(), T.bounds.end()));
}

TEST_CASE("truncated potential on constants") {
  SpectralGrid sg({2, 4, 6});
  const auto N = static_cast<Eigen::Index>(sg.node_count());
  auto r3 = truncate_potential(Eigen::VectorXd::Constant(N, 3.0), {2, 2.0}, sg);
  CHECK(r3.ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r3.aliasing < 1e-12);
  auto r04 = truncate_potential(Eigen::VectorXd::Constant(N, 0.4), {2, 2.0}, sg);
  CHECK(r04.ratio == 0.0);
  Eigen::VectorXd neg = Eigen::VectorXd::Constant(N, 1.0);
  neg(3) = -0.1;
  CHECK_THROWS_AS(truncate_potential(neg, {2, 2.0}, sg), ValidationError);
  CHECK_THROWS_AS(truncate_potential(Eigen::VectorXd::Zero(N), {2, 2.0}, sg), ValidationError);
}

TEST_CASE("multiplicative estimate") {
  SpectralGrid sg({1, 6, 12});
  auto tg = TimeGrid::log_spaced();
  std::vector<double> x0{0.0};
  auto c = expand([](std::span<const double>) { return 2.0; }, sg);
  CHECK(multiplicative_estimate_check(c, 2, 1, 2.0, x0, sg, tg).ratio == doctest::Approx(0.0));
  auto f = expand([](std::span<const double> y) { return 1.0 + y[0] * y[0]; }, sg);
  std::vector<double> x1{0.7};
  const auto base = multiplicative_estimate_check(f, 2, 1, 2.0, x1, sg, tg);
  CHECK(std::isfinite(base.ratio));
  CHECK(base.ratio > 0.0);
  auto g = f.with_coeffs(17.5 * f.coeffs());
  const auto scaled = multiplicative_estimate_check(g, 2, 1, 2.0, x1, sg, tg);
  CHECK(std::abs(scaled.ratio - base.ratio) <= 1e-10 * base.ratio);
  // Jensen: V_r f(x) <= (sup_t P_t f^q)^{1/q}
  CHECK(base.potential <= std::pow(base.maximal, 0.5) + 1e-12);
  CHECK_THROWS_AS(multiplicative_estimate_check(f, 2, 2, 2.0, x1, sg, tg), ValidationError);
}
