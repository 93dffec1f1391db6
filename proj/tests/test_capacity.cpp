#include <doctest.h>

#include <cmath>
#include <random>

#include "gausscap/barrier.hpp"
#include "gausscap/capacity.hpp"
#include "gausscap/error.hpp"
#include "gausscap/qp_active_set.hpp"

using namespace gausscap;

namespace {

// Brute force: try every subset of constraints as the active set.
double brute_force_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& a, const Eigen::MatrixXd& C,
                      const Eigen::VectorXd& b) {
  const auto n = G.rows();
  const auto m = C.cols();
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < m; ++i)
      if (mask & (1 << i)) act.push_back(i);
    const auto q = static_cast<Eigen::Index>(act.size());
    if (q > n) continue;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + q, n + q);
    Eigen::VectorXd rhs(n + q);
    K.topLeftCorner(n, n) = G;
    rhs.head(n) = -a;
    for (Eigen::Index j = 0; j < q; ++j) {
      K.block(0, n + j, n, 1) = -C.col(act[static_cast<size_t>(j)]);
      K.block(n + j, 0, 1, n) = C.col(act[static_cast<size_t>(j)]).transpose();
      rhs(n + j) = b(act[static_cast<size_t>(j)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + q) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    if ((sol.tail(q).array() < -1e-10).any()) continue;
    if (((C.transpose() * x - b).array() < -1e-10).any()) continue;
    best = std::min(best, 0.5 * x.dot(G * x) + a.dot(x));
  }
  return best;
}

}  // namespace

TEST_CASE("active-set QP against active-set enumeration") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const int m = 3 + trial % 6;
    Eigen::MatrixXd L(n, n);
    for (auto& v : L.reshaped()) v = nd(rng);
    Eigen::MatrixXd G = L * L.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd a(n), b(m);
    Eigen::MatrixXd C(n, m);
    for (auto& v : a) v = nd(rng);
    for (auto& v : C.reshaped()) v = nd(rng);
    // feasible by construction at x0
    Eigen::VectorXd x0(n);
    for (auto& v : x0) v = nd(rng);
    for (int i = 0; i < m; ++i) b(i) = C.col(i).dot(x0) - std::abs(nd(rng));
    const auto res = solve_qp_goldfarb_idnani(G, a, C, b);
    REQUIRE(res.converged);
    CHECK(res.max_violation < 1e-10);
    CHECK(res.objective == doctest::Approx(brute_force_qp(G, a, C, b)).epsilon(1e-9));
    CHECK((res.multipliers.array() >= -1e-12).all());
  }
}

TEST_CASE("QP reports infeasibility") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd C(1, 2);
  C << 1, -1;
  Eigen::VectorXd b(2);
  b << 1, 0;  // x >= 1 and x <= 0
  CHECK_FALSE(solve_qp_goldfarb_idnani(G, Eigen::VectorXd::Zero(1), C, b).converged);
}

TEST_CASE("region membership and JSON") {
  auto b = RegionSpec::ball({0.0, 0.0}, 1.0);
  CHECK(b.contains(std::vector<double>{0.6, 0.6}));
  CHECK_FALSE(b.contains(std::vector<double>{0.8, 0.8}));
  CHECK(b.fattened(std::vector<double>{0.8, 0.8}, 0.2));
  auto s = RegionSpec::slab({1.0, 0.0}, 1.0, 0.0);
  CHECK(s.contains(std::vector<double>{1.0, 7.0}));
  auto c = RegionSpec::complement_of(b);
  CHECK(c.contains(std::vector<double>{1.0, 0.5}));
  CHECK_FALSE(c.contains(std::vector<double>{0.2, 0.1}));
  CHECK(c.fattened(std::vector<double>{0.9, 0.0}, 0.2));
  CHECK(RegionSpec::empty().is_empty());
  CHECK(RegionSpec::full().is_full());
  CHECK(RegionSpec::full().contains(std::vector<double>{3.0}));
  CHECK_THROWS_AS(RegionSpec::slab({1.0, 1.0}, 0.0, 1.0).validate(2), ValidationError);
  CHECK_THROWS_AS(RegionSpec::ball({0.0}, -1.0).validate(1), ValidationError);

  auto u = RegionSpec::unite({b, RegionSpec::slab({0.0, 1.0}, -1.0, 0.5)});
  u.margin = 0.25;
  auto j = region_to_json(u);
  auto back = region_from_json(nlohmann::json::parse(j.dump()));
  CHECK(region_to_json(back).dump() == j.dump());
  CHECK(region_from_json("empty").is_empty());
  CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(R"({"ball":{"center":[0],"radius":1,"x":2}})")),
                  ValidationError);
  CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(R"({"blob":{}})")), ValidationError);
}

TEST_CASE("sections of regions") {
  Eigen::MatrixXd EF = Eigen::MatrixXd::Zero(2, 1), EC = Eigen::MatrixXd::Zero(2, 1);
  EF(0, 0) = 1.0;
  EC(1, 0) = 1.0;
  auto b = RegionSpec::ball({0.5, 0.0}, 1.0);
  auto sec = b.section(EF, EC, std::vector<double>{0.6});
  REQUIRE(sec.kind == RegionSpec::Kind::ball);
  CHECK(sec.center[0] == doctest::Approx(0.5));
  CHECK(sec.radius == doctest::Approx(0.8));
  CHECK(b.section(EF, EC, std::vector<double>{1.5}).is_empty());
  auto plane = RegionSpec::slab({1.0, 0.0}, 1.0, 0.0);
  auto ps = plane.section(EF, EC, std::vector<double>{3.0});
  CHECK(ps.offset == doctest::Approx(1.0));
  CHECK(ps.halfwidth == 0.0);
  auto other = plane.section(EC, EF, std::vector<double>{1.0});
  CHECK(other.is_full());
  CHECK(plane.section(EC, EF, std::vector<double>{0.5}).is_empty());
}

TEST_CASE("capacity of the empty set and the whole space") {
  SpectralGrid sg({1, 6, 12});
  for (int r : {1, 2}) {
    const SobolevParams prm{r, 2.0};
    CHECK(cap_potential(RegionSpec::empty(), prm, sg).value == 0.0);
    CHECK(cap_variational(RegionSpec::empty(), prm, sg).value == 0.0);
    auto cp = cap_potential(RegionSpec::full(), prm, sg);
    CHECK(cp.converged);
    CHECK(cp.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cp.gap <= 1e-8);
    auto cv = cap_variational(RegionSpec::full(), prm, sg);
    CHECK(cv.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (double p : {1.5, 3.0}) {
    auto cp = cap_potential(RegionSpec::full(), {2, p}, sg);
    CHECK(cp.converged);
    CHECK(std::abs(cp.value - 1.0) < 1e-6);
    CHECK(std::abs(cap_variational(RegionSpec::full(), {2, p}, sg).value - 1.0) < 1e-9);
  }
}

TEST_CASE("p = 2 potential capacity: QP agrees with the barrier") {
  SpectralGrid sg({2, 4, 8});
  auto U = RegionSpec::ball({0.3, -0.2}, 1.0);
  U.margin = 0.0;
  const SobolevParams prm{2, 2.0};
  auto qp = cap_potential(U, prm, sg);
  REQUIRE(qp.converged);
  CHECK(qp.residual < 1e-10);
  CHECK(qp.optimizer.minCoeff() >= -1e-12);

  const auto mask = node_mask(U, sg.grid(), 0.0);
  std::vector<Eigen::Index> idx;
  for (size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) idx.push_back(static_cast<Eigen::Index>(j));
  Eigen::MatrixXd B(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(sg.basis_size()));
  for (size_t i = 0; i < idx.size(); ++i) B.row(static_cast<Eigen::Index>(i)) = sg.basis_at_nodes().row(idx[i]);
  B = B * sg.orders().unaryExpr([](double a) { return 1.0 / (1.0 + a); }).asDiagonal();
  const Eigen::MatrixXd C = sg.grid().weights.asDiagonal() * sg.basis_at_nodes();
  auto br = solve_nodal_power_barrier(sg.grid().weights, 2.0, B, C);
  CHECK(br.converged);
  CHECK(br.objective == doctest::Approx(qp.value).epsilon(1e-7));
}

TEST_CASE("variational capacity: reweighted solver agrees with Newton") {
  SpectralGrid sg({1, 8, 16});
  auto U = RegionSpec::ball({0.4}, 0.8);
  auto a = cap_variational(U, {2, 2.0}, sg);
  auto b = cap_variational(U, {2, 2.0 + 1e-7}, sg);
  CHECK(b.converged);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-5));
  CHECK(a.residual < 1e-9);
}

TEST_CASE("monotonicity and subadditivity") {
  SpectralGrid sg({1, 8, 16});
  for (double p : {1.5, 2.0, 3.0}) {
    const SobolevParams prm{1, p};
    double prev_p = 0.0, prev_v = 0.0;
    for (double rho : {0.25, 0.5, 1.0, 2.0}) {
      auto U = RegionSpec::ball({0.0}, rho);
      const double vp = cap_potential(U, prm, sg).value;
      const double vv = cap_variational(U, prm, sg).value;
      CHECK(vp >= prev_p - 1e-7);
      CHECK(vv >= prev_v - 1e-7);
      prev_p = vp;
      prev_v = vv;
    }
    auto U1 = RegionSpec::ball({-1.0}, 0.4);
    auto U2 = RegionSpec::ball({1.2}, 0.5);
    const double c1 = cap_potential(U1, prm, sg).value;
    const double c2 = cap_potential(U2, prm, sg).value;
    const double c12 = cap_potential(RegionSpec::unite({U1, U2}), prm, sg).value;
    CHECK(c12 <= c1 + c2 + 2e-7);
  }
}

TEST_CASE("lemma description and equivalence witness") {
  SpectralGrid sg({1, 8, 16});
  auto U = RegionSpec::ball({0.0}, 1.0);
  auto rep = lemma_description_check(U, {2, 2.0}, sg);
  CHECK(rep.relative_gap >= -1e-8);
  CHECK(rep.relative_gap < 0.02);
  auto full = lemma_description_check(RegionSpec::full(), {2, 2.0}, sg);
  CHECK(std::abs(full.relative_gap) < 1e-6);
  auto e0 = lemma_description_check(RegionSpec::empty(), {2, 2.0}, sg);
  CHECK(e0.relative_gap == 0.0);

  const auto T = SmoothTruncation::standard();
  for (double p : {1.5, 2.0, 3.0}) {
    auto eq = equivalence_ratio(U, {2, p}, sg, T);
    CHECK(eq.ratio > 0.0);
    CHECK(eq.witness_cost >= eq.ccap.value * (1 - 1e-7));
    CHECK_FALSE(eq.violation_candidate);
  }
  auto ef = equivalence_ratio(RegionSpec::full(), {1, 2.0}, sg, T);
  CHECK(ef.ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("generation condition and verdicts") {
  CHECK(generation_condition(2, 2.0));
  CHECK_FALSE(generation_condition(2, 10.0));
  CHECK(classify_trend({0.5, 0.1, 1e-4}, 1e-3) == Trend::zero);
  CHECK(classify_trend({0.5, 0.45, 0.44}, 1e-3) == Trend::bounded_away);
  CHECK(classify_trend({0.5, 0.6, 0.44}, 1e-3) == Trend::inconclusive);
  CHECK_THROWS_AS(classify_trend({0.5, 0.4}, 1e-3), ValidationError);

  SpectralGrid sg({1, 8, 17});
  auto pt = RegionSpec::ball({0.0}, 0.0);
  auto rep = uniqueness_verdict(pt, 1, 2.0, sg, 1e-3, {0.2, 0.1, 0.05});
  CHECK(rep.trend == Trend::bounded_away);
  CHECK(rep.verdict == "not L^2-unique");
  auto none = uniqueness_verdict(RegionSpec::empty(), 2, 10.0, sg, 1e-3, {0.2, 0.1, 0.05});
  CHECK(none.verdict.rfind("generation condition fails", 0) == 0);
}

TEST_CASE("weak-type inequality") {
  SpectralGrid sg({1, 6, 12});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(0.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(sg.node_count()));
    for (auto& v : f) v = ud(rng) * ud(rng);
    for (double R : {1.0, 2.0, 4.0}) CHECK(weak_type_check(f, R, {2, 2.0}, sg).holds);
  }
}
