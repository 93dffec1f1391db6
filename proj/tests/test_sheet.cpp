#include <doctest.h>

#include <cmath>

#include "gausscap/error.hpp"
#include "gausscap/sheet.hpp"

using namespace gausscap;

TEST_CASE("sheet grid validation") {
  CHECK_THROWS_AS(SheetGrid::uniform(0, 1, 0.0, 1.0, 0.5), ValidationError);
  SheetGrid g;
  g.r = 1;
  g.axes = {{0.0, 0.5, 0.5}};
  CHECK_THROWS_AS(g.validate(), ValidationError);
  g.axes = {{-1.0, 0.0}};
  CHECK_THROWS_AS(g.validate(), ValidationError);
  const auto u = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.25);
  CHECK(u.size() == 25);
  CHECK(u.spacing() == doctest::Approx(0.25));
  CHECK(u.index(7) == std::vector<size_t>{1, 2});
}

TEST_CASE("one time point is a standard Gaussian vector") {
  SheetGrid g;
  g.r = 1;
  g.n = 3;
  g.axes = {{0.7}};
  const long R = 100000;
  std::vector<double> sum2(3, 0.0);
  for (long i = 0; i < R; ++i) {
    const auto s = sample_sheet(g, static_cast<std::uint64_t>(i) + 1);
    for (int k = 0; k < 3; ++k) sum2[static_cast<size_t>(k)] += s.values(0, k) * s.values(0, k);
  }
  for (double v : sum2) CHECK(std::abs(v / R - 1.0) < 0.02);
}

TEST_CASE("two-parameter correlation is the product of exponentials") {
  SheetGrid g;
  g.r = 2;
  g.n = 1;
  g.axes = {{0.0, std::log(2.0)}, {0.0, std::log(2.0)}};
  const long R = 100000;
  double sxy = 0.0, sxx = 0.0, syy = 0.0, same = 0.0;
  for (long i = 0; i < R; ++i) {
    const auto s = sample_sheet(g, 1000 + static_cast<std::uint64_t>(i));
    const double x = s.values(0, 0), y = s.values(3, 0);
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
    same += x * x;
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy) - 0.25) < 0.02);
  CHECK(same / sxx == doctest::Approx(1.0));
}

TEST_CASE("axis order does not change the field") {
  const auto g = SheetGrid::uniform(3, 2, 0.0, 1.0, 0.25);
  const auto a = sample_sheet(g, 5, {0, 1, 2});
  const auto b = sample_sheet(g, 5, {2, 0, 1});
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(sample_sheet(g, 5, {0, 0, 1}), ValidationError);
  const auto c = sample_sheet(g, 5);
  CHECK(c.values == a.values);
}

TEST_CASE("law check on a small grid") {
  const auto g = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.5);
  const auto rep = sheet_law_check(g, 20000, 3);
  CHECK(rep.points == 9);
  CHECK(rep.pairs == 36);
  CHECK(rep.ks_max < 2.0 * rep.ks_critical);
  CHECK(rep.cov_max_z < 5.0);
}

TEST_CASE("statistics helpers") {
  const auto [lo, hi] = wilson_interval(5, 10);
  CHECK(lo == doctest::Approx(0.236593).epsilon(1e-5));
  CHECK(hi == doctest::Approx(0.763407).epsilon(1e-5));
  CHECK(wilson_interval(0, 20).first == 0.0);
  // asymptotic 1% point of the Kolmogorov distribution is 1.62762
  CHECK(ks_critical(100000, 0.01) * (std::sqrt(1e5) + 0.12 + 0.11 / std::sqrt(1e5)) ==
        doctest::Approx(1.62762).epsilon(1e-5));
  CHECK(ks_statistic_normal({0.0}) == doctest::Approx(0.5));
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(std::isnan(spearman({1, 2}, {3, 3})));
}

TEST_CASE("hitting probabilities") {
  const auto g = SheetGrid::uniform(2, 1, 0.0, 4.0, 0.25);
  CHECK(hitting_probability(RegionSpec::full(), g, 50, 1).estimate == 1.0);
  CHECK(hitting_probability(RegionSpec::empty(), g, 50, 1).estimate == 0.0);
  // 289 looks at a set of mass 0.68: a miss is too rare to
  // show up in 10^4 replicas, so the baseline is 1 with a tight interval
  const auto ball = hitting_probability(RegionSpec::ball({0.0}, 1.0), g, 10000, 17);
  CHECK(ball.estimate > 0.99);
  CHECK(ball.ci_hi - ball.ci_lo < 0.02);
  const auto again = hitting_probability(RegionSpec::ball({0.0}, 1.0), g, 10000, 17);
  CHECK(again.hits == ball.hits);

  // nested sets on one seed stream
  const auto small = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.125);
  long prev = -1;
  for (double rho : {0.05, 0.1, 0.3, 0.6}) {
    const auto h = hitting_probability(RegionSpec::ball({0.0}, rho), small, 2000, 4);
    CHECK(h.hits >= prev);
    prev = h.hits;
  }
  // a point is thickened by the grid spacing
  const auto pt = hitting_probability(RegionSpec::ball({0.0}, 0.0), small, 2000, 4);
  CHECK(pt.margin == doctest::Approx(0.125));
  CHECK(pt.hits > 0);
  auto bare = RegionSpec::ball({0.0}, 0.0);
  bare.margin = 0.0;
  CHECK(hitting_probability(bare, small, 2000, 4).hits == 0);
}

TEST_CASE("coupled refinement never lowers the estimate") {
  const auto g = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.125);
  const auto tr = hitting_trend(RegionSpec::ball({0.5}, 0.2), g, 3, 3000, 8);
  REQUIRE(tr.size() == 3);
  CHECK(tr[0].spacing == doctest::Approx(0.5));
  CHECK(tr[2].spacing == doctest::Approx(0.125));
  CHECK(tr[0].hits <= tr[1].hits);
  CHECK(tr[1].hits <= tr[2].hits);
  CHECK(tr[0].hits < tr[2].hits);
  // the finest level agrees with a direct run on the same seed
  CHECK(hitting_probability(RegionSpec::ball({0.5}, 0.2), g, 3000, 8).hits == tr[2].hits);
  CHECK_THROWS_AS(hitting_trend(RegionSpec::full(), SheetGrid::uniform(1, 1, 0.0, 1.0, 0.2), 2, 10, 1),
                  ValidationError);
}

TEST_CASE("Kakutani table on nested balls") {
  const auto g = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.125);
  std::vector<RegionSpec> fam;
  for (double rho : {1.0, 0.5, 0.25}) {
    auto b = RegionSpec::ball({0.0}, rho);
    b.margin = 0.0;
    fam.push_back(b);
  }
  fam.push_back(RegionSpec::empty());
  fam.push_back(RegionSpec::full());
  const std::vector<GaussModelSpace> spaces{{1, 16, 41}, {1, 20, 41}, {1, 24, 41}};
  const auto rep = kakutani_experiment(fam, {"b1", "b05", "b025", "empty", "full"}, g, 2, 2000, 9, spaces);
  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.rows[0].hitting.back().estimate > rep.rows[1].hitting.back().estimate);
  CHECK(rep.rows[1].hitting.back().estimate > rep.rows[2].hitting.back().estimate);
  CHECK(rep.rows[0].capacity > rep.rows[1].capacity);
  CHECK(rep.rows[1].capacity > rep.rows[2].capacity);
  CHECK(rep.rows[3].capacity == 0.0);
  CHECK(rep.rows[3].hitting.back().hits == 0);
  CHECK(rep.rows[4].capacity == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.rows[4].hitting.back().estimate == 1.0);
  CHECK(rep.rank_correlation == doctest::Approx(1.0));
  for (const auto& row : rep.rows) CHECK_FALSE(row.contradiction);
}
