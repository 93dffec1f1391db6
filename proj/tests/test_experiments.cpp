#include <doctest.h>

#include <cmath>

#include "gausscap/error.hpp"
#include "gausscap/experiments.hpp"
#include "gausscap/json_io.hpp"

using namespace gausscap;

TEST_CASE("median") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median_of({}), ValidationError);
}

TEST_CASE("small potential and semigroup sweeps") {
  PotentialAgreementConfig p;
  p.K = 6;
  p.functions = 1;
  p.points = 5;
  const auto a = potential_agreement(p, 3);
  CHECK(a.pass);
  CHECK(a.evaluations == 2 * 3 * 5);

  SemigroupSuiteConfig s;
  s.functions = 5;
  const auto b = semigroup_suite(s, 3);
  CHECK(b.pass);
  CHECK(b.functions == 10);
  CHECK(b.min_positive_value > -1e-12);
}

TEST_CASE("equivalence family and a reduced sweep") {
  const auto fam = equivalence_family();
  REQUIRE(fam.size() == 12);
  for (const auto& U : fam) CHECK(U.margin.value() == 0.25);
  EquivalenceSweepConfig e;
  e.r_values = {2};
  e.p_values = {2.0};
  e.regions = {fam[0], fam[3], fam[6]};
  const auto rep = equivalence_sweep(e);
  REQUIRE(rep.rows.size() == 3);
  REQUIRE(rep.groups.size() == 1);
  CHECK(rep.all_converged);
  for (const auto& r : rep.rows) {
    CHECK(r.ratio >= 1.0 - 1e-6);
    CHECK(r.change < 0.1);
  }
  CHECK(rep.to_csv().rfind("region,n,r,p,", 0) == 0);
}

TEST_CASE("truncation sweep shares draws across dimensions") {
  TruncationSweepConfig t;
  t.dims = {1, 2};
  t.samples = 6;
  const auto a = truncation_sweep(t, 11);
  const auto b = truncation_sweep(t, 11);
  CHECK(a.ratios == b.ratios);
  REQUIRE(a.max_ratio.size() == 2);
  for (double v : a.ratios[0]) CHECK(std::isfinite(v));
  t.dims = {5};
  CHECK_THROWS_AS(truncation_sweep(t, 1), ValidationError);
}

TEST_CASE("multest sweep is scale invariant") {
  MultestSweepConfig m;
  m.samples = 20;
  const auto rep = multest_sweep(m, 2);
  CHECK(rep.violations == 0);
  CHECK(rep.max_scale_error < 1e-10);
}

TEST_CASE("meyer envelope") {
  MeyerProbeConfig m;
  m.samples = 10;
  const auto rep = meyer_probe(m, 4);
  REQUIRE(rep.groups.size() == 4);
  for (const auto& g : rep.groups) {
    CHECK(g.lo > 0.0);
    CHECK(g.width >= 1.0);
  }
  CHECK(rep.pass);
}

TEST_CASE("JSON writer keeps 17 digits") {
  ojson j{{"a", 0.1}, {"b", 1.0}, {"c", std::nan("")}, {"d", {1, 2}}, {"e", "x\"y"}};
  const auto s = dump_json(j, -1);
  CHECK(s == "{\"a\":0.10000000000000001,\"b\":1.0,\"c\":null,\"d\":[1,2],\"e\":\"x\\\"y\"}\n");
  const auto back = ojson::parse(s);
  CHECK(back["a"].get<double>() == 0.1);
  CHECK(back["b"].is_number_float());
}
