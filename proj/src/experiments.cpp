#include "gausscap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "gausscap/error.hpp"
#include "gausscap/parallel.hpp"
#include "gausscap/semigroup.hpp"

namespace gausscap {

namespace {

Eigen::VectorXd normal_vector(std::mt19937_64& rng, Eigen::Index m) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(m);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Coefficients on `sg` with N(0,1) entries for |alpha| <= degree, unit L2 norm.
HermiteExpansion random_polynomial(const SpectralGrid& sg, int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sg.basis_size()));
  for (Eigen::Index a = 0; a < c.size(); ++a)
    if (sg.orders()(a) <= degree) c(a) = nd(rng);
  return sg.from_coeffs(c / c.norm());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}


}  // namespace

double median_of(std::vector<double> v) {
  require(!v.empty(), "median of an empty list");
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

// ---------------------------------------------------------------------------

PotentialAgreementReport potential_agreement(const PotentialAgreementConfig& cfg, std::uint64_t seed) {
  require(cfg.K >= 0 && cfg.points >= 1 && cfg.functions >= 1, "potential agreement: bad sizes");
  struct Task {
    int n;
    int fn;
  };
  std::vector<Task> tasks;
  for (int n : cfg.dims)
    for (int i = 0; i < cfg.functions; ++i) tasks.push_back({n, i});
  std::vector<SpectralGrid> grids;
  for (int n : cfg.dims) grids.emplace_back(GaussModelSpace{n, cfg.K, cfg.K + 1});
  std::vector<double> err(tasks.size(), 0.0);
  parallel_for(tasks.size(), [&](size_t t) {
    const auto& task = tasks[t];
    const size_t gi = static_cast<size_t>(std::find(cfg.dims.begin(), cfg.dims.end(), task.n) - cfg.dims.begin());
    const SpectralGrid& sg = grids[gi];
    std::mt19937_64 rng(split_seed(seed, t));
    const auto u = random_polynomial(sg, cfg.K, rng);
    ScalarField f = [&](std::span<const double> x) { return eval(u, x); };
    double worst = 0.0;
    for (double r : cfg.r_values) {
      const auto V = bessel_spectral(u, r);
      for (int k = 0; k < cfg.points; ++k) {
        const Eigen::VectorXd x = normal_vector(rng, task.n);
        const std::span<const double> xs(x.data(), static_cast<size_t>(x.size()));
        worst = std::max(worst, std::abs(eval(V, xs) - bessel_quadrature(f, r, xs, sg.grid(), cfg.order)));
      }
    }
    err[t] = worst;
  });
  PotentialAgreementReport rep;
  rep.max_error = *std::max_element(err.begin(), err.end());
  rep.evaluations = tasks.size() * cfg.r_values.size() * static_cast<size_t>(cfg.points);
  rep.pass = rep.max_error < cfg.tolerance;
  return rep;
}

ojson PotentialAgreementReport::to_json() const {
  return {{"max_error", max_error}, {"evaluations", evaluations}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

SemigroupSuiteReport semigroup_suite(const SemigroupSuiteConfig& cfg, std::uint64_t seed) {
  require(cfg.K >= 2 && cfg.functions >= 1, "semigroup suite: bad sizes");
  struct Out {
    double law = 0, mehler = 0, mass = 0, min_pos = 0;
    int pos_fail = 0;
  };
  std::vector<SpectralGrid> grids;
  for (int n : cfg.dims) grids.emplace_back(GaussModelSpace{n, cfg.K, cfg.K + 1});
  const size_t per = static_cast<size_t>(cfg.functions);
  std::vector<Out> out(grids.size() * per);
  parallel_for(out.size(), [&](size_t t) {
    const SpectralGrid& sg = grids[t / per];
    const int n = sg.space().n;
    std::mt19937_64 rng(split_seed(seed, t));
    std::uniform_real_distribution<double> ut(0.01, 2.0);
    Out o;
    const auto u = random_polynomial(sg, cfg.K, rng);
    ScalarField f = [&](std::span<const double> x) { return eval(u, x); };
    const double s = ut(rng), t1 = ut(rng);
    o.law = (spectral_apply(spectral_apply(u, s), t1).coeffs() - spectral_apply(u, s + t1).coeffs())
                .cwiseAbs()
                .maxCoeff();
    const Eigen::VectorXd x = normal_vector(rng, n);
    const std::span<const double> xs(x.data(), static_cast<size_t>(n));
    o.mehler = std::abs(eval(spectral_apply(u, t1), xs) - mehler_apply(f, t1, xs, sg.grid()));
    // mass: P_t 1 = 1 and int P_t f dmu = int f dmu
    ScalarField one = [](std::span<const double>) { return 1.0; };
    o.mass = std::abs(mehler_apply(one, t1, xs, sg.grid()) - 1.0);
    double integral = 0.0;
    for (size_t j = 0; j < sg.node_count(); ++j)
      integral += sg.grid().weights(static_cast<Eigen::Index>(j)) * mehler_apply(f, t1, sg.grid().node(j), sg.grid());
    o.mass = std::max(o.mass, std::abs(integral - u.coeffs()(0)));
    // positivity: f = g^2 with deg g <= K/2
    const auto g = random_polynomial(sg, cfg.K / 2, rng);
    Eigen::VectorXd gv = sg.nodal_values(g);
    const auto sq = sg.expand_nodal(gv.cwiseAbs2());
    ScalarField fsq = [&](std::span<const double> y) {
      const double v = eval(g, y);
      return v * v;
    };
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd y = normal_vector(rng, n);
      const std::span<const double> ys(y.data(), static_cast<size_t>(n));
      const double tk = ut(rng);
      const double pm = mehler_apply(fsq, tk, ys, sg.grid());
      const double ps = eval(spectral_apply(sq, tk), ys);
      const double lowest = std::min(pm, ps);
      o.min_pos = std::min(o.min_pos, lowest);
      if (lowest < -1e-12) ++o.pos_fail;
    }
    out[t] = o;
  });
  SemigroupSuiteReport rep;
  rep.functions = out.size();
  for (const auto& o : out) {
    rep.law_error = std::max(rep.law_error, o.law);
    rep.mehler_error = std::max(rep.mehler_error, o.mehler);
    rep.mass_error = std::max(rep.mass_error, o.mass);
    rep.min_positive_value = std::min(rep.min_positive_value, o.min_pos);
    rep.positivity_failures += o.pos_fail;
  }
  rep.pass = rep.law_error < 1e-14 && rep.mehler_error < cfg.mehler_tol && rep.mass_error < 1e-12 &&
             rep.positivity_failures == 0;
  return rep;
}

ojson SemigroupSuiteReport::to_json() const {
  return {{"functions", functions},          {"law_error", law_error},
          {"mehler_error", mehler_error},    {"mass_error", mass_error},
          {"min_positive_value", min_positive_value}, {"positivity_failures", positivity_failures},
          {"pass", pass}};
}

// ---------------------------------------------------------------------------

FullSpaceReport full_space_capacity(const FullSpaceConfig& cfg, const SolverOptions& opts) {
  FullSpaceReport rep;
  for (const auto& sp : cfg.spaces)
    for (int r : cfg.r_values)
      for (double p : cfg.p_values)
        for (auto def : {CapacityDefinition::potential, CapacityDefinition::variational}) {
          FullSpaceRow row;
          row.n = sp.n;
          row.r = r;
          row.p = p;
          row.definition = def;
          row.tolerance = p == 2.0 ? 1e-6 : 1e-3;
          rep.rows.push_back(row);
        }
  std::vector<SpectralGrid> grids;
  for (const auto& sp : cfg.spaces) grids.emplace_back(sp);
  const size_t per = rep.rows.size() / cfg.spaces.size();
  parallel_for(rep.rows.size(), [&](size_t i) {
    auto& row = rep.rows[i];
    const auto res = capacity(row.definition, RegionSpec::full(), {row.r, row.p}, grids[i / per], opts);
    row.value = res.value;
    row.converged = res.converged;
    row.pass = res.converged && std::abs(res.value - 1.0) < row.tolerance;
  });
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const FullSpaceRow& r) { return r.pass; });
  return rep;
}

ojson FullSpaceReport::to_json() const {
  ojson rows_j = ojson::array();
  for (const auto& r : rows)
    rows_j.push_back({{"n", r.n},
                      {"r", r.r},
                      {"p", r.p},
                      {"definition", to_string(r.definition)},
                      {"value", r.value},
                      {"tolerance", r.tolerance},
                      {"converged", r.converged},
                      {"pass", r.pass}});
  return {{"rows", rows_j}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

std::vector<RegionSpec> equivalence_family(double margin) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<RegionSpec> fam;
  for (double rho : {0.5, 1.0, 2.0}) fam.push_back(RegionSpec::ball({0.0}, rho));
  fam.push_back(RegionSpec::slab({1.0}, 1.0, 0.5));
  fam.push_back(RegionSpec::slab({1.0}, 0.5, 1.0));
  fam.push_back(RegionSpec::slab({1.0}, -1.5, 0.5));
  for (double rho : {0.5, 1.0, 2.0}) fam.push_back(RegionSpec::ball({0.0, 0.0}, rho));
  fam.push_back(RegionSpec::slab({1.0, 0.0}, 0.0, 0.25));
  fam.push_back(RegionSpec::slab({s, s}, 1.0, 0.5));
  fam.push_back(RegionSpec::slab({0.0, 1.0}, -1.0, 0.5));
  for (auto& U : fam) U.margin = margin;
  return fam;
}

namespace {

int region_dim(const RegionSpec& U) {
  switch (U.kind) {
    case RegionSpec::Kind::ball:
      return static_cast<int>(U.center.size());
    case RegionSpec::Kind::slab:
      return static_cast<int>(U.normal.size());
    default:
      for (const auto& p : U.parts)
        if (const int d = region_dim(p); d > 0) return d;
      return 0;
  }
}

}  // namespace

EquivalenceSweepReport equivalence_sweep(const EquivalenceSweepConfig& cfg, const SolverOptions& opts) {
  require(cfg.C > 1.0 && cfg.refine_Q > 0, "equivalence sweep: need C > 1 and a positive refinement step");
  const auto T = SmoothTruncation::standard();
  std::vector<std::vector<SpectralGrid>> grids(cfg.base.size());
  for (size_t i = 0; i < cfg.base.size(); ++i) {
    auto sp = cfg.base[i];
    require(sp.n == static_cast<int>(i) + 1, "equivalence sweep: base spaces must be listed for n = 1, 2, ...");
    grids[i].emplace_back(sp);
    sp.Q += cfg.refine_Q;
    grids[i].emplace_back(sp);
  }
  EquivalenceSweepReport rep;
  for (int r : cfg.r_values)
    for (double p : cfg.p_values)
      for (size_t g = 0; g < cfg.regions.size(); ++g) {
        EquivalenceRow row;
        row.region = g;
        row.n = region_dim(cfg.regions[g]);
        require(row.n >= 1 && static_cast<size_t>(row.n) <= grids.size(),
                "equivalence sweep: no base space for a region's dimension");
        row.r = r;
        row.p = p;
        rep.rows.push_back(row);
      }
  // two solves per row, flattened so they balance across workers
  std::vector<EquivalenceReport> solved(2 * rep.rows.size(), EquivalenceReport{});
  parallel_for(solved.size(), [&](size_t i) {
    const auto& row = rep.rows[i / 2];
    solved[i] = equivalence_ratio(cfg.regions[row.region], {row.r, row.p},
                                  grids[static_cast<size_t>(row.n - 1)][i % 2], T, opts);
  });
  for (size_t i = 0; i < rep.rows.size(); ++i) {
    auto& row = rep.rows[i];
    const auto& a = solved[2 * i];
    const auto& b = solved[2 * i + 1];
    row.cap = a.cap.value;
    row.ccap = a.ccap.value;
    row.ratio = a.ratio;
    row.ratio_refined = b.ratio;
    row.change = std::abs(b.ratio / a.ratio - 1.0);
    row.witness_cost = a.witness_cost;
    row.converged = a.cap.converged && a.ccap.converged && b.cap.converged && b.ccap.converged;
    rep.all_converged = rep.all_converged && row.converged;
  }
  for (int r : cfg.r_values)
    for (double p : cfg.p_values) {
      EquivalenceGroup g;
      g.r = r;
      g.p = p;
      g.lo = std::numeric_limits<double>::infinity();
      g.hi = 0.0;
      bool ok = true;
      for (const auto& row : rep.rows) {
        if (row.r != r || row.p != p) continue;
        for (double v : {row.ratio, row.ratio_refined}) {
          g.lo = std::min(g.lo, v);
          g.hi = std::max(g.hi, v);
        }
        g.max_change = std::max(g.max_change, row.change);
        ok = ok && row.converged && std::isfinite(row.change);
      }
      g.pass = ok && g.lo >= 1.0 / cfg.C && g.hi <= cfg.C && g.max_change < cfg.refine_tol;
      rep.groups.push_back(g);
    }
  rep.pass = std::all_of(rep.groups.begin(), rep.groups.end(), [](const EquivalenceGroup& g) { return g.pass; });
  return rep;
}

ojson EquivalenceSweepReport::to_json() const {
  ojson gj = ojson::array();
  for (const auto& g : groups)
    gj.push_back({{"r", g.r},
                  {"p", g.p},
                  {"ratio_lo", g.lo},
                  {"ratio_hi", g.hi},
                  {"max_refinement_change", g.max_change},
                  {"pass", g.pass}});
  ojson rj = ojson::array();
  for (const auto& r : rows)
    rj.push_back({{"region", r.region},
                  {"n", r.n},
                  {"r", r.r},
                  {"p", r.p},
                  {"cap", r.cap},
                  {"ccap", r.ccap},
                  {"ratio", r.ratio},
                  {"ratio_refined", r.ratio_refined},
                  {"witness_cost", r.witness_cost},
                  {"converged", r.converged}});
  return {{"groups", gj}, {"rows", rj}, {"all_converged", all_converged}, {"pass", pass}};
}

std::string EquivalenceSweepReport::to_csv() const {
  std::ostringstream os;
  os << "region,n,r,p,cap,ccap,ratio,ratio_refined,change,witness_cost,converged\n";
  for (const auto& r : rows)
    os << r.region << ',' << r.n << ',' << r.r << ',' << fmt(r.p) << ',' << fmt(r.cap) << ',' << fmt(r.ccap) << ','
       << fmt(r.ratio) << ',' << fmt(r.ratio_refined) << ',' << fmt(r.change) << ',' << fmt(r.witness_cost) << ','
       << (r.converged ? 1 : 0) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

TruncationSweepReport truncation_sweep(const TruncationSweepConfig& cfg, std::uint64_t seed) {
  require(cfg.samples >= 1 && !cfg.dims.empty(), "truncation sweep: bad sizes");
  require(2 * cfg.g_degree <= cfg.K, "truncation sweep: g^2 must fit in the model space");
  for (int n : cfg.dims) require(n >= 1 && n <= 4, "truncation sweep: dimensions must lie in 1..4");
  const SobolevParams params{cfg.r, cfg.p};
  params.validate();
  std::vector<SpectralGrid> grids;
  for (int n : cfg.dims) grids.emplace_back(GaussModelSpace{n, cfg.K, cfg.Q});

  // common random numbers: one draw per sample index, shared by all n
  struct Draw {
    std::vector<double> b;
    double a;
    Eigen::Vector4d z;
  };
  std::vector<Draw> draws(static_cast<size_t>(cfg.samples));
  for (size_t i = 0; i < draws.size(); ++i) {
    std::mt19937_64 rng(split_seed(seed, i));
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ul(std::log(cfg.amp_lo), std::log(cfg.amp_hi));
    auto& d = draws[i];
    d.b.resize(static_cast<size_t>(cfg.g_degree + 1));
    double nb = 0.0;
    for (auto& v : d.b) {
      v = nd(rng);
      nb += v * v;
    }
    for (auto& v : d.b) v /= std::sqrt(nb);
    d.a = std::exp(ul(rng));
    for (int k = 0; k < 4; ++k) d.z(k) = nd(rng);
  }

  TruncationSweepReport rep;
  rep.dims = cfg.dims;
  rep.ratios.assign(cfg.dims.size(), std::vector<double>(draws.size()));
  std::vector<std::vector<double>> alias(cfg.dims.size(), std::vector<double>(draws.size()));
  parallel_for(cfg.dims.size() * draws.size(), [&](size_t t) {
    const size_t di = t / draws.size();
    const size_t i = t % draws.size();
    const SpectralGrid& sg = grids[di];
    const int n = sg.space().n;
    const auto& d = draws[i];
    const Eigen::VectorXd theta = d.z.head(n) / d.z.head(n).norm();
    const auto& nodes = sg.grid().nodes;
    Eigen::VectorXd f(nodes.rows());
    for (Eigen::Index j = 0; j < nodes.rows(); ++j) {
      const double s = nodes.row(j).dot(theta.transpose());
      double g = 0.0;
      for (size_t k = 0; k < d.b.size(); ++k) g += d.b[k] * hermite_eval(static_cast<int>(k), s);
      f(j) = d.a * g * g;
    }
    const auto res = truncate_potential(f, params, sg);
    rep.ratios[di][i] = res.ratio;
    alias[di][i] = res.aliasing;
  });

  std::vector<double> pooled;
  for (size_t di = 0; di < cfg.dims.size(); ++di) {
    double mx = 0.0, ma = 0.0;
    for (size_t i = 0; i < draws.size(); ++i) {
      const double v = rep.ratios[di][i];
      mx = std::isfinite(v) ? std::max(mx, v) : std::numeric_limits<double>::infinity();
      ma = std::max(ma, alias[di][i]);
      pooled.push_back(v);
    }
    rep.max_ratio.push_back(mx);
    rep.max_aliasing.push_back(ma);
  }
  rep.pooled_median = median_of(pooled);
  for (double v : pooled)
    if (!std::isfinite(v) || v > cfg.median_factor * rep.pooled_median) ++rep.outliers;
  const double lo = *std::min_element(rep.max_ratio.begin(), rep.max_ratio.end());
  rep.overall_max = *std::max_element(rep.max_ratio.begin(), rep.max_ratio.end());
  rep.spread = rep.overall_max / lo - 1.0;
  rep.pass = std::isfinite(rep.spread) && rep.spread < cfg.spread_tol && rep.outliers == 0;
  return rep;
}

ojson TruncationSweepReport::to_json() const {
  ojson per = ojson::array();
  for (size_t i = 0; i < dims.size(); ++i)
    per.push_back({{"n", dims[i]}, {"max_ratio", max_ratio[i]}, {"max_aliasing", max_aliasing[i]}});
  return {{"per_dimension", per},   {"pooled_median", pooled_median}, {"overall_max", overall_max},
          {"spread", spread},       {"outliers", outliers},           {"pass", pass}};
}

std::string TruncationSweepReport::to_csv() const {
  std::ostringstream os;
  os << "n,sample,ratio\n";
  for (size_t d = 0; d < dims.size(); ++d)
    for (size_t i = 0; i < ratios[d].size(); ++i) os << dims[d] << ',' << i << ',' << fmt(ratios[d][i]) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

MultestSweepReport multest_sweep(const MultestSweepConfig& cfg, std::uint64_t seed) {
  require(cfg.samples >= 1, "multest sweep: samples must be positive");
  require(2 * cfg.g_degree <= cfg.space.K, "multest sweep: g^2 must fit in the model space");
  require(cfg.floor > 0.0, "multest sweep: floor must be positive");
  const SpectralGrid sg(cfg.space);
  const auto tg = TimeGrid::log_spaced();
  const int n = cfg.space.n;
  MultestSweepReport rep;
  rep.ratios.assign(static_cast<size_t>(cfg.samples), 0.0);
  std::vector<double> scale_err(rep.ratios.size(), 0.0);
  parallel_for(rep.ratios.size(), [&](size_t i) {
    std::mt19937_64 rng(split_seed(seed, i));
    const auto g = random_polynomial(sg, cfg.g_degree, rng);
    const Eigen::VectorXd gv = sg.nodal_values(g);
    const auto f = sg.expand_nodal((gv.cwiseAbs2().array() + cfg.floor).matrix());
    const Eigen::VectorXd x = normal_vector(rng, n);
    const std::span<const double> xs(x.data(), static_cast<size_t>(n));
    std::uniform_real_distribution<double> ul(-7.0, 7.0);
    const double lambda = std::exp(ul(rng));
    const auto a = multiplicative_estimate_check(f, cfg.r, cfg.k, cfg.q, xs, sg, tg);
    const auto b = multiplicative_estimate_check(f.with_coeffs(lambda * f.coeffs()), cfg.r, cfg.k, cfg.q, xs, sg, tg);
    rep.ratios[i] = a.ratio;
    scale_err[i] = a.ratio > 0.0 ? std::abs(b.ratio / a.ratio - 1.0) : std::abs(b.ratio - a.ratio);
  });
  rep.median = median_of(rep.ratios);
  for (double v : rep.ratios) {
    rep.max_ratio = std::isfinite(v) ? std::max(rep.max_ratio, v) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(v) || v > cfg.median_factor * rep.median) ++rep.violations;
  }
  rep.max_scale_error = *std::max_element(scale_err.begin(), scale_err.end());
  rep.pass = rep.violations == 0 && rep.max_scale_error <= cfg.scale_tol;
  return rep;
}

ojson MultestSweepReport::to_json() const {
  return {{"samples", ratios.size()},        {"median", median},
          {"max_ratio", max_ratio},          {"violations", violations},
          {"max_scale_error", max_scale_error}, {"pass", pass}};
}

std::string MultestSweepReport::to_csv() const {
  std::ostringstream os;
  os << "sample,ratio\n";
  for (size_t i = 0; i < ratios.size(); ++i) os << i << ',' << fmt(ratios[i]) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

MeyerProbeReport meyer_probe(const MeyerProbeConfig& cfg, std::uint64_t seed) {
  require(cfg.samples >= 1 && cfg.dK >= 0 && cfg.decay > 0.0, "meyer probe: bad configuration");
  const SpectralGrid coarse(GaussModelSpace{cfg.n, cfg.K, 2 * cfg.K + 1});
  const SpectralGrid fine(GaussModelSpace{cfg.n, cfg.K + cfg.dK, 2 * (cfg.K + cfg.dK) + 1});
  // graded-lex order lists low degrees first, so the coarse coefficients are a
  // prefix of the fine ones
  const auto Mc = static_cast<Eigen::Index>(coarse.basis_size());
  std::vector<Eigen::VectorXd> coeffs(static_cast<size_t>(cfg.samples));
  for (size_t i = 0; i < coeffs.size(); ++i) {
    std::mt19937_64 rng(split_seed(seed, i));
    std::normal_distribution<double> nd;
    coeffs[i].resize(static_cast<Eigen::Index>(fine.basis_size()));
    for (Eigen::Index a = 0; a < coeffs[i].size(); ++a) coeffs[i](a) = nd(rng) * std::pow(cfg.decay, fine.orders()(a));
  }
  struct Key {
    int r;
    double p;
  };
  std::vector<Key> keys;
  for (int r : cfg.r_values)
    for (double p : cfg.p_values) keys.push_back({r, p});
  const size_t S = coeffs.size();
  std::vector<double> lo_c(keys.size() * S), lo_f(keys.size() * S);
  parallel_for(keys.size() * S, [&](size_t t) {
    const auto& k = keys[t / S];
    const auto& c = coeffs[t % S];
    lo_c[t] = meyer_ratio(coarse.from_coeffs(c.head(Mc)), {k.r, k.p}, coarse);
    lo_f[t] = meyer_ratio(fine.from_coeffs(c), {k.r, k.p}, fine);
  });
  MeyerProbeReport rep;
  for (size_t g = 0; g < keys.size(); ++g) {
    MeyerGroup m;
    m.r = keys[g].r;
    m.p = keys[g].p;
    const auto bc = lo_c.begin() + static_cast<std::ptrdiff_t>(g * S);
    const auto bf = lo_f.begin() + static_cast<std::ptrdiff_t>(g * S);
    const auto [mnc, mxc] = std::minmax_element(bc, bc + static_cast<std::ptrdiff_t>(S));
    const auto [mnf, mxf] = std::minmax_element(bf, bf + static_cast<std::ptrdiff_t>(S));
    m.lo = *mnc;
    m.hi = *mxc;
    m.lo_refined = *mnf;
    m.hi_refined = *mxf;
    m.width = m.hi / m.lo;
    m.drift = std::max(std::abs(m.lo_refined / m.lo - 1.0), std::abs(m.hi_refined / m.hi - 1.0));
    m.pass = std::isfinite(m.width) && m.lo > 0.0 && m.width < cfg.width_limit && m.drift < cfg.stability_tol;
    rep.groups.push_back(m);
  }
  rep.pass = std::all_of(rep.groups.begin(), rep.groups.end(), [](const MeyerGroup& g) { return g.pass; });
  return rep;
}

ojson MeyerProbeReport::to_json() const {
  ojson gj = ojson::array();
  for (const auto& g : groups)
    gj.push_back({{"r", g.r},
                  {"p", g.p},
                  {"envelope", {g.lo, g.hi}},
                  {"envelope_refined", {g.lo_refined, g.hi_refined}},
                  {"width", g.width},
                  {"drift", g.drift},
                  {"pass", g.pass}});
  return {{"groups", gj}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

HyperplaneReport hausdorff_hyperplanes(const HyperplaneConfig& cfg, std::uint64_t seed) {
  const auto fam = default_subspace_family(2, 1.0);
  const auto sch = CoveringSchedule::dyadic(cfg.k_lo, cfg.k_hi);
  HyperplaneReport rep;
  for (double a : cfg.offsets) {
    HyperplaneRow row;
    row.offset = a;
    row.value = gaussian_hausdorff(RegionSpec::slab({1.0, 0.0}, a, 0.0), 2, 1.0, fam, cfg.section_samples, sch, seed)
                    .value;
    row.expected = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    row.rel_error = std::abs(row.value / row.expected - 1.0);
    rep.rows.push_back(row);
  }
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                         [&](const HyperplaneRow& r) { return r.rel_error < cfg.tolerance; });
  return rep;
}

ojson HyperplaneReport::to_json() const {
  ojson rj = ojson::array();
  for (const auto& r : rows)
    rj.push_back({{"offset", r.offset}, {"value", r.value}, {"expected", r.expected}, {"rel_error", r.rel_error}});
  return {{"rows", rj}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

SheetLawResult sheet_law(const SheetLawConfig& cfg, std::uint64_t seed) {
  SheetLawResult res;
  res.law = sheet_law_check(SheetGrid::uniform(cfg.r, cfg.n, cfg.lo, cfg.hi, cfg.spacing), cfg.replicas, seed,
                            cfg.alpha, cfg.z);
  res.pass = res.law.ks_failures == 0 && res.law.cov_exceed == 0;
  return res;
}

ojson SheetLawResult::to_json() const {
  return {{"points", law.points},       {"replicas", law.replicas},     {"ks_max", law.ks_max},
          {"ks_critical", law.ks_critical}, {"ks_failures", law.ks_failures}, {"pairs", law.pairs},
          {"cov_max_z", law.cov_max_z}, {"cov_exceed", law.cov_exceed}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

KakutaniResult kakutani_nested(const KakutaniConfig& cfg, std::uint64_t seed, const SolverOptions& opts) {
  require(!cfg.radii.empty(), "kakutani: no radii");
  for (size_t i = 1; i < cfg.radii.size(); ++i)
    require(cfg.radii[i] < cfg.radii[i - 1], "kakutani: radii must decrease");
  std::vector<RegionSpec> fam;
  std::vector<std::string> ids;
  for (double rho : cfg.radii) {
    auto b = RegionSpec::ball({0.0}, rho);
    b.margin = 0.0;
    fam.push_back(b);
    ids.push_back("ball(" + fmt(rho) + ")");
  }
  if (cfg.include_trivial) {
    fam.push_back(RegionSpec::empty());
    ids.emplace_back("empty");
    fam.push_back(RegionSpec::full());
    ids.emplace_back("full");
  }
  const auto grid = SheetGrid::uniform(cfg.r, 1, cfg.lo, cfg.hi, cfg.spacing);
  KakutaniResult res;
  res.table = kakutani_experiment(fam, ids, grid, cfg.levels, cfg.replicas, seed, cfg.spaces, cfg.zero_threshold, opts);
  res.hitting_decreasing = res.capacity_decreasing = true;
  for (size_t i = 1; i < cfg.radii.size(); ++i) {
    const auto& a = res.table.rows[i - 1];
    const auto& b = res.table.rows[i];
    res.hitting_decreasing = res.hitting_decreasing && b.hitting.back().estimate < a.hitting.back().estimate;
    res.capacity_decreasing = res.capacity_decreasing && b.capacity < a.capacity;
  }
  res.no_contradiction = std::none_of(res.table.rows.begin(), res.table.rows.end(),
                                      [](const KakutaniRow& r) { return r.contradiction; });
  res.pass = res.hitting_decreasing && res.capacity_decreasing && res.no_contradiction &&
             std::abs(res.table.rank_correlation - 1.0) < 1e-12;
  return res;
}

ojson KakutaniResult::to_json() const {
  ojson rows = ojson::array();
  for (const auto& r : table.rows) {
    ojson hits = ojson::array();
    for (const auto& h : r.hitting)
      hits.push_back({{"spacing", h.spacing},
                      {"margin", h.margin},
                      {"replicas", h.replicas},
                      {"hits", h.hits},
                      {"estimate", h.estimate},
                      {"ci", {h.ci_lo, h.ci_hi}}});
    rows.push_back({{"id", r.id},
                    {"region", region_to_json(r.region)},
                    {"hitting", hits},
                    {"capacity_trend", r.capacity_trend},
                    {"capacity_class", to_string(r.capacity_class)},
                    {"capacity", r.capacity},
                    {"capacity_slope", r.capacity_slope},
                    {"contradiction", r.contradiction}});
  }
  return {{"rows", rows},
          {"rank_correlation", table.rank_correlation},
          {"seed", table.seed},
          {"hitting_decreasing", hitting_decreasing},
          {"capacity_decreasing", capacity_decreasing},
          {"no_contradiction", no_contradiction},
          {"pass", pass}};
}

std::string KakutaniResult::to_csv() const {
  std::ostringstream os;
  os << "set_id,hit_estimate,ci_lo,ci_hi,spacing,cap_value,cap_class,trend_slope,seed\n";
  for (const auto& r : table.rows) {
    const auto& h = r.hitting.back();
    os << r.id << ',' << fmt(h.estimate) << ',' << fmt(h.ci_lo) << ',' << fmt(h.ci_hi) << ',' << fmt(h.spacing) << ','
       << fmt(r.capacity) << ',' << to_string(r.capacity_class) << ',' << fmt(r.capacity_slope) << ',' << table.seed
       << '\n';
  }
  return os.str();
}

}  // namespace gausscap
