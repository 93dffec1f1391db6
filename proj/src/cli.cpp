#include "gausscap/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "gausscap/capacity.hpp"
#include "gausscap/error.hpp"
#include "gausscap/experiments.hpp"
#include "gausscap/json_io.hpp"
#include "gausscap/parallel.hpp"

namespace gausscap {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---- config plumbing ------------------------------------------------------

bool is_free_key(const std::string& k) { return k == "region" || k == "regions"; }

bool same_kind(const ojson& a, const ojson& b) {
  if (a.is_number()) return b.is_number();
  if (a.is_boolean() || a.is_string() || a.is_array() || a.is_object()) return a.type() == b.type();
  return true;
}

void merge_into(ojson& base, const ojson& user, const std::string& path) {
  if (!user.is_object()) throw ValidationError("config" + (path.empty() ? "" : " key '" + path + "'") + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ValidationError("unknown config key '" + key + "'");
    auto& slot = base[it.key()];
    if (is_free_key(it.key())) {
      slot = it.value();
    } else if (slot.is_object()) {
      merge_into(slot, it.value(), key);
    } else {
      if (!same_kind(slot, it.value())) throw ValidationError("config key '" + key + "' has the wrong type");
      // keep floats as floats so the stored config is canonical
      if (slot.is_number_float() && it.value().is_number_integer())
        slot = it.value().get<double>();
      else
        slot = it.value();
    }
  }
}

const ojson& at(const ojson& j, const char* k) {
  if (!j.contains(k)) throw ValidationError(std::string("config: missing key '") + k + "'");
  return j.at(k);
}

long long as_integer(const ojson& v, const std::string& what) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
  }
  throw ValidationError("config: '" + what + "' must be an integer");
}

int geti(const ojson& j, const char* k) { return static_cast<int>(as_integer(at(j, k), k)); }
long getl(const ojson& j, const char* k) { return static_cast<long>(as_integer(at(j, k), k)); }

double getd(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_number()) throw ValidationError(std::string("config: '") + k + "' must be a number");
  return v.get<double>();
}

bool getb(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_boolean()) throw ValidationError(std::string("config: '") + k + "' must be true or false");
  return v.get<bool>();
}

std::string gets(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_string()) throw ValidationError(std::string("config: '") + k + "' must be a string");
  return v.get<std::string>();
}

std::uint64_t getu(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const long long s = as_integer(v, k);
  if (s < 0) throw ValidationError(std::string("config: '") + k + "' must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::vector<double> getvd(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_array()) throw ValidationError(std::string("config: '") + k + "' must be a list");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(std::string("config: '") + k + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> getvi(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_array()) throw ValidationError(std::string("config: '") + k + "' must be a list");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(static_cast<int>(as_integer(e, k)));
  return out;
}

ojson space_json(const GaussModelSpace& s) { return {{"n", s.n}, {"K", s.K}, {"Q", s.Q}}; }

GaussModelSpace parse_space(const ojson& j) {
  if (!j.is_object()) throw ValidationError("config: a model space is an object {n, K, Q}");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "n" && it.key() != "K" && it.key() != "Q")
      throw ValidationError("unknown model space key '" + it.key() + "'");
  GaussModelSpace s{geti(j, "n"), geti(j, "K"), geti(j, "Q")};
  s.validate();
  return s;
}

std::vector<GaussModelSpace> parse_spaces(const ojson& j, const char* k) {
  const auto& v = at(j, k);
  if (!v.is_array()) throw ValidationError(std::string("config: '") + k + "' must be a list of model spaces");
  std::vector<GaussModelSpace> out;
  for (const auto& e : v) out.push_back(parse_space(e));
  return out;
}

ojson spaces_json(const std::vector<GaussModelSpace>& v) {
  ojson a = ojson::array();
  for (const auto& s : v) a.push_back(space_json(s));
  return a;
}

RegionSpec parse_region(const ojson& j) { return region_from_json(json::parse(j.dump())); }

ojson solver_json(const SolverOptions& o) {
  return {{"qp_gap", o.qp_gap}, {"rel_tol", o.rel_tol}, {"max_iter", o.max_iter}};
}

SolverOptions parse_solver(const ojson& j) {
  SolverOptions o;
  o.qp_gap = getd(j, "qp_gap");
  o.rel_tol = getd(j, "rel_tol");
  o.max_iter = geti(j, "max_iter");
  require(o.qp_gap > 0.0 && o.rel_tol > 0.0 && o.max_iter > 0, "config: solver tolerances and max_iter must be positive");
  return o;
}

ojson grid_json(int r, int n, double lo, double hi, double h) {
  return {{"r", r}, {"n", n}, {"lo", lo}, {"hi", hi}, {"spacing", h}};
}

SheetGrid parse_grid(const ojson& j) {
  return SheetGrid::uniform(geti(j, "r"), geti(j, "n"), getd(j, "lo"), getd(j, "hi"), getd(j, "spacing"));
}

ojson hit_json(const HitStats& h) {
  return {{"spacing", h.spacing}, {"margin", h.margin},     {"replicas", h.replicas},
          {"hits", h.hits},       {"estimate", h.estimate}, {"ci", {h.ci_lo, h.ci_hi}}};
}

ojson capacity_json(const CapacityResult& c) {
  return {{"definition", to_string(c.definition)},
          {"value", c.value},
          {"converged", c.converged},
          {"residual", c.residual},
          {"gap", c.gap},
          {"iterations", c.iterations},
          {"method", c.method},
          {"rank_deficient", c.rank_deficient},
          {"grid",
           {{"n", c.grid_meta.n},
            {"K", c.grid_meta.K},
            {"Q", c.grid_meta.Q},
            {"margin", c.grid_meta.margin},
            {"constrained_nodes", c.grid_meta.constrained_nodes}}}};
}

// Upper normal quantile by bisection: P(Z > z) = q.
double normal_upper_quantile(double q) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::sqrt(2.0)) > q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- typed configs from JSON ---------------------------------------------

EquivalenceSweepConfig parse_equivalence(const ojson& c) {
  EquivalenceSweepConfig e;
  e.r_values = getvi(c, "r_values");
  e.p_values = getvd(c, "p_values");
  const auto& regs = at(c, "regions");
  if (!regs.is_array() || regs.empty()) throw ValidationError("config: 'regions' must be a nonempty list");
  e.regions.clear();
  for (const auto& r : regs) e.regions.push_back(parse_region(r));
  e.base = parse_spaces(c, "base");
  e.refine_Q = geti(c, "refine_Q");
  e.C = getd(c, "C");
  e.refine_tol = getd(c, "refine_tol");
  return e;
}

TruncationSweepConfig parse_truncation(const ojson& c) {
  TruncationSweepConfig t;
  t.dims = getvi(c, "dims");
  t.r = geti(c, "r");
  t.p = getd(c, "p");
  t.samples = geti(c, "samples");
  t.K = geti(c, "K");
  t.Q = geti(c, "Q");
  t.g_degree = geti(c, "g_degree");
  t.amp_lo = getd(c, "amp_lo");
  t.amp_hi = getd(c, "amp_hi");
  t.spread_tol = getd(c, "spread_tol");
  t.median_factor = getd(c, "median_factor");
  require(t.amp_lo > 0.0 && t.amp_hi >= t.amp_lo, "config: need 0 < amp_lo <= amp_hi");
  return t;
}

MultestSweepConfig parse_multest(const ojson& c) {
  MultestSweepConfig m;
  m.space = parse_space(at(c, "space"));
  m.r = geti(c, "r");
  m.k = geti(c, "k");
  m.q = getd(c, "q");
  m.samples = geti(c, "samples");
  m.g_degree = geti(c, "g_degree");
  m.floor = getd(c, "floor");
  m.median_factor = getd(c, "median_factor");
  m.scale_tol = getd(c, "scale_tol");
  return m;
}

KakutaniConfig parse_kakutani(const ojson& c) {
  KakutaniConfig k;
  k.radii = getvd(c, "radii");
  k.include_trivial = getb(c, "include_trivial");
  k.r = geti(c, "r");
  k.lo = getd(c, "lo");
  k.hi = getd(c, "hi");
  k.spacing = getd(c, "spacing");
  k.levels = geti(c, "levels");
  k.replicas = getl(c, "replicas");
  k.spaces = parse_spaces(c, "spaces");
  k.zero_threshold = getd(c, "zero_threshold");
  return k;
}

ojson equivalence_defaults() {
  const EquivalenceSweepConfig e;
  ojson regs = ojson::array();
  for (const auto& r : e.regions) regs.push_back(region_to_json(r));
  return {{"r_values", e.r_values}, {"p_values", e.p_values}, {"regions", regs},          {"base", spaces_json(e.base)},
          {"refine_Q", e.refine_Q}, {"C", e.C},               {"refine_tol", e.refine_tol}};
}

// ---- selftest -------------------------------------------------------------

struct Suite {
  std::string name;
  ojson report;
  bool pass = false;
};

template <class F>
void run_suite(std::vector<Suite>& out, RunInfo& info, const std::string& name, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Suite s;
  s.name = name;
  try {
    s.report = f();
    s.pass = s.report.at("pass").get<bool>();
  } catch (const std::exception& e) {
    s.report = {{"error", e.what()}, {"pass", false}};
    s.pass = false;
  }
  info.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.push_back(std::move(s));
}

ojson selftest(const ojson& c, RunInfo& info) {
  const std::string scale = gets(c, "scale");
  require(scale == "quick" || scale == "full", "config: 'scale' must be \"quick\" or \"full\"");
  const bool quick = scale == "quick";
  const std::uint64_t seed = getu(c, "seed");
  std::vector<Suite> suites;

  run_suite(suites, info, "examples", [&] {
    const SpectralGrid sg(GaussModelSpace{1, 8, 17});
    const auto cap = cap_potential(RegionSpec::empty(), {2, 2.0}, sg);
    const auto cv = cap_variational(RegionSpec::empty(), {2, 2.0}, sg);
    const auto u = uniqueness_verdict(RegionSpec::empty(), 2, 10.0, sg, 1e-3, {0.3, 0.2, 0.1});
    const auto g = SheetGrid::uniform(2, 1, 0.0, 1.0, 0.25);
    const auto full = hitting_probability(RegionSpec::full(), g, 100, seed);
    const auto none = hitting_probability(RegionSpec::empty(), g, 100, seed);
    const bool pass = cap.value == 0.0 && cv.value == 0.0 && !u.condition &&
                      u.verdict.find("generation condition fails") != std::string::npos && full.estimate == 1.0 &&
                      none.estimate == 0.0;
    return ojson{{"empty_capacity", {cap.value, cv.value}},
                 {"uniqueness_verdict", u.verdict},
                 {"hitting_full", full.estimate},
                 {"hitting_empty", none.estimate},
                 {"pass", pass}};
  });

  run_suite(suites, info, "potential_agreement", [&] {
    PotentialAgreementConfig p;
    if (quick) {
      p.K = 8;
      p.functions = 2;
      p.points = 10;
    }
    return potential_agreement(p, seed).to_json();
  });
  run_suite(suites, info, "semigroup", [&] {
    SemigroupSuiteConfig s;
    if (quick) s.functions = 20;
    return semigroup_suite(s, seed).to_json();
  });
  run_suite(suites, info, "full_space_capacity", [&] { return full_space_capacity({}).to_json(); });
  run_suite(suites, info, "equivalence", [&] {
    EquivalenceSweepConfig e;
    if (quick) e.p_values = {2.0};
    auto j = equivalence_sweep(e).to_json();
    j.erase("rows");
    return j;
  });
  run_suite(suites, info, "truncation", [&] {
    TruncationSweepConfig t;
    if (quick) t.samples = 20;
    return truncation_sweep(t, seed).to_json();
  });
  run_suite(suites, info, "multest", [&] {
    MultestSweepConfig m;
    if (quick) m.samples = 100;
    return multest_sweep(m, seed).to_json();
  });
  run_suite(suites, info, "meyer", [&] {
    MeyerProbeConfig m;
    if (quick) m.samples = 20;
    return meyer_probe(m, seed).to_json();
  });
  run_suite(suites, info, "hausdorff_hyperplanes", [&] { return hausdorff_hyperplanes({}, seed).to_json(); });
  run_suite(suites, info, "sheet_law", [&] {
    SheetLawConfig s;
    if (quick) {
      // a small grid with bands split across all tests (Bonferroni), so a
      // correct sampler trips the suite with probability about 2%
      s.spacing = 0.5;
      s.replicas = 20000;
      const double points = 9.0, pairs = 36.0;
      s.alpha = 0.01 / points;
      s.z = normal_upper_quantile(0.01 / (2.0 * pairs));
    }
    auto j = sheet_law(s, seed).to_json();
    j["z_band"] = s.z;
    j["alpha"] = s.alpha;
    return j;
  });
  run_suite(suites, info, "kakutani", [&] {
    KakutaniConfig k;
    if (quick) {
      k.replicas = 2000;
      k.spaces = {{1, 16, 41}, {1, 20, 41}, {1, 24, 41}};
    }
    auto j = kakutani_nested(k, seed).to_json();
    for (auto& row : j["rows"]) row.erase("region");
    return j;
  });

  ojson rep = ojson::object();
  bool all = true;
  ojson failed = ojson::array();
  for (auto& s : suites) {
    rep[s.name] = std::move(s.report);
    all = all && s.pass;
    if (!s.pass) failed.push_back(s.name);
  }
  if (!all) info.exit_code = exit_selftest;
  return {{"scale", scale}, {"suites", rep}, {"failed", failed}, {"pass", all}};
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"capacity",  "equivalence", "truncation-bound", "multest",   "hausdorff",
                                              "hitting",   "kakutani",    "uniqueness",       "selftest"};
  return names;
}

ojson default_config(const std::string& command) {
  const SolverOptions so;
  ojson c{{"command", command}, {"seed", 1}};
  if (command == "capacity") {
    c["space"] = space_json({1, 8, 17});
    c["r"] = 2;
    c["p"] = 2.0;
    c["definition"] = "potential";
    c["region"] = "empty";
    c["solver"] = solver_json(so);
  } else if (command == "equivalence") {
    c.update(equivalence_defaults());
    c["solver"] = solver_json(so);
  } else if (command == "truncation-bound") {
    const TruncationSweepConfig t;
    c.update(ojson{{"dims", t.dims},
                   {"r", t.r},
                   {"p", t.p},
                   {"samples", t.samples},
                   {"K", t.K},
                   {"Q", t.Q},
                   {"g_degree", t.g_degree},
                   {"amp_lo", t.amp_lo},
                   {"amp_hi", t.amp_hi},
                   {"spread_tol", t.spread_tol},
                   {"median_factor", t.median_factor}});
  } else if (command == "multest") {
    const MultestSweepConfig m;
    c.update(ojson{{"space", space_json(m.space)},
                   {"r", m.r},
                   {"k", m.k},
                   {"q", m.q},
                   {"samples", m.samples},
                   {"g_degree", m.g_degree},
                   {"floor", m.floor},
                   {"median_factor", m.median_factor},
                   {"scale_tol", m.scale_tol}});
  } else if (command == "hausdorff") {
    const CoveringSchedule s;
    c["n"] = 2;
    c["d"] = 1.0;
    c["region"] = region_to_json(RegionSpec::slab({1.0, 0.0}, 0.0, 0.0));
    c["section_samples"] = 64;
    c["k_lo"] = 2;
    c["k_hi"] = 6;
    c["window"] = s.window;
    c["max_cells"] = s.max_cells;
  } else if (command == "hitting") {
    c["region"] = region_to_json(RegionSpec::ball({0.0}, 1.0));
    c["grid"] = grid_json(2, 1, 0.0, 4.0, 0.25);
    c["levels"] = 1;
    c["replicas"] = 10000;
  } else if (command == "kakutani") {
    const KakutaniConfig k;
    c.update(ojson{{"radii", k.radii},
                   {"include_trivial", k.include_trivial},
                   {"r", k.r},
                   {"lo", k.lo},
                   {"hi", k.hi},
                   {"spacing", k.spacing},
                   {"levels", k.levels},
                   {"replicas", k.replicas},
                   {"spaces", spaces_json(k.spaces)},
                   {"zero_threshold", k.zero_threshold}});
    c["solver"] = solver_json(so);
  } else if (command == "uniqueness") {
    c["region"] = "empty";
    c["m"] = 2;
    c["p"] = 10.0;
    c["space"] = space_json({1, 8, 17});
    c["margins"] = {0.3, 0.2, 0.1};
    c["zero_threshold"] = 1e-3;
    c["solver"] = solver_json(so);
  } else if (command == "selftest") {
    c["scale"] = "quick";
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  return c;
}

ojson materialize_config(const std::string& command, const ojson& user) {
  ojson c = default_config(command);
  if (user.is_object() && user.contains("command") && user["command"] != command)
    throw ValidationError("config is for command " + user["command"].dump() + ", not '" + command + "'");
  merge_into(c, user, "");
  return c;
}

ojson run_command(const std::string& command, const ojson& c, RunInfo& info) {
  const std::uint64_t seed = getu(c, "seed");
  ojson out{{"command", command}, {"config", c}};

  if (command == "capacity") {
    const SpectralGrid sg(parse_space(at(c, "space")));
    const auto res = capacity(definition_from_string(gets(c, "definition")), parse_region(at(c, "region")),
                              {geti(c, "r"), getd(c, "p")}, sg, parse_solver(at(c, "solver")));
    out["result"] = capacity_json(res);
    if (!res.converged) info.exit_code = exit_nonconvergence;
  } else if (command == "equivalence") {
    const auto rep = equivalence_sweep(parse_equivalence(c), parse_solver(at(c, "solver")));
    out["result"] = rep.to_json();
    info.csv = rep.to_csv();
    if (!rep.all_converged) info.exit_code = exit_nonconvergence;
  } else if (command == "truncation-bound") {
    const auto rep = truncation_sweep(parse_truncation(c), seed);
    out["result"] = rep.to_json();
    info.csv = rep.to_csv();
  } else if (command == "multest") {
    const auto rep = multest_sweep(parse_multest(c), seed);
    out["result"] = rep.to_json();
    info.csv = rep.to_csv();
  } else if (command == "hausdorff") {
    const int n = geti(c, "n");
    const double d = getd(c, "d");
    auto sch = CoveringSchedule::dyadic(geti(c, "k_lo"), geti(c, "k_hi"));
    sch.window = getd(c, "window");
    sch.max_cells = static_cast<size_t>(as_integer(at(c, "max_cells"), "max_cells"));
    const auto rep = gaussian_hausdorff(parse_region(at(c, "region")), n, d, default_subspace_family(n, d),
                                        geti(c, "section_samples"), sch, seed);
    ojson per = ojson::array();
    for (const auto& e : rep.per_F) {
      ojson basis = ojson::array();
      for (Eigen::Index k = 0; k < e.basis.cols(); ++k)
        basis.push_back(std::vector<double>(e.basis.col(k).data(), e.basis.col(k).data() + e.basis.rows()));
      per.push_back({{"basis", basis}, {"value", e.value}, {"ci", e.ci}});
    }
    out["result"] = {{"value", rep.value}, {"lower_bound_only", rep.lower_bound_only}, {"per_subspace", per}};
  } else if (command == "hitting") {
    const auto U = parse_region(at(c, "region"));
    const auto grid = parse_grid(at(c, "grid"));
    const int levels = geti(c, "levels");
    const long replicas = getl(c, "replicas");
    const auto tr = levels == 1 ? std::vector<HitStats>{hitting_probability(U, grid, replicas, seed)}
                                : hitting_trend(U, grid, levels, replicas, seed);
    ojson lv = ojson::array();
    std::string csv = "spacing,margin,replicas,hits,estimate,ci_lo,ci_hi\n";
    for (const auto& h : tr) {
      lv.push_back(hit_json(h));
      char buf[256];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld,%ld,%.17g,%.17g,%.17g\n", h.spacing, h.margin, h.replicas,
                    h.hits, h.estimate, h.ci_lo, h.ci_hi);
      csv += buf;
    }
    out["result"] = {{"estimate", tr.back().estimate}, {"levels", lv}};
    info.csv = csv;
  } else if (command == "kakutani") {
    const auto rep = kakutani_nested(parse_kakutani(c), seed, parse_solver(at(c, "solver")));
    out["result"] = rep.to_json();
    info.csv = rep.to_csv();
  } else if (command == "uniqueness") {
    const SpectralGrid sg(parse_space(at(c, "space")));
    const auto rep = uniqueness_verdict(parse_region(at(c, "region")), geti(c, "m"), getd(c, "p"), sg,
                                        getd(c, "zero_threshold"), getvd(c, "margins"), parse_solver(at(c, "solver")));
    out["result"] = {{"verdict", rep.verdict},
                     {"generation_condition", rep.condition},
                     {"trend", to_string(rep.trend)},
                     {"margins", rep.margins},
                     {"capacities", rep.values}};
  } else if (command == "selftest") {
    out["result"] = selftest(c, info);
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_name(const std::string& command) {
  if (command == "truncation-bound") return "truncation.csv";
  return command + ".csv";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"gausscap: Gaussian potentials, capacities and OU-sheet experiments on Hermite model spaces"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool quiet = false;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  std::vector<CLI::Option*> seed_opts;
  for (const auto& name : command_names()) {
    auto* sc = app.add_subcommand(name);
    sc->add_option("--config", config_path, "JSON config file; unknown keys are rejected")->check(CLI::ExistingFile);
    seed_opts.push_back(sc->add_option("--seed", seed, "random seed (overrides the config)"));
    sc->add_option("--out", out_dir, "output directory")->capture_default_str();
    sc->add_flag("--quiet", quiet, "print nothing on success");
    subs.emplace_back(name, sc);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }
  std::string command;
  bool seed_given = false;
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i].second->parsed()) {
      command = subs[i].first;
      seed_given = seed_opts[i]->count() > 0;
    }

  const fs::path out(out_dir);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  auto write_meta = [&](int code, const RunInfo& info) {
    const ojson meta{{"command", command},
                     {"started_utc", started},
                     {"finished_utc", utc_now()},
                     {"elapsed_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                     {"threads", thread_count()},
                     {"exit_code", code},
                     {"timings", info.timings}};
    write_file_atomic(out / "meta.json", dump_json(meta));
  };

  RunInfo info;
  try {
    fs::create_directories(out);
    ojson user = ojson::object();
    if (!config_path.empty()) {
      try {
        user = ojson::parse(read_file(config_path), nullptr, true, true);
      } catch (const ojson::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    if (seed_given) {
      if (!user.is_object()) throw ValidationError("config must be an object");
      user["seed"] = seed;
    }
    const ojson cfg = materialize_config(command, user);
    write_file_atomic(out / "config.json", dump_json(cfg));
    const ojson result = run_command(command, cfg, info);
    write_file_atomic(out / "result.json", dump_json(result));
    if (!info.csv.empty()) write_file_atomic(out / csv_name(command), info.csv);
    write_meta(info.exit_code, info);
    if (!quiet) std::cout << dump_json(result["result"]);
    return info.exit_code;
  } catch (const std::exception& e) {
    const bool validation = dynamic_cast<const ValidationError*>(&e) != nullptr ||
                            dynamic_cast<const std::invalid_argument*>(&e) != nullptr;
    const int code = validation ? exit_validation : exit_nonconvergence;
    const ojson err{{"command", command},
                    {"exit_code", code},
                    {"error", {{"kind", validation ? "validation" : "numerical"}, {"message", e.what()}}}};
    std::cerr << err.dump() << '\n';
    try {
      fs::create_directories(out);
      write_file_atomic(out / "error.json", dump_json(err));
      write_meta(code, info);
    } catch (const std::exception&) {
    }
    return code;
  }
}

}  // namespace gausscap
