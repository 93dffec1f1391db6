#include "gausscap/sheet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gausscap/error.hpp"
#include "gausscap/parallel.hpp"

namespace gausscap {

SheetGrid SheetGrid::uniform(int r, int n, double lo, double hi, double h) {
  require(h > 0.0 && hi >= lo, "sheet: bad uniform axis");
  const long steps = std::lround((hi - lo) / h);
  if (std::abs(lo + static_cast<double>(steps) * h - hi) > 1e-9 * std::max(1.0, std::abs(hi)))
    throw ValidationError("sheet: axis length is not a multiple of the spacing");
  std::vector<double> ax;
  for (long j = 0; j <= steps; ++j) ax.push_back(lo + static_cast<double>(j) * h);
  SheetGrid g;
  g.r = r;
  g.n = n;
  g.axes.assign(static_cast<size_t>(std::max(r, 0)), ax);
  g.validate();
  return g;
}

void SheetGrid::validate() const {
  if (r < 1) throw ValidationError("sheet: r must be at least 1");
  if (n < 1) throw ValidationError("sheet: n must be at least 1");
  if (axes.size() != static_cast<size_t>(r)) throw ValidationError("sheet: need one time list per parameter");
  for (const auto& ax : axes) {
    if (ax.empty()) throw ValidationError("sheet: empty axis");
    for (size_t j = 0; j < ax.size(); ++j) {
      if (!(ax[j] >= 0.0) || !std::isfinite(ax[j])) throw ValidationError("sheet: times must be finite and >= 0");
      if (j > 0 && !(ax[j] > ax[j - 1])) throw ValidationError("sheet: times must strictly increase");
    }
  }
  double total = 1.0;
  for (const auto& ax : axes) total *= static_cast<double>(ax.size());
  if (total > 1e7) throw ValidationError("sheet: grid has more than 1e7 points");
}

size_t SheetGrid::size() const {
  size_t s = 1;
  for (const auto& ax : axes) s *= ax.size();
  return s;
}

double SheetGrid::spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& ax : axes)
    for (size_t j = 1; j < ax.size(); ++j) h = std::min(h, ax[j] - ax[j - 1]);
  return std::isfinite(h) ? h : 0.0;
}

std::vector<size_t> SheetGrid::index(size_t flat) const {
  std::vector<size_t> idx(static_cast<size_t>(r));
  for (int a = r - 1; a >= 0; --a) {
    const size_t len = axes[static_cast<size_t>(a)].size();
    idx[static_cast<size_t>(a)] = flat % len;
    flat /= len;
  }
  return idx;
}

namespace {

std::vector<size_t> strides(const SheetGrid& g) {
  std::vector<size_t> s(static_cast<size_t>(g.r), 1);
  for (int a = g.r - 2; a >= 0; --a) s[static_cast<size_t>(a)] = s[static_cast<size_t>(a + 1)] * g.axes[static_cast<size_t>(a + 1)].size();
  return s;
}

void fill_sheet(const SheetGrid& grid, std::uint64_t seed, const std::vector<int>& order, Eigen::MatrixXd& Z) {
  const size_t N = grid.size();
  const auto n = static_cast<Eigen::Index>(grid.n);
  Z.resize(static_cast<Eigen::Index>(N), n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (Eigen::Index i = 0; i < Z.rows(); ++i)
    for (Eigen::Index k = 0; k < n; ++k) Z(i, k) = gauss(rng);
  const auto st = strides(grid);
  for (int a : order) {
    const auto& ax = grid.axes[static_cast<size_t>(a)];
    const size_t len = ax.size();
    const size_t stride = st[static_cast<size_t>(a)];
    if (len < 2) continue;
    std::vector<double> decay(len), noise(len);
    for (size_t j = 1; j < len; ++j) {
      decay[j] = std::exp(-(ax[j] - ax[j - 1]));
      noise[j] = std::sqrt(-std::expm1(-2.0 * (ax[j] - ax[j - 1])));
    }
    for (size_t base = 0; base < N; ++base) {
      if ((base / stride) % len != 0) continue;
      for (size_t j = 1; j < len; ++j) {
        const auto cur = static_cast<Eigen::Index>(base + j * stride);
        const auto prev = static_cast<Eigen::Index>(base + (j - 1) * stride);
        Z.row(cur) = decay[j] * Z.row(prev) + noise[j] * Z.row(cur);
      }
    }
  }
}

std::vector<int> checked_order(const SheetGrid& grid, const std::vector<int>& axis_order) {
  std::vector<int> order = axis_order;
  if (order.empty()) {
    order.resize(static_cast<size_t>(grid.r));
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int a = 0; a < grid.r; ++a)
    if (sorted.size() != static_cast<size_t>(grid.r) || sorted[static_cast<size_t>(a)] != a)
      throw ValidationError("sheet: axis order must be a permutation of the parameters");
  return order;
}

RegionSpec thicken(const RegionSpec& U, double m) {
  RegionSpec out = U;
  switch (U.kind) {
    case RegionSpec::Kind::ball:
      if (U.radius == 0.0) out.radius = m;
      break;
    case RegionSpec::Kind::slab:
      if (U.halfwidth == 0.0) out.halfwidth = m;
      break;
    case RegionSpec::Kind::union_of:
      for (auto& p : out.parts) p = thicken(p, m);
      break;
    case RegionSpec::Kind::complement:
      break;
  }
  return out;
}

}  // namespace

SheetSample sample_sheet(const SheetGrid& grid, std::uint64_t seed, const std::vector<int>& axis_order) {
  grid.validate();
  SheetSample s;
  s.seed = seed;
  fill_sheet(grid, seed, checked_order(grid, axis_order), s.values);
  return s;
}

std::pair<double, double> wilson_interval(long hits, long n) {
  require(n >= 1 && hits >= 0 && hits <= n, "wilson: need 0 <= hits <= n, n >= 1");
  const double z = 1.959963984540054;
  const double N = static_cast<double>(n);
  const double ph = static_cast<double>(hits) / N;
  const double den = 1.0 + z * z / N;
  const double mid = (ph + z * z / (2.0 * N)) / den;
  const double half = z * std::sqrt(ph * (1.0 - ph) / N + z * z / (4.0 * N * N)) / den;
  return {hits == 0 ? 0.0 : std::max(0.0, mid - half), hits == n ? 1.0 : std::min(1.0, mid + half)};
}

RegionSpec hitting_region(const RegionSpec& U, double thin_margin) {
  if (U.margin) return U;
  return thicken(U, thin_margin);
}

std::vector<HitStats> hitting_trend(const RegionSpec& U, const SheetGrid& grid, int levels, long replicas,
                                    std::uint64_t seed) {
  grid.validate();
  U.validate(grid.n);
  require(replicas >= 1, "hitting: replicas must be positive");
  require(levels >= 1 && levels <= 20, "hitting: levels must be in [1, 20]");
  const size_t coarse = size_t{1} << (levels - 1);
  for (const auto& ax : grid.axes)
    if ((ax.size() - 1) % coarse != 0)
      throw ValidationError("hitting: every axis needs 2^(levels-1) * k + 1 times for nested refinement");

  const RegionSpec R = hitting_region(U, grid.spacing());
  const double margin = R.margin.value_or(0.0);
  // points ordered by the coarsest level that contains them
  const size_t N = grid.size();
  std::vector<int> level_of(N);
  for (size_t f = 0; f < N; ++f) {
    const auto idx = grid.index(f);
    int lv = 0;
    for (size_t s = coarse; s > 1; s >>= 1, ++lv)
      if (std::all_of(idx.begin(), idx.end(), [&](size_t i) { return i % s == 0; })) break;
    level_of[f] = lv;
  }
  std::vector<size_t> scan(N);
  std::iota(scan.begin(), scan.end(), 0);
  std::stable_sort(scan.begin(), scan.end(), [&](size_t a, size_t b) { return level_of[a] < level_of[b]; });

  // first level at which each replica hits; `levels` means never
  std::vector<int> first(static_cast<size_t>(replicas), levels);
  if (!R.is_empty()) {
    const std::vector<int> order = checked_order(grid, {});
    parallel_for(static_cast<size_t>(replicas), [&](size_t i) {
      Eigen::MatrixXd Z;
      fill_sheet(grid, split_seed(seed, i), order, Z);
      std::vector<double> x(static_cast<size_t>(grid.n));
      for (size_t f : scan) {
        for (int k = 0; k < grid.n; ++k) x[static_cast<size_t>(k)] = Z(static_cast<Eigen::Index>(f), k);
        if (R.fattened(x, margin)) {
          first[i] = level_of[f];
          return;
        }
      }
    });
  }
  std::vector<HitStats> out;
  for (int lv = 0; lv < levels; ++lv) {
    HitStats h;
    h.replicas = replicas;
    h.hits = std::count_if(first.begin(), first.end(), [&](int v) { return v <= lv; });
    h.estimate = static_cast<double>(h.hits) / static_cast<double>(replicas);
    std::tie(h.ci_lo, h.ci_hi) = wilson_interval(h.hits, replicas);
    h.spacing = grid.spacing() * static_cast<double>(size_t{1} << (levels - 1 - lv));
    h.margin = R.margin ? *R.margin : grid.spacing();
    out.push_back(h);
  }
  return out;
}

HitStats hitting_probability(const RegionSpec& U, const SheetGrid& grid, long replicas, std::uint64_t seed) {
  return hitting_trend(U, grid, 1, replicas, seed).front();
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), "spearman: length mismatch");
  const size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
    std::vector<double> rk(n);
    for (size_t i = 0; i < n;) {
      size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j);
      for (size_t q = i; q <= j; ++q) rk[idx[q]] = avg;
      i = j + 1;
    }
    return rk;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

KakutaniReport kakutani_experiment(const std::vector<RegionSpec>& family, const std::vector<std::string>& ids,
                                   const SheetGrid& grid, int levels, long replicas, std::uint64_t seed,
                                   const std::vector<GaussModelSpace>& spaces, double zero_threshold,
                                   const SolverOptions& opts) {
  require(ids.empty() || ids.size() == family.size(), "kakutani: one id per set");
  require(spaces.size() >= 3, "kakutani: the capacity trend needs at least three model spaces");
  for (const auto& s : spaces)
    require(s.n == grid.n, "kakutani: model spaces must match the state dimension");
  KakutaniReport rep;
  rep.seed = seed;
  std::vector<double> hit_col, cap_col;
  for (size_t i = 0; i < family.size(); ++i) {
    KakutaniRow row;
    row.id = ids.empty() ? "set" + std::to_string(i) : ids[i];
    row.region = family[i];
    row.hitting = hitting_trend(family[i], grid, levels, replicas, split_seed(seed, i));
    row.capacity_trend = capacity_trend(CapacityDefinition::potential, family[i], {grid.r, 2.0}, spaces, opts);
    row.capacity_class = classify_trend(row.capacity_trend, zero_threshold);
    row.capacity = row.capacity_trend.back();
    row.capacity_slope =
        (row.capacity_trend.back() - row.capacity_trend.front()) / static_cast<double>(row.capacity_trend.size() - 1);
    const auto& fin = row.hitting.back();
    row.contradiction = (row.capacity_class == Trend::zero && fin.ci_lo > 0.0) ||
                        (row.capacity_class == Trend::bounded_away && fin.hits == 0);
    hit_col.push_back(fin.estimate);
    cap_col.push_back(row.capacity);
    rep.rows.push_back(std::move(row));
  }
  rep.rank_correlation = spearman(hit_col, cap_col);
  return rep;
}

double ks_statistic_normal(std::vector<double> x) {
  require(!x.empty(), "ks: empty sample");
  std::sort(x.begin(), x.end());
  const double N = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / N - F, F - static_cast<double>(i) / N});
  }
  return d;
}

double ks_critical(long n, double alpha) {
  require(n >= 1 && alpha > 0.0 && alpha < 1.0, "ks: bad sample size or level");
  // Kolmogorov tail Q(l) = 2 sum (-1)^(k-1) exp(-2 k^2 l^2); solve Q(l) = alpha
  auto tail = [](double l) {
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * l * l);
    return s;
  };
  double lo = 0.2, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  const double sn = std::sqrt(static_cast<double>(n));
  return 0.5 * (lo + hi) / (sn + 0.12 + 0.11 / sn);
}

SheetLawReport sheet_law_check(const SheetGrid& grid, long replicas, std::uint64_t seed, double alpha,
                               double z_band) {
  require(z_band > 0.0, "sheet law: band must be positive");
  grid.validate();
  require(replicas >= 2, "sheet law: need at least two replicas");
  const size_t P = grid.size();
  const auto n = static_cast<size_t>(grid.n);
  const size_t D = P * n;
  // samples[c][i]: column c = point * n + coordinate
  std::vector<std::vector<double>> samples(D, std::vector<double>(static_cast<size_t>(replicas)));
  const std::vector<int> order = checked_order(grid, {});
  parallel_for(static_cast<size_t>(replicas), [&](size_t i) {
    Eigen::MatrixXd Z;
    fill_sheet(grid, split_seed(seed, i), order, Z);
    for (size_t p = 0; p < P; ++p)
      for (size_t k = 0; k < n; ++k)
        samples[p * n + k][i] = Z(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
  });

  SheetLawReport rep;
  rep.points = P;
  rep.replicas = replicas;
  rep.ks_critical = ks_critical(replicas, alpha);
  std::vector<double> ks(D);
  parallel_for(D, [&](size_t c) { ks[c] = ks_statistic_normal(samples[c]); });
  for (double v : ks) {
    rep.ks_max = std::max(rep.ks_max, v);
    if (v > rep.ks_critical) ++rep.ks_failures;
  }

  const double N = static_cast<double>(replicas);
  std::vector<double> mean(D);
  for (size_t c = 0; c < D; ++c) mean[c] = std::accumulate(samples[c].begin(), samples[c].end(), 0.0) / N;
  std::vector<std::vector<size_t>> idx(P);
  for (size_t p = 0; p < P; ++p) idx[p] = grid.index(p);
  for (size_t a = 0; a < P; ++a)
    for (size_t b = a + 1; b < P; ++b) {
      double target = 1.0;
      for (int ax = 0; ax < grid.r; ++ax) {
        const auto& t = grid.axes[static_cast<size_t>(ax)];
        target *= std::exp(-std::abs(t[idx[a][static_cast<size_t>(ax)]] - t[idx[b][static_cast<size_t>(ax)]]));
      }
      const double se = std::sqrt((1.0 + target * target) / N);
      for (size_t k = 0; k < n; ++k) {
        const auto& xa = samples[a * n + k];
        const auto& xb = samples[b * n + k];
        double s = 0.0;
        for (size_t i = 0; i < xa.size(); ++i) s += (xa[i] - mean[a * n + k]) * (xb[i] - mean[b * n + k]);
        const double z = std::abs(s / (N - 1.0) - target) / se;
        rep.cov_max_z = std::max(rep.cov_max_z, z);
        if (z > z_band) ++rep.cov_exceed;
        ++rep.pairs;
      }
    }
  return rep;
}

}  // namespace gausscap
