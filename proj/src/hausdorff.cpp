#include "gausscap/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gausscap/error.hpp"
#include "gausscap/parallel.hpp"

namespace gausscap {

SubspacePair SubspacePair::coordinate(int n, const std::vector<int>& axes) {
  require(n >= 1, "subspace: n must be positive");
  std::vector<char> used(static_cast<size_t>(n), 0);
  for (int a : axes) {
    if (a < 0 || a >= n || used[static_cast<size_t>(a)]) throw ValidationError("subspace: bad or repeated axis");
    used[static_cast<size_t>(a)] = 1;
  }
  SubspacePair sp;
  sp.F = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(axes.size()));
  sp.complement = Eigen::MatrixXd::Zero(n, n - static_cast<Eigen::Index>(axes.size()));
  for (size_t i = 0; i < axes.size(); ++i) sp.F(axes[i], static_cast<Eigen::Index>(i)) = 1.0;
  Eigen::Index c = 0;
  for (int a = 0; a < n; ++a)
    if (!used[static_cast<size_t>(a)]) sp.complement(a, c++) = 1.0;
  return sp;
}

SubspacePair SubspacePair::from_basis(const Eigen::MatrixXd& F) {
  const auto n = F.rows();
  const auto m = F.cols();
  require(n >= 1 && m <= n, "subspace: basis has more columns than rows");
  if (m > 0 && (F.transpose() * F - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("subspace: basis is not orthonormal");
  // complete via QR of [F | I]
  Eigen::MatrixXd aug(n, m + n);
  aug << F, Eigen::MatrixXd::Identity(n, n);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(aug);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  SubspacePair sp;
  sp.F = F;
  sp.complement = Q.rightCols(n - m);
  return sp;
}

void SubspacePair::validate(int n) const {
  if (F.rows() != n || complement.rows() != n || F.cols() + complement.cols() != n)
    throw ValidationError("subspace: dimensions of F and its complement must add up to n");
  Eigen::MatrixXd E(n, n);
  E << F, complement;
  if ((E.transpose() * E - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("subspace: bases are not orthonormal");
}

CoveringSchedule CoveringSchedule::dyadic(int k_lo, int k_hi) {
  require(k_lo <= k_hi, "schedule: empty exponent range");
  CoveringSchedule s;
  for (int k = k_lo; k <= k_hi; ++k) s.epsilons.push_back(std::ldexp(1.0, -k));
  return s;
}

void CoveringSchedule::validate() const {
  if (epsilons.empty()) throw ValidationError("schedule: no epsilons");
  for (size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) throw ValidationError("schedule: epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ValidationError("schedule: epsilons must strictly decrease");
  }
  if (!(window > 0.0) || !std::isfinite(window))
    throw ValidationError("schedule: an explicit finite window is required");
  if (max_cells == 0) throw ValidationError("schedule: max_cells must be positive");
}

namespace {

struct Cover {
  int m = 1;
  double rho = 0.0;
  double window = 6.0;
  size_t max_cells = 0;
  std::vector<double> centers;  // flat, m per ball

  void add(const double* c) { centers.insert(centers.end(), c, c + m); }
};

bool thin(const RegionSpec& A) {
  return (A.kind == RegionSpec::Kind::ball && A.radius == 0.0) ||
         (A.kind == RegionSpec::Kind::slab && A.halfwidth == 0.0);
}

// Walks the k-dimensional lattice {j * side : |j| <= J}^k.
template <class Fn>
void for_lattice(int k, long J, size_t max_cells, Fn&& fn) {
  const double per_axis = static_cast<double>(2 * J + 1);
  if (std::pow(per_axis, k) > static_cast<double>(max_cells))
    throw ValidationError("hausdorff: lattice too large at this eps; use a coarser schedule or a smaller window");
  std::vector<long> j(static_cast<size_t>(k), -J);
  for (;;) {
    fn(j);
    int a = k - 1;
    while (a >= 0 && j[static_cast<size_t>(a)] == J) j[static_cast<size_t>(a--)] = -J;
    if (a < 0) return;
    ++j[static_cast<size_t>(a)];
  }
}

void cover_region(const RegionSpec& A, Cover& cv) {
  const int m = cv.m;
  if (A.is_empty()) return;
  if (A.kind == RegionSpec::Kind::union_of) {
    for (const auto& p : A.parts) cover_region(p, cv);
    return;
  }
  const double w = cv.window;
  if (thin(A) && A.kind == RegionSpec::Kind::ball) {
    if (std::all_of(A.center.begin(), A.center.end(), [&](double c) { return std::abs(c) <= w; }))
      cv.add(A.center.data());
    return;
  }
  if (thin(A)) {
    // hyperplane <nu, y> = offset: lattice in its own coordinates
    Eigen::Map<const Eigen::VectorXd> nu(A.normal.data(), m);
    const Eigen::VectorXd base = A.offset * nu;
    if (m == 1) {
      if (std::abs(base(0)) <= w) cv.add(base.data());
      return;
    }
    const int k = m - 1;
    Eigen::MatrixXd aug(m, m);
    aug << nu, Eigen::MatrixXd::Identity(m, m).leftCols(k);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(aug);
    const Eigen::MatrixXd E = (qr.householderQ() * Eigen::MatrixXd::Identity(m, m)).rightCols(k);
    const double side = 2.0 * cv.rho / std::sqrt(static_cast<double>(k));
    const double reach = w * std::sqrt(static_cast<double>(m));
    const long J = static_cast<long>(std::ceil(reach / side));
    Eigen::VectorXd t(k), y(m);
    for_lattice(k, J, cv.max_cells, [&](const std::vector<long>& j) {
      for (int a = 0; a < k; ++a) t(a) = static_cast<double>(j[static_cast<size_t>(a)]) * side;
      y = base + E * t;
      if (y.cwiseAbs().maxCoeff() <= w + 0.5 * side) cv.add(y.data());
    });
    return;
  }
  // fat: ambient lattice, bounding box of a ball when possible
  const double side = 2.0 * cv.rho / std::sqrt(static_cast<double>(m));
  const long J = static_cast<long>(std::ceil(w / side));
  std::vector<double> lo(static_cast<size_t>(m), -w), hi(static_cast<size_t>(m), w);
  if (A.kind == RegionSpec::Kind::ball) {
    for (int a = 0; a < m; ++a) {
      lo[static_cast<size_t>(a)] = std::max(-w, A.center[static_cast<size_t>(a)] - A.radius - side);
      hi[static_cast<size_t>(a)] = std::min(w, A.center[static_cast<size_t>(a)] + A.radius + side);
    }
  }
  std::vector<long> jlo(static_cast<size_t>(m)), jhi(static_cast<size_t>(m));
  double cells = 1.0;
  for (int a = 0; a < m; ++a) {
    const auto ua = static_cast<size_t>(a);
    jlo[ua] = std::max(-J, static_cast<long>(std::floor(lo[ua] / side)));
    jhi[ua] = std::min(J, static_cast<long>(std::ceil(hi[ua] / side)));
    if (jhi[ua] < jlo[ua]) return;
    cells *= static_cast<double>(jhi[ua] - jlo[ua] + 1);
  }
  if (cells > static_cast<double>(cv.max_cells))
    throw ValidationError("hausdorff: lattice too large at this eps; use a coarser schedule or a smaller window");
  std::vector<long> j = jlo;
  std::vector<double> c(static_cast<size_t>(m));
  for (;;) {
    for (int a = 0; a < m; ++a) c[static_cast<size_t>(a)] = static_cast<double>(j[static_cast<size_t>(a)]) * side;
    if (A.fattened(c, cv.rho)) cv.add(c.data());
    int a = m - 1;
    while (a >= 0 && j[static_cast<size_t>(a)] == jhi[static_cast<size_t>(a)]) {
      j[static_cast<size_t>(a)] = jlo[static_cast<size_t>(a)];
      --a;
    }
    if (a < 0) break;
    ++j[static_cast<size_t>(a)];
  }
}

}  // namespace

CoveringReport weighted_covering(const RegionSpec& A, int m, double exponent, const CoveringSchedule& schedule,
                                 bool gaussian_weight) {
  require(m >= 1, "hausdorff: dimension must be positive");
  require(exponent >= 0.0, "hausdorff: exponent must be nonnegative");
  schedule.validate();
  A.validate(m);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * m);
  CoveringReport rep;
  for (double eps : schedule.epsilons) {
    Cover cv;
    cv.m = m;
    cv.rho = 0.5 * eps;
    cv.window = schedule.window;
    cv.max_cells = schedule.max_cells;
    cover_region(A, cv);
    const size_t balls = cv.centers.size() / static_cast<size_t>(m);
    const double unit = std::pow(eps, exponent);
    double sum = 0.0;
    for (size_t b = 0; b < balls; ++b) {
      double wgt = 1.0;
      if (gaussian_weight) {
        double r2 = 0.0;
        for (int a = 0; a < m; ++a) r2 += cv.centers[b * static_cast<size_t>(m) + static_cast<size_t>(a)] *
                                          cv.centers[b * static_cast<size_t>(m) + static_cast<size_t>(a)];
        wgt = norm * std::exp(-0.5 * r2);
      }
      sum += wgt * unit;
    }
    rep.levels.push_back({eps, sum, balls});
  }
  for (size_t i = 1; i < rep.levels.size(); ++i)
    if (rep.levels[i].value < 0.95 * rep.levels[i - 1].value) rep.eps_monotone = false;
  rep.value = rep.levels.back().value;
  return rep;
}

CoveringReport spherical_hausdorff(const RegionSpec& A, int m, double d, const CoveringSchedule& schedule) {
  if (!(d >= 0.0 && d <= m)) throw ValidationError("hausdorff: need 0 <= d <= m");
  return weighted_covering(A, m, d, schedule, false);
}

CoveringReport theta_dF(const RegionSpec& A, int m, double d, const CoveringSchedule& schedule) {
  if (!(d >= 0.0 && d <= m)) throw ValidationError("hausdorff: need 0 <= d <= m");
  return weighted_covering(A, m, static_cast<double>(m) - d, schedule, true);
}

std::vector<SubspacePair> default_subspace_family(int n, double d) {
  require(n >= 1, "hausdorff: n must be positive");
  if (!(d >= 0.0 && d <= n)) throw ValidationError("hausdorff: need 0 <= d <= n");
  std::vector<SubspacePair> out;
  const int lo = std::max(1, static_cast<int>(std::ceil(d)));
  for (int m = lo; m <= std::min(n, lo + 1); ++m) {
    // all m-subsets of the axes in lexicographic order
    std::vector<int> axes(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) axes[static_cast<size_t>(i)] = i;
    for (;;) {
      out.push_back(SubspacePair::coordinate(n, axes));
      int i = m - 1;
      while (i >= 0 && axes[static_cast<size_t>(i)] == n - m + i) --i;
      if (i < 0) break;
      ++axes[static_cast<size_t>(i)];
      for (int q = i + 1; q < m; ++q) axes[static_cast<size_t>(q)] = axes[static_cast<size_t>(q - 1)] + 1;
    }
  }
  return out;
}

GaussianHausdorffReport gaussian_hausdorff(const RegionSpec& A, int n, double d,
                                           const std::vector<SubspacePair>& family, int section_samples,
                                           const CoveringSchedule& schedule, std::uint64_t seed) {
  if (family.empty()) throw ValidationError("hausdorff: empty subspace family");
  if (!(d >= 0.0)) throw ValidationError("hausdorff: d must be nonnegative");
  require(section_samples >= 1, "hausdorff: section_samples must be positive");
  A.validate(n);
  schedule.validate();
  for (const auto& sp : family) {
    sp.validate(n);
    if (sp.dim() < d) throw ValidationError("hausdorff: every subspace must have dimension >= d");
  }

  GaussianHausdorffReport rep;
  rep.per_F.resize(family.size());
  parallel_for(family.size(), [&](size_t i) {
    const auto& sp = family[i];
    SubspaceEstimate est;
    est.basis = sp.F;
    const int m = sp.dim();
    const auto c = sp.complement.cols();
    if (c == 0) {
      est.value = theta_dF(A.section(sp.F, sp.complement, {}), m, d, schedule).value;
    } else {
      std::mt19937_64 rng(split_seed(seed, i));
      std::normal_distribution<double> gauss;
      std::vector<double> x(static_cast<size_t>(c));
      double sum = 0.0, sum2 = 0.0;
      for (int s = 0; s < section_samples; ++s) {
        for (auto& v : x) v = gauss(rng);
        const double v = theta_dF(A.section(sp.F, sp.complement, x), m, d, schedule).value;
        sum += v;
        sum2 += v * v;
      }
      const double N = section_samples;
      est.value = sum / N;
      const double var = N > 1 ? std::max(0.0, (sum2 - N * est.value * est.value) / (N - 1.0)) : 0.0;
      est.ci = 1.96 * std::sqrt(var / N);
    }
    rep.per_F[i] = std::move(est);
  });
  for (const auto& e : rep.per_F) rep.value = std::max(rep.value, e.value);
  return rep;
}

CodimReport codim_consistency(const RegionSpec& Sigma, int n, int m, double p, const std::vector<double>& d_list,
                              const SpectralGrid& sg, const std::vector<double>& margins, int section_samples,
                              const CoveringSchedule& schedule, std::uint64_t seed, double zero_threshold) {
  require(sg.grid().n == n, "codim: grid dimension differs from n");
  CodimReport rep;
  rep.d_values = d_list;
  if (Sigma.is_empty()) {
    rep.capacity_trend.assign(margins.size(), 0.0);
    rep.capacity_class = Trend::zero;
    rep.hausdorff_values.assign(d_list.size(), 0.0);
    rep.hypothesis_met = true;
    rep.note = "empty set; vacuously consistent";
    return rep;
  }
  const auto u = uniqueness_verdict(Sigma, m, p, sg, zero_threshold, margins);
  rep.capacity_trend = u.values;
  rep.capacity_class = u.trend;
  rep.hypothesis_met = u.trend == Trend::zero;
  const double limit = 2.0 * m * p;
  std::string positive;
  for (size_t i = 0; i < d_list.size(); ++i) {
    const double d = d_list[i];
    const auto g = gaussian_hausdorff(Sigma, n, d, default_subspace_family(n, d), section_samples, schedule,
                                      split_seed(seed, i));
    rep.hausdorff_values.push_back(g.value);
    if (d < limit && g.value > zero_threshold) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%g", positive.empty() ? "" : ", ", d);
      positive += buf;
    }
  }
  if (!rep.hypothesis_met) {
    rep.note = "hypothesis of corollary not met (capacity " + to_string(u.trend) + ")";
    if (!positive.empty()) rep.note += "; rho_d > 0 for d = " + positive + " agrees with positive capacity";
    return rep;
  }
  if (!positive.empty()) {
    rep.consistent = false;
    rep.note = "capacity tends to 0 but rho_d stays positive for d = " + positive;
  } else {
    rep.note = "capacity tends to 0 and every rho_d with d < 2mp vanishes";
  }
  return rep;
}

}  // namespace gausscap
