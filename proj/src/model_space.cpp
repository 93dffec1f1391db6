#include "gausscap/model_space.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gausscap/error.hpp"
#include "gausscap/gauss_rules.hpp"

namespace gausscap {

namespace {

constexpr int kMaxQ = 400;
constexpr double kMaxNodes = 1 << 22;

}  // namespace

void GaussModelSpace::validate() const {
  require(n >= 1, "model space: n must be >= 1");
  require(K >= 0, "model space: K must be >= 0");
  require(Q >= K + 1, "model space: Q must be >= K + 1 (got Q=" + std::to_string(Q) +
                          ", K=" + std::to_string(K) + ")");
}

double hermite_eval(int k, double x) {
  require(k >= 0, "hermite_eval: degree must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) /
                        std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_table(int K, double x, std::span<double> out) {
  out[0] = 1.0;
  if (K >= 1) out[1] = x;
  for (int j = 1; j < K; ++j)
    out[j + 1] = (x * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
}

double QuadGrid::spacing() const {
  double gap = 0.0;
  for (size_t i = 1; i < axis_nodes.size(); ++i) {
    const double g = axis_nodes[i] - axis_nodes[i - 1];
    if (gap == 0.0 || g < gap) gap = g;
  }
  return gap;
}

QuadGrid build_grid(const GaussModelSpace& space) {
  require(space.n >= 1, "build_grid: n must be >= 1");
  require(space.Q >= 1, "build_grid: Q must be >= 1");
  if (space.Q > kMaxQ)
    throw NumericalError("build_grid: Q=" + std::to_string(space.Q) +
                         " exceeds the stable limit " + std::to_string(kMaxQ) +
                         " (smallest weights underflow)");
  const double total = std::pow(static_cast<double>(space.Q), space.n);
  if (total > kMaxNodes)
    throw ValidationError("build_grid: Q^n = " + std::to_string(total) + " nodes is too many");

  const auto rule = gauss_hermite(space.Q);
  // sanity on the 1D rule; catches underflow and lost symmetry
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    if (!(rule.weights[i] > 0.0) || !std::isfinite(rule.nodes[i]))
      throw NumericalError("build_grid: non-positive weight at Q=" + std::to_string(space.Q));
    s0 += rule.weights[i];
    s1 += rule.weights[i] * rule.nodes[i];
    s2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  }
  const bool second_ok = space.Q < 2 || std::abs(s2 - 1.0) < 1e-10;
  if (std::abs(s0 - 1.0) > 1e-12 || std::abs(s1) > 1e-10 || !second_ok)
    throw NumericalError("build_grid: moment check failed at Q=" + std::to_string(space.Q));

  QuadGrid g;
  g.n = space.n;
  g.axis_nodes = rule.nodes;
  g.axis_weights = rule.weights;
  const auto N = static_cast<Eigen::Index>(total);
  g.nodes.resize(N, space.n);
  g.weights.resize(N);
  std::vector<int> idx(static_cast<size_t>(space.n), 0);
  for (Eigen::Index j = 0; j < N; ++j) {
    double w = 1.0;
    for (int a = 0; a < space.n; ++a) {
      g.nodes(j, a) = rule.nodes[static_cast<size_t>(idx[static_cast<size_t>(a)])];
      w *= rule.weights[static_cast<size_t>(idx[static_cast<size_t>(a)])];
    }
    g.weights(j) = w;
    for (int a = space.n - 1; a >= 0; --a) {
      if (++idx[static_cast<size_t>(a)] < space.Q) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
  return g;
}

HermiteExpansion::HermiteExpansion(GaussModelSpace space, std::shared_ptr<const MultiIndexSet> basis,
                                   Eigen::VectorXd coeffs)
    : space_(space), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  require(basis_ != nullptr, "HermiteExpansion: null basis");
  require(basis_->dimension() == space_.n && basis_->max_degree() == space_.K,
          "HermiteExpansion: basis does not match the model space");
  require(static_cast<size_t>(coeffs_.size()) == basis_->size(),
          "HermiteExpansion: coefficient count does not match the basis");
}

double HermiteExpansion::coeff(const MultiIndex& alpha) const {
  if (alpha.dimension() != static_cast<size_t>(space_.n)) return 0.0;
  if (auto pos = basis_->position(alpha)) return coeffs_(static_cast<Eigen::Index>(*pos));
  return 0.0;
}

HermiteExpansion HermiteExpansion::with_coeffs(Eigen::VectorXd coeffs) const {
  return {space_, basis_, std::move(coeffs)};
}

double eval(const HermiteExpansion& u, std::span<const double> x) {
  const int n = u.space().n;
  const int K = u.space().K;
  if (x.size() != static_cast<size_t>(n))
    throw ValidationError("eval: point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(n));
  std::vector<double> table(static_cast<size_t>(n * (K + 1)));
  for (int a = 0; a < n; ++a)
    hermite_table(K, x[static_cast<size_t>(a)],
                  std::span<double>(table).subspan(static_cast<size_t>(a * (K + 1)),
                                                   static_cast<size_t>(K + 1)));
  double sum = 0.0;
  const auto& basis = u.basis();
  for (size_t m = 0; m < basis.size(); ++m) {
    const double c = u.coeffs()(static_cast<Eigen::Index>(m));
    if (c == 0.0) continue;
    double prod = c;
    for (int a = 0; a < n; ++a) prod *= table[static_cast<size_t>(a * (K + 1) + basis[m][static_cast<size_t>(a)])];
    sum += prod;
  }
  return sum;
}

SpectralGrid::SpectralGrid(GaussModelSpace space) : space_(space) {
  space_.validate();
  grid_ = build_grid(space_);
  basis_ = std::make_shared<const MultiIndexSet>(space_.n, space_.K);

  const int n = space_.n;
  const int K = space_.K;
  const int Q = space_.Q;
  // h_k at every 1D node, shared by all axes
  std::vector<double> axis_table(static_cast<size_t>(Q * (K + 1)));
  for (int i = 0; i < Q; ++i)
    hermite_table(K, grid_.axis_nodes[static_cast<size_t>(i)],
                  std::span<double>(axis_table).subspan(static_cast<size_t>(i * (K + 1)),
                                                        static_cast<size_t>(K + 1)));

  const auto N = static_cast<Eigen::Index>(grid_.size());
  const auto M = static_cast<Eigen::Index>(basis_->size());
  basis_at_nodes_.resize(N, M);
  orders_.resize(M);
  for (Eigen::Index m = 0; m < M; ++m) orders_(m) = (*basis_)[static_cast<size_t>(m)].order();

  std::vector<int> idx(static_cast<size_t>(n), 0);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index m = 0; m < M; ++m) {
      const auto& alpha = (*basis_)[static_cast<size_t>(m)];
      double prod = 1.0;
      for (int a = 0; a < n; ++a)
        prod *= axis_table[static_cast<size_t>(idx[static_cast<size_t>(a)] * (K + 1) + alpha[static_cast<size_t>(a)])];
      basis_at_nodes_(j, m) = prod;
    }
    for (int a = n - 1; a >= 0; --a) {
      if (++idx[static_cast<size_t>(a)] < Q) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
}

HermiteExpansion SpectralGrid::zero() const {
  return {space_, basis_, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size()))};
}

HermiteExpansion SpectralGrid::from_coeffs(Eigen::VectorXd coeffs) const {
  return {space_, basis_, std::move(coeffs)};
}

HermiteExpansion SpectralGrid::expand_nodal(const Eigen::VectorXd& values) const {
  require(values.size() == static_cast<Eigen::Index>(node_count()),
          "expand: nodal vector has the wrong length");
  Eigen::VectorXd c = basis_at_nodes_.transpose() * grid_.weights.cwiseProduct(values);
  return {space_, basis_, std::move(c)};
}

Eigen::VectorXd SpectralGrid::nodal_values(const HermiteExpansion& u) const {
  require(u.space() == space_, "nodal_values: expansion belongs to another model space");
  return basis_at_nodes_ * u.coeffs();
}

Eigen::VectorXd SpectralGrid::sample(const ScalarField& f) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(node_count()));
  for (size_t j = 0; j < node_count(); ++j) v(static_cast<Eigen::Index>(j)) = f(grid_.node(j));
  return v;
}

double SpectralGrid::lp_norm(const Eigen::VectorXd& values, double p) const {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  double s = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) s += grid_.weights(j) * std::pow(std::abs(values(j)), p);
  return std::pow(s, 1.0 / p);
}

HermiteExpansion expand(const ScalarField& f, const SpectralGrid& sg) {
  return sg.expand_nodal(sg.sample(f));
}

nlohmann::ordered_json expansion_to_json(const HermiteExpansion& u) {
  nlohmann::ordered_json j;
  j["n"] = u.space().n;
  j["K"] = u.space().K;
  auto entries = nlohmann::ordered_json::array();
  for (size_t m = 0; m < u.basis().size(); ++m)
    entries.push_back({u.basis()[m].degrees(), u.coeffs()(static_cast<Eigen::Index>(m))});
  j["entries"] = std::move(entries);
  return j;
}

HermiteExpansion expansion_from_json(const nlohmann::json& j, const SpectralGrid& sg) {
  require(j.is_object() && j.contains("n") && j.contains("K") && j.contains("entries"),
          "expansion json: expected {n, K, entries}");
  require(j["n"].get<int>() == sg.space().n, "expansion json: dimension mismatch");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sg.basis_size()));
  for (const auto& e : j["entries"]) {
    require(e.is_array() && e.size() == 2, "expansion json: entry must be [degrees, coeff]");
    MultiIndex alpha(e[0].get<std::vector<int>>());
    auto pos = sg.basis().position(alpha);
    if (!pos) {
      require(e[1].get<double>() == 0.0, "expansion json: coefficient beyond degree K");
      continue;
    }
    c(static_cast<Eigen::Index>(*pos)) = e[1].get<double>();
  }
  return sg.from_coeffs(std::move(c));
}

}  // namespace gausscap
