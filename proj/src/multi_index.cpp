#include "gausscap/multi_index.hpp"

#include <algorithm>
#include <numeric>

#include "gausscap/error.hpp"

namespace gausscap {

MultiIndex::MultiIndex(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  for (int d : degrees_) require(d >= 0, "MultiIndex: negative degree");
  order_ = std::accumulate(degrees_.begin(), degrees_.end(), 0);
}

MultiIndex MultiIndex::raised(size_t axis) const {
  auto d = degrees_;
  ++d.at(axis);
  return MultiIndex(std::move(d));
}

std::optional<MultiIndex> MultiIndex::lowered(size_t axis) const {
  if (degrees_.at(axis) == 0) return std::nullopt;
  auto d = degrees_;
  --d[axis];
  return MultiIndex(std::move(d));
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  if (a.order() != b.order()) return a.order() < b.order();
  return a.degrees() < b.degrees();
}

namespace {

void enumerate_total(int n, int total, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  const int used = std::accumulate(prefix.begin(), prefix.end(), 0);
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(total - used);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int d = 0; d <= total - used; ++d) {
    prefix.push_back(d);
    enumerate_total(n, total, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MultiIndexSet::MultiIndexSet(int n, int max_degree) : n_(n), max_degree_(max_degree) {
  require(n >= 1, "MultiIndexSet: dimension must be >= 1");
  require(max_degree >= 0, "MultiIndexSet: degree must be >= 0");
  for (int total = 0; total <= max_degree; ++total) {
    std::vector<int> prefix;
    enumerate_total(n, total, prefix, indices_);
  }
  for (size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(indices_[i].degrees(), i);
}

std::optional<size_t> MultiIndexSet::position(const MultiIndex& alpha) const {
  if (auto it = lookup_.find(alpha.degrees()); it != lookup_.end()) return it->second;
  return std::nullopt;
}

}  // namespace gausscap
