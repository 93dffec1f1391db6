#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace gausscap {

/// Hermite degrees per axis. Indexes the eigenbasis of the OU semigroup.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> degrees);

  [[nodiscard]] const std::vector<int>& degrees() const { return degrees_; }
  [[nodiscard]] int operator[](size_t i) const { return degrees_[i]; }
  [[nodiscard]] size_t dimension() const { return degrees_.size(); }
  /// Total degree |alpha|.
  [[nodiscard]] int order() const { return order_; }

  [[nodiscard]] MultiIndex raised(size_t axis) const;
  [[nodiscard]] std::optional<MultiIndex> lowered(size_t axis) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Graded lexicographic order: total degree first, then lexicographic.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b);

 private:
  std::vector<int> degrees_;
  int order_ = 0;
};

/// All multi-indices of dimension n with |alpha| <= K in graded-lex order.
class MultiIndexSet {
 public:
  MultiIndexSet(int n, int max_degree);

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] int max_degree() const { return max_degree_; }
  [[nodiscard]] size_t size() const { return indices_.size(); }
  [[nodiscard]] const MultiIndex& operator[](size_t i) const { return indices_[i]; }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const { return indices_; }
  [[nodiscard]] std::optional<size_t> position(const MultiIndex& alpha) const;

  [[nodiscard]] auto begin() const { return indices_.begin(); }
  [[nodiscard]] auto end() const { return indices_.end(); }

 private:
  int n_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::map<std::vector<int>, size_t> lookup_;
};

}  // namespace gausscap
