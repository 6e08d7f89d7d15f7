#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cgcv {

/// Stream generator. mt19937_64 is fully specified by the standard, and all
/// distributions drawn from it in this library come from Boost.Random, so
/// draws are identical across platforms and standard libraries.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the stream addressed by `path` under `seed`, e.g.
/// derive_seed(seed, {rep, k, m}). Distinct paths give unrelated streams.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Engine(derive_seed(seed, path));
}

/// Strictly increasing row indices into [0, n).
class IndexSet {
 public:
  IndexSet() = default;
  // Validates: strictly increasing, all < n.
  IndexSet(std::vector<int> indices, int n);

  const std::vector<int>& indices() const noexcept { return indices_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  int universe() const noexcept { return n_; }
  int operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<int> indices_;
  int n_ = 0;
};

/// Uniform size-k subset of [0, n) via partial Fisher-Yates.
IndexSet draw_subsample(int n, int k, Engine& rng);

/// M i.i.d. uniform size-k subsets of [0, n); draw m uses stream
/// derive_seed(seed, {m}).
std::vector<IndexSet> draw_subsamples(int n, int k, int M, std::uint64_t seed);

int intersection_size(const IndexSet& a, const IndexSet& b);

/// Sorted union of all sets.
std::vector<int> union_indices(const std::vector<const IndexSet*>& sets);

}  // namespace cgcv
