#include "cgcv/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>

#include "cgcv/errors.hpp"

namespace cgcv {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t tag : path) h = mix64(h ^ mix64(tag + 0x632be59bd9b4e019ULL));
  return h;
}

IndexSet::IndexSet(std::vector<int> indices, int n) : indices_(std::move(indices)), n_(n) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= n) {
      throw Error(ErrorKind::InvalidInput, "index " + std::to_string(indices_[i]) +
                                               " outside [0, " + std::to_string(n) + ")");
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw Error(ErrorKind::InvalidInput, "index set must be strictly increasing");
    }
  }
}

IndexSet draw_subsample(int n, int k, Engine& rng) {
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidInput, "subsample size must satisfy 1 <= k <= n");
  }
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return IndexSet(std::move(pool), n);
}

std::vector<IndexSet> draw_subsamples(int n, int k, int M, std::uint64_t seed) {
  if (M < 1) throw Error(ErrorKind::InvalidInput, "ensemble size M must be >= 1");
  if (k < 1 || k > n) {
    throw Error(ErrorKind::InvalidInput, "subsample size must satisfy 1 <= k <= n");
  }
  std::vector<IndexSet> sets;
  sets.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    Engine rng = make_engine(seed, {static_cast<std::uint64_t>(m)});
    sets.push_back(draw_subsample(n, k, rng));
  }
  return sets;
}

int intersection_size(const IndexSet& a, const IndexSet& b) {
  int count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

std::vector<int> union_indices(const std::vector<const IndexSet*>& sets) {
  std::vector<int> out;
  for (const IndexSet* s : sets) out.insert(out.end(), s->begin(), s->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cgcv
