#include "ddim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace ddim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CellKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Uniform grid over the points; cells of side `cell` hold ascending indices.
class CellGrid {
 public:
  CellGrid(const PointMatrix& p, double cell) : p_(p), cell_(cell), lo_(p.colwise().minCoeff()) {
    std::vector<std::int64_t> key(p.cols());
    for (Index i = 0; i < p.rows(); ++i) {
      key_of(i, key);
      cells_[key].push_back(i);
    }
  }

  // Calls fn(j) for every point j in the 3^d cells around point i.
  template <typename Fn>
  void for_neighbors(Index i, Fn&& fn) const {
    const Index d = p_.cols();
    std::vector<std::int64_t> center(d), key(d), off(d, -1);
    key_of(i, center);
    for (;;) {
      for (Index k = 0; k < d; ++k) key[k] = center[k] + off[k];
      const auto it = cells_.find(key);
      if (it != cells_.end()) {
        for (Index j : it->second) fn(j);
      }
      Index k = d - 1;
      while (k >= 0 && off[k] == 1) {
        off[k] = -1;
        --k;
      }
      if (k < 0) return;
      ++off[k];
    }
  }

 private:
  void key_of(Index i, std::vector<std::int64_t>& key) const {
    for (Index k = 0; k < p_.cols(); ++k) {
      key[k] = static_cast<std::int64_t>(std::floor((p_(i, k) - lo_(k)) / cell_));
    }
  }

  const PointMatrix& p_;
  double cell_;
  Eigen::RowVectorXd lo_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<Index>, CellKeyHash> cells_;
};

// Min-segment tree with a leftmost-below-threshold query.
class MinTree {
 public:
  explicit MinTree(Index n) {
    size_ = 1;
    while (size_ < n) size_ *= 2;
    t_.assign(2 * static_cast<std::size_t>(size_), kInf);
  }
  void set(Index i, double v) {
    std::size_t x = static_cast<std::size_t>(i + size_);
    t_[x] = v;
    for (x /= 2; x >= 1; x /= 2) t_[x] = std::min(t_[2 * x], t_[2 * x + 1]);
  }
  // Smallest index with value < t, or -1.
  Index leftmost_below(double t) const {
    if (!(t_[1] < t)) return -1;
    std::size_t x = 1;
    while (x < static_cast<std::size_t>(size_)) x = t_[2 * x] < t ? 2 * x : 2 * x + 1;
    return static_cast<Index>(x) - size_;
  }

 private:
  Index size_;
  std::vector<double> t_;
};

}  // namespace

PruneResult prune_to_separation(const PointSet& a, double alpha, double eps) {
  if (!(alpha > 0.0)) throw InvalidInput("prune_to_separation: alpha must be positive");
  if (!(eps > 0.0)) throw InvalidInput("prune_to_separation: eps must be positive");
  const Index n = a.size();
  const PointMatrix& p = a.points();
  const double diam = a.diameter();
  const Index max_removed = n / 2;
  auto threshold = [&](Index alive) { return eps * std::pow(static_cast<double>(alive), -1.0 / alpha) * diam; };

  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  Index removed = 0;
  bool achieved = true;
  if (n >= 2 && diam > 0.0) {
    // The threshold only grows as points go; it never exceeds its value at
    // N - max_removed survivors, so one grid of that side suffices.
    const double t_max = threshold(n - max_removed);
    const CellGrid grid(p, t_max);
    auto dist = [&](Index i, Index j) { return (p.row(i) - p.row(j)).norm(); };

    // nearest[i]: nearest alive j > i within t_max (distance kInf if none).
    std::vector<Index> nearest(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<Index>> watchers(static_cast<std::size_t>(n));
    MinTree tree(n);
    auto refresh = [&](Index i) {
      double best = kInf;
      Index arg = -1;
      grid.for_neighbors(i, [&](Index j) {
        if (j <= i || !alive[static_cast<std::size_t>(j)]) return;
        const double r = dist(i, j);
        if (r < best || (r == best && j < arg)) {
          best = r;
          arg = j;
        }
      });
      nearest[static_cast<std::size_t>(i)] = arg;
      if (arg >= 0) watchers[static_cast<std::size_t>(arg)].push_back(i);
      tree.set(i, best);
    };
    for (Index i = 0; i < n; ++i) refresh(i);

    for (;;) {
      const double t = threshold(n - removed);
      const Index i = tree.leftmost_below(t);
      if (i < 0) break;
      if (removed == max_removed) {
        achieved = false;
        break;
      }
      Index j = -1;
      grid.for_neighbors(i, [&](Index k) {
        if (k <= i || !alive[static_cast<std::size_t>(k)]) return;
        if ((j < 0 || k < j) && dist(i, k) < t) j = k;
      });
      alive[static_cast<std::size_t>(j)] = 0;
      ++removed;
      tree.set(j, kInf);
      std::vector<Index> w;
      w.swap(watchers[static_cast<std::size_t>(j)]);
      for (Index k : w) {
        if (alive[static_cast<std::size_t>(k)] && nearest[static_cast<std::size_t>(k)] == j) refresh(k);
      }
    }
  }

  PruneResult r{a, {}, removed, achieved};
  for (Index i = 0; i < n; ++i) {
    if (alive[static_cast<std::size_t>(i)]) r.kept.push_back(i);
  }
  if (removed > 0) r.subset = a.subset(r.kept);
  return r;
}

}  // namespace ddim
