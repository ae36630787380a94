#pragma once

// Exact O(N^2) pairwise kernels over the rows of a point matrix.
//
// Blocking: rows are grouped into fixed tasks of kRowsPerTask rows. Inside a
// row the terms j > i are accumulated into four interleaved lanes, rows are
// added in order inside a task, and task partials are combined with
// tree_sum(). None of this depends on the worker count, so every result here
// is bit-identical across thread counts. Against a naive double loop the
// results agree to ~1e-12 relative (different summation order).
//
// Exponents that are multiples of 1/4 are evaluated with square roots only;
// all other exponents go through exp(-beta/2 * log r^2).

#include "ddim/core.hpp"
#include "ddim/parallel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace ddim {

inline constexpr Index kRowsPerTask = 32;

template <typename Scalar>
struct PairExtrema {
  Scalar min_sq = std::numeric_limits<Scalar>::infinity();
  Scalar max_sq = Scalar(0);
};

namespace detail {

// Largest eighth-multiple exponent (in eighths) with a dedicated sqrt-only path.
inline constexpr int kMaxEighth = 48;

inline int eighth_index(double beta) {
  const double m = beta * 8.0;
  if (m < 0.0 || m > kMaxEighth) return -1;
  const double r = std::round(m);
  return r == m ? static_cast<int>(r) : -1;
}

// Powers r, r^(1/2), r^(1/4), r^(1/8) for one row, from r^2.
template <typename Scalar>
struct RootChain {
  const Scalar* r2;
  const Scalar* r;
  const Scalar* h;
  const Scalar* q;
  const Scalar* e;
};

// r^(-M/8) from its root chain, using only multiplications. Every path
// multiplies in the same order, so shared and per-exponent sums agree bitwise.
template <int M, typename Scalar>
inline Scalar eighth_term(Scalar r2, Scalar r, Scalar h, Scalar q, Scalar e) {
  if constexpr (M == 0) {
    return Scalar(1);
  } else {
    constexpr int whole = M / 16;
    constexpr int rem = M % 16;
    Scalar denom(1);
    for (int k = 0; k < whole; ++k) denom *= r2;
    if constexpr ((rem & 8) != 0) denom *= r;
    if constexpr ((rem & 4) != 0) denom *= h;
    if constexpr ((rem & 2) != 0) denom *= q;
    if constexpr ((rem & 1) != 0) denom *= e;
    return Scalar(1) / denom;
  }
}

// Same value as eighth_term with the roots taken on the fly, skipping unused levels.
template <int M, typename Scalar>
inline Scalar eighth_term(Scalar r2) {
  constexpr int rem = M % 16;
  Scalar r(0), h(0), q(0), e(0);
  if constexpr (rem != 0) r = std::sqrt(r2);
  if constexpr ((rem & 7) != 0) h = std::sqrt(r);
  if constexpr ((rem & 3) != 0) q = std::sqrt(h);
  if constexpr ((rem & 1) != 0) e = std::sqrt(q);
  return eighth_term<M>(r2, r, h, q, e);
}

// Sum of term(j) over j < n in four fixed lanes.
template <typename Scalar, typename Term>
inline Scalar lane_sum_at(Index n, Term term) {
  Scalar l0(0), l1(0), l2(0), l3(0);
  Index j = 0;
  for (; j + 4 <= n; j += 4) {
    l0 += term(j);
    l1 += term(j + 1);
    l2 += term(j + 2);
    l3 += term(j + 3);
  }
  Scalar tail(0);
  for (; j < n; ++j) tail += term(j);
  return ((l0 + l1) + (l2 + l3)) + tail;
}

template <typename Scalar, typename Term>
inline Scalar lane_sum(const Scalar* values, Index n, Term term) {
  return lane_sum_at<Scalar>(n, [values, &term](Index j) { return term(values[j]); });
}

template <typename Scalar, int M>
Scalar eighth_row_sum(const Scalar* r2, Index n) {
  return lane_sum(r2, n, [](Scalar v) { return eighth_term<M>(v); });
}

template <typename Scalar, int M>
Scalar eighth_row_sum_chain(const RootChain<Scalar>& c, Index n) {
  return lane_sum_at<Scalar>(n, [&c](Index j) { return eighth_term<M>(c.r2[j], c.r[j], c.h[j], c.q[j], c.e[j]); });
}

template <typename Scalar, std::size_t... Ms>
constexpr auto make_eighth_table(std::index_sequence<Ms...>) {
  using Fn = Scalar (*)(const Scalar*, Index);
  return std::array<Fn, sizeof...(Ms)>{&eighth_row_sum<Scalar, static_cast<int>(Ms)>...};
}

template <typename Scalar, std::size_t... Ms>
constexpr auto make_chain_table(std::index_sequence<Ms...>) {
  using Fn = Scalar (*)(const RootChain<Scalar>&, Index);
  return std::array<Fn, sizeof...(Ms)>{&eighth_row_sum_chain<Scalar, static_cast<int>(Ms)>...};
}

template <typename Scalar>
Scalar chain_row_sum(int m, const RootChain<Scalar>& c, Index n) {
  static constexpr auto table = make_chain_table<Scalar>(std::make_index_sequence<kMaxEighth + 1>{});
  return table[static_cast<std::size_t>(m)](c, n);
}

template <typename Scalar>
Scalar riesz_row_sum(double beta, const Scalar* r2, const Scalar* log_r2, Index n) {
  static constexpr auto table = make_eighth_table<Scalar>(std::make_index_sequence<kMaxEighth + 1>{});
  const int m = eighth_index(beta);
  if (m >= 0) return table[static_cast<std::size_t>(m)](r2, n);
  const Scalar h = Scalar(-0.5 * beta);
  return lane_sum(log_r2, n, [h](Scalar v) { return std::exp(h * v); });
}

// Squared distances from row i to rows i+1..N-1, written into out.
template <typename Mat>
void row_squared_distances(const Mat& pts, Index i, typename Mat::Scalar* out) {
  using Scalar = typename Mat::Scalar;
  const Index n = pts.rows();
  const Index m = n - i - 1;
  for (Index j = 0; j < m; ++j) out[j] = Scalar(0);
  for (Index k = 0; k < pts.cols(); ++k) {
    const Scalar* col = pts.col(k).data() + i + 1;
    const Scalar xi = pts(i, k);
    for (Index j = 0; j < m; ++j) {
      const Scalar diff = col[j] - xi;
      out[j] += diff * diff;
    }
  }
}

template <typename Scalar>
void update_extrema(PairExtrema<Scalar>& e, const Scalar* r2, Index m) {
  for (Index j = 0; j < m; ++j) {
    e.min_sq = r2[j] < e.min_sq ? r2[j] : e.min_sq;
    e.max_sq = r2[j] > e.max_sq ? r2[j] : e.max_sq;
  }
}

template <typename Scalar>
void merge_extrema(PairExtrema<Scalar>& into, const PairExtrema<Scalar>& other) {
  into.min_sq = std::min(into.min_sq, other.min_sq);
  into.max_sq = std::max(into.max_sq, other.max_sq);
}

inline std::size_t task_count(Index n) {
  return static_cast<std::size_t>((n + kRowsPerTask - 1) / kRowsPerTask);
}

}  // namespace detail

/// Smallest and largest squared distance over distinct pairs (i < j).
template <typename Derived>
PairExtrema<typename Derived::Scalar> pair_extrema(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Ref<const PointMatrixT<Scalar>> pts(points.derived());
  const Index n = pts.rows();
  const std::size_t tasks = detail::task_count(n);
  std::vector<PairExtrema<Scalar>> partial(tasks);
  parallel_for(tasks, [&](std::size_t t) {
    std::vector<Scalar> r2(static_cast<std::size_t>(n));
    PairExtrema<Scalar> e;
    const Index begin = static_cast<Index>(t) * kRowsPerTask;
    const Index end = std::min(n, begin + kRowsPerTask);
    for (Index i = begin; i < end; ++i) {
      detail::row_squared_distances(pts, i, r2.data());
      detail::update_extrema(e, r2.data(), n - i - 1);
    }
    partial[t] = e;
  });
  PairExtrema<Scalar> result;
  for (const auto& e : partial) detail::merge_extrema(result, e);
  return result;
}

/// Unordered-pair Riesz sums sum_{i<j} |x_i - x_j|^(-beta), one per beta, in
/// a single pass over the pairs. When extrema is non-null it receives the
/// pair extrema of the same pass. Coincident points make the sums infinite;
/// callers check extrema->min_sq.
template <typename Derived>
std::vector<typename Derived::Scalar> riesz_pair_sums(const Eigen::MatrixBase<Derived>& points,
                                                      std::span<const double> betas,
                                                      PairExtrema<typename Derived::Scalar>* extrema = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Ref<const PointMatrixT<Scalar>> pts(points.derived());
  const Index n = pts.rows();
  const std::size_t nb = betas.size();
  bool need_log = false;
  std::size_t eighths = 0;
  bool need_e = false;
  for (double b : betas) {
    const int e8 = detail::eighth_index(b);
    need_log = need_log || e8 < 0;
    eighths += e8 >= 0 ? 1 : 0;
    need_e = need_e || (e8 >= 0 && e8 % 2 == 1);
  }
  // With several eighth-multiple exponents the root chain is computed once per pair.
  const bool shared = eighths > 1;

  const std::size_t tasks = detail::task_count(n);
  std::vector<Scalar> partial(tasks * nb, Scalar(0));
  std::vector<PairExtrema<Scalar>> partial_ext(tasks);
  parallel_for(tasks, [&](std::size_t t) {
    std::vector<Scalar> r2(static_cast<std::size_t>(n));
    std::vector<Scalar> lg(need_log ? static_cast<std::size_t>(n) : 0);
    const std::size_t root_len = shared ? static_cast<std::size_t>(n) : 0;
    std::vector<Scalar> rr(root_len), rh(root_len), rq(root_len), re(root_len);
    const detail::RootChain<Scalar> chain{r2.data(), rr.data(), rh.data(), rq.data(), re.data()};
    PairExtrema<Scalar> e;
    const Index begin = static_cast<Index>(t) * kRowsPerTask;
    const Index end = std::min(n, begin + kRowsPerTask);
    for (Index i = begin; i < end; ++i) {
      const Index m = n - i - 1;
      detail::row_squared_distances(pts, i, r2.data());
      detail::update_extrema(e, r2.data(), m);
      if (need_log) {
        for (Index j = 0; j < m; ++j) lg[j] = std::log(r2[j]);
      }
      if (shared) {
        for (Index j = 0; j < m; ++j) rr[j] = std::sqrt(r2[j]);
        for (Index j = 0; j < m; ++j) rh[j] = std::sqrt(rr[j]);
        for (Index j = 0; j < m; ++j) rq[j] = std::sqrt(rh[j]);
        if (need_e) {
          for (Index j = 0; j < m; ++j) re[j] = std::sqrt(rq[j]);
        }
      }
      for (std::size_t b = 0; b < nb; ++b) {
        const int e8 = detail::eighth_index(betas[b]);
        partial[t * nb + b] += shared && e8 >= 0 ? detail::chain_row_sum(e8, chain, m)
                                                 : detail::riesz_row_sum(betas[b], r2.data(), lg.data(), m);
      }
    }
    partial_ext[t] = e;
  });

  std::vector<Scalar> sums(nb);
  std::vector<double> column(tasks);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t t = 0; t < tasks; ++t) column[t] = static_cast<double>(partial[t * nb + b]);
    sums[b] = static_cast<Scalar>(tree_sum(column));
  }
  if (extrema != nullptr) {
    PairExtrema<Scalar> e;
    for (const auto& pe : partial_ext) detail::merge_extrema(e, pe);
    *extrema = e;
  }
  return sums;
}

/// Convenience single-exponent form of riesz_pair_sums().
template <typename Derived>
typename Derived::Scalar riesz_pair_sum(const Eigen::MatrixBase<Derived>& points, double beta) {
  const double b[1] = {beta};
  return riesz_pair_sums(points, std::span<const double>(b, 1)).front();
}

}  // namespace ddim
