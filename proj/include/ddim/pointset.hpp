#pragma once

#include "ddim/core.hpp"

#include <json.hpp>

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace ddim {

/// Immutable finite point set. Copies share storage; diameter and minimum
/// separation are computed once on first use (thread-safe).
class PointSet {
 public:
  /// points: N x d, N >= 1, d >= 1, all entries finite.
  explicit PointSet(PointMatrix points, std::string label = {});

  Index size() const { return pts_->rows(); }
  int dim() const { return static_cast<int>(pts_->cols()); }
  const PointMatrix& points() const { return *pts_; }
  auto point(Index i) const { return pts_->row(i); }
  const std::string& label() const { return label_; }

  double diameter() const;
  /// Throws InvalidInput when N = 1.
  double min_separation() const;

  PointSet scaled(double t) const;
  PointSet subset(std::span<const Index> rows) const;
  PointSet relabeled(std::string label) const;

 private:
  struct Cache {
    std::once_flag once;
    double diameter = 0.0;
    double min_sep = 0.0;
  };
  void fill_cache() const;

  std::shared_ptr<const PointMatrix> pts_;
  std::string label_;
  std::shared_ptr<Cache> cache_;
};

double diameter(const PointSet& a);
double min_separation(const PointSet& a);
/// a / diam(a). Requires N >= 2 and a positive diameter.
PointSet rescale_to_unit(const PointSet& a);

/// Indexed sequence of point sets from one generator.
struct SetFamily {
  std::vector<PointSet> members;
  std::string generator_id;
  nlohmann::json params = nlohmann::json::object();
  std::string growth_variable = "N";
  /// Value of the growth variable per member (equal to the sizes when the
  /// growth variable is N).
  std::vector<double> growth_values;

  std::vector<Index> sizes() const;
  std::size_t length() const { return members.size(); }
  /// Members non-empty, sizes strictly increasing, growth values aligned.
  void validate() const;
};

/// The delta-neighborhood of a point set, never materialized.
struct FattenedSet {
  FattenedSet(PointSet base, double delta);
  PointSet base;
  double delta;
};

/// Lebesgue measure of the union of closed delta-balls around the points,
/// counted on a grid of cubes of side `resolution` whose centers lie within
/// delta of some point. The grid is anchored at the bounding-box minimum of
/// the points (not at delta), so the estimate is exactly monotone in delta.
/// Relative error is O(d * resolution / delta). Requires resolution <= delta/4.
double neighborhood_measure(const FattenedSet& f, double resolution);

/// |F_delta| / delta^(d - alpha), alpha in (0, d]. resolution <= 0 selects
/// delta / 10.
double uniform_minkowski_ratio(const FattenedSet& f, double alpha, double resolution = 0.0);

enum class Nesting { nested, not_nested, indeterminate };
const char* to_string(Nesting n);

/// Certifies inner_delta-ball union of `inner` inside the outer_delta-ball
/// union of `outer`, both taken in the given coordinates: nested when every
/// inner point is within outer_delta - inner_delta - tol of an outer point,
/// not nested when some inner point is farther than outer_delta + tol from
/// every outer point (its own center lies outside), otherwise indeterminate.
Nesting nesting_check(const PointSet& outer, double outer_delta, const PointSet& inner, double inner_delta,
                      double tol = kDefaultTol);

/// Nesting of consecutive members rescaled to unit diameter, with fattening
/// radius N^(-1/alpha). Entry i compares member i+1 against member i.
std::vector<Nesting> is_nested_family(const SetFamily& f, double alpha, double tol = kDefaultTol);

/// For every row of `query`, the distance to the nearest row of `ref`.
Eigen::VectorXd nearest_distances(const PointMatrix& query, const PointMatrix& ref);

}  // namespace ddim
