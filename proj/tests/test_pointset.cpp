#include "ddim/generators.hpp"
#include "ddim/pointset.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ddim;
using testing::make_points;

namespace {

// Monte Carlo measure of the union of delta-balls: uniform samples in the
// padded bounding box.
double mc_neighborhood(const PointSet& a, double delta, int samples, std::uint64_t seed) {
  const PointMatrix& p = a.points();
  const Eigen::RowVectorXd lo = p.colwise().minCoeff().array() - delta;
  const Eigen::RowVectorXd hi = p.colwise().maxCoeff().array() + delta;
  Rng rng(seed);
  Eigen::RowVectorXd x(p.cols());
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    for (Index k = 0; k < p.cols(); ++k) x(k) = rng.uniform(lo(k), hi(k));
    if (((p.rowwise() - x).rowwise().squaredNorm().array() <= delta * delta).any()) ++hits;
  }
  return (hi - lo).prod() * hits / samples;
}

PointSet grid3() { return gen_lattice(2, 2); }

}  // namespace

TEST_SUITE("pointset") {
  TEST_CASE("diameter examples") {
    CHECK(diameter(make_points({{0, 0}, {3, 4}})) == doctest::Approx(5.0));
    CHECK(diameter(make_points({{1, 2}})) == 0.0);
    CHECK(diameter(grid3()) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("min_separation examples") {
    CHECK(min_separation(make_points({{0, 0}, {3, 4}})) == doctest::Approx(5.0));
    CHECK(min_separation(grid3()) == doctest::Approx(1.0));
    CHECK(min_separation(gen_reciprocal_grid(10, Frame::separated)) == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
    CHECK_THROWS_AS(min_separation(make_points({{0, 0}})), InvalidInput);
  }

  TEST_CASE("construction validates input") {
    PointMatrix empty(0, 2);
    CHECK_THROWS_AS(PointSet{empty}, InvalidInput);
    PointMatrix bad(2, 2);
    bad << 0, 1, std::nan(""), 2;
    CHECK_THROWS_AS(PointSet{bad}, InvalidInput);
    bad << 0, 1, INFINITY, 2;
    CHECK_THROWS_AS(PointSet{bad}, InvalidInput);
  }

  TEST_CASE("rescale_to_unit") {
    const PointSet r = rescale_to_unit(make_points({{0, 0}, {0, 2}}));
    CHECK(r.points()(1, 1) == doctest::Approx(1.0));
    CHECK(r.points()(1, 0) == 0.0);
    CHECK(min_separation(rescale_to_unit(grid3())) == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK_THROWS_AS(rescale_to_unit(make_points({{0, 0}, {0, 0}})), SingularInput);
    CHECK_THROWS_AS(rescale_to_unit(make_points({{0, 0}})), InvalidInput);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PointSet a = testing::random_points(30, 3, seed, 7.0);
      const PointSet once = rescale_to_unit(a);
      const PointSet twice = rescale_to_unit(once);
      CHECK(std::abs(once.diameter() - 1.0) <= 1e-12);
      CHECK((once.points() - twice.points()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("diameter and separation are isometry invariant") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const int d = 1 + static_cast<int>(seed % 3);
      const PointSet a = testing::random_points(40, d, seed);
      const PointSet b = testing::random_isometry(a, seed + 100);
      CHECK(std::abs(a.diameter() - b.diameter()) <= 1e-9);
      CHECK(std::abs(a.min_separation() - b.min_separation()) <= 1e-9);
    }
  }

  TEST_CASE("cached values match a brute-force scan") {
    const PointSet a = testing::random_points(257, 2, 5);
    double lo = INFINITY, hi = 0;
    for (Index i = 0; i < a.size(); ++i) {
      for (Index j = i + 1; j < a.size(); ++j) {
        const double r = (a.point(i) - a.point(j)).norm();
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    CHECK(a.diameter() == doctest::Approx(hi).epsilon(1e-14));
    CHECK(a.min_separation() == doctest::Approx(lo).epsilon(1e-14));
  }

  TEST_CASE("neighborhood_measure examples") {
    const double pi = std::numbers::pi;
    const double delta = 0.1;
    const FattenedSet one(make_points({{0.3, 0.7}}), delta);
    CHECK(neighborhood_measure(one, delta / 10) == doctest::Approx(pi * delta * delta).epsilon(0.05));
    const FattenedSet two(make_points({{0, 0}, {10, 0}}), delta);
    CHECK(neighborhood_measure(two, delta / 10) == doctest::Approx(2 * pi * delta * delta).epsilon(0.05));

    PointMatrix line(11, 2);
    for (int i = 0; i <= 10; ++i) line.row(i) << 0.1 * i, 0.0;
    const PointSet seg(line);
    const double oracle = mc_neighborhood(seg, 0.05, 1000000, 11);
    // eleven tangent disks: no overlap, so the union is 11 pi delta^2
    CHECK(oracle == doctest::Approx(11 * pi * 0.05 * 0.05).epsilon(0.01));
    CHECK(neighborhood_measure(FattenedSet(seg, 0.05), 0.005) == doctest::Approx(oracle).epsilon(0.05));
  }

  TEST_CASE("neighborhood_measure rejects coarse grids and bad radii") {
    CHECK_THROWS_AS(neighborhood_measure(FattenedSet(make_points({{0, 0}}), 0.1), 0.05), InvalidInput);
    CHECK_THROWS_AS(FattenedSet(make_points({{0, 0}}), 0.0), InvalidInput);
    CHECK_THROWS_AS(FattenedSet(make_points({{0, 0}}), -1.0), InvalidInput);
  }

  TEST_CASE("neighborhood_measure is monotone in delta") {
    const PointSet a = testing::random_points(15, 2, 3);
    const double h = 0.002;
    double prev = 0.0;
    for (double delta = 0.01; delta <= 0.2; delta += 0.01) {
      const double m = neighborhood_measure(FattenedSet(a, delta), h);
      CHECK(m >= prev);
      prev = m;
    }
  }

  TEST_CASE("neighborhood_measure converges to the Monte Carlo oracle") {
    // Documented bound: relative error O(d * resolution / delta).
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int d = seed % 2 == 0 ? 2 : 3;
      const PointSet a = testing::random_points(5 + seed % 7, d, seed + 40);
      const double delta = 0.08;
      const int samples = 400000;
      const double oracle = mc_neighborhood(a, delta, samples, seed);
      const double box = std::pow(1.0 + 2 * delta, d);
      const double sigma = std::sqrt(oracle * (box - oracle) / samples);
      for (double h : {delta / 4, delta / 8, delta / 16}) {
        const double est = neighborhood_measure(FattenedSet(a, delta), h);
        CHECK(std::abs(est - oracle) <= d * h / delta * oracle + 4 * sigma);
      }
    }
  }

  TEST_CASE("uniform_minkowski_ratio") {
    const PointSet g = rescale_to_unit(grid3());
    const double delta = 0.25 / 3.0;
    const FattenedSet f(g, delta);
    // alpha = d: the ratio is the measure of nine disjoint disks, 9 pi delta^2
    const double r = uniform_minkowski_ratio(f, 2.0);
    CHECK(r == doctest::Approx(9 * std::numbers::pi * delta * delta).epsilon(0.05));
    CHECK(r <= 4.0);
    // for alpha < d the ratio stays bounded as the family grows
    for (int q : {2, 5, 10, 20}) {
      const PointSet g2 = rescale_to_unit(gen_lattice(2, q));
      const double n = double(g2.size());
      const double ratio = uniform_minkowski_ratio(FattenedSet(g2, 0.25 * std::pow(n, -1.0 / 1.5)), 1.5);
      CHECK(ratio <= 4.0);
    }
    CHECK(uniform_minkowski_ratio(f, 2.0, delta / 10) == doctest::Approx(neighborhood_measure(f, delta / 10)));
    const FattenedSet wide(g, 2 * delta);
    CHECK(uniform_minkowski_ratio(wide, 2.0, delta / 10) >= uniform_minkowski_ratio(f, 2.0, delta / 10));
    CHECK_THROWS_AS(uniform_minkowski_ratio(f, 2.5), InvalidInput);
    CHECK_THROWS_AS(uniform_minkowski_ratio(f, 0.0), InvalidInput);
  }

  TEST_CASE("nesting examples") {
    const PointSet a = testing::random_points(20, 2, 9);
    CHECK(nesting_check(a, 0.1, a, 0.05) == Nesting::nested);
    CHECK(nesting_check(a, 0.1, a, 0.1) == Nesting::indeterminate);

    const PointSet b = make_points({{0, 0}, {1, 0}});
    const PointSet shifted = make_points({{0, 5}, {1, 5}});
    CHECK(nesting_check(b, 0.01, shifted, 0.005) == Nesting::not_nested);

    SetFamily f;
    f.generator_id = "test";
    const PointSet small = make_points({{0, 0}, {1, 0}});
    const PointSet big = make_points({{0, 0}, {1, 0}, {0.5, 0.0}});
    f.members = {small, big};
    f.growth_values = {2, 3};
    // midpoint sits exactly on the outer radius 1/2: neither certificate applies
    CHECK(is_nested_family(f, 1.0).front() == Nesting::indeterminate);
  }

  TEST_CASE("fixed-ratio Cantor generations are nested at lambda 0.13") {
    SetFamily f = generate_family({"cantor_fixed", {{"lambda", 0.13}, {"M", {1, 2, 3, 4, 5}}}});
    for (Nesting n : is_nested_family(f, 1.0)) CHECK(n == Nesting::nested);
  }

  TEST_CASE("SetFamily validation") {
    SetFamily f;
    f.generator_id = "x";
    CHECK_THROWS_AS(f.validate(), InvalidInput);
    f.members = {make_points({{0}, {1}}), make_points({{0}, {2}})};
    f.growth_values = {1, 2};
    CHECK_THROWS_AS(f.validate(), InvalidInput);
    f.members[1] = make_points({{0}, {1}, {2}});
    CHECK_NOTHROW(f.validate());
    f.growth_values = {1};
    CHECK_THROWS_AS(f.validate(), InvalidInput);
  }
}
