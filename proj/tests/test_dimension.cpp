#include "ddim/dimension.hpp"
#include "ddim/energy.hpp"
#include "ddim/generators.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ddim;
using testing::make_points;

namespace {

// Direct transcription of the removal rule: rescan all pairs after every
// removal.
PruneResult reference_prune(const PointSet& a, double alpha, double eps) {
  const Index n = a.size();
  const double diam = a.diameter();
  std::vector<Index> alive(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) alive[static_cast<std::size_t>(i)] = i;
  Index removed = 0;
  for (;;) {
    const double t = eps * std::pow(double(alive.size()), -1.0 / alpha) * diam;
    std::ptrdiff_t victim = -1;
    for (std::size_t i = 0; i < alive.size() && victim < 0; ++i) {
      for (std::size_t j = i + 1; j < alive.size(); ++j) {
        if ((a.point(alive[i]) - a.point(alive[j])).norm() < t) {
          victim = static_cast<std::ptrdiff_t>(j);
          break;
        }
      }
    }
    if (victim < 0) return {a.subset(alive), alive, removed, true};
    if (removed == n / 2) return {a.subset(alive), alive, removed, false};
    alive.erase(alive.begin() + victim);
    ++removed;
  }
}

// Points in a few tight clusters, so pruning has real work to do.
PointSet clustered(Index n, std::uint64_t seed) {
  Rng rng(seed);
  PointMatrix p(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double cx = double(rng.below(4)), cy = double(rng.below(4));
    p.row(i) << cx + 0.05 * rng.uniform(), cy + 0.05 * rng.uniform();
  }
  return PointSet(std::move(p));
}

SetFamily lattice_family() { return generate_family({"lattice", {{"d", 2}, {"q", {10, 20, 40, 80}}}}); }

}  // namespace

TEST_SUITE("dimension") {
  TEST_CASE("fit_exponent") {
    const std::vector<double> xs{1, 2, 5, 10, 30};
    std::vector<double> sq, flat(xs.size(), 4.0);
    for (double x : xs) sq.push_back(x * x);
    const LineFit f = fit_exponent(xs, sq);
    CHECK(std::abs(f.slope - 2.0) <= 1e-12);
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(std::abs(fit_exponent(xs, flat).slope) <= 1e-12);
    const std::vector<double> bad{1, -1, 3};
    CHECK_THROWS_AS(fit_exponent(bad, bad), InvalidInput);
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(fit_exponent(two, two), InvalidInput);

    const SetFamily lat = lattice_family();
    std::vector<double> n, diam;
    for (const auto& m : lat.members) {
      n.push_back(double(m.size()));
      diam.push_back(m.diameter());
    }
    CHECK(fit_exponent(n, diam).slope == doctest::Approx(0.5).epsilon(0.04));
  }

  TEST_CASE("student t quantile") {
    CHECK(student_t_quantile(0.95, 1e6) == doctest::Approx(1.959964).epsilon(1e-4));
    CHECK(student_t_quantile(0.95, 5) == doctest::Approx(2.570582).epsilon(1e-5));
  }

  TEST_CASE("default beta grid") {
    CHECK(default_beta_grid(1.0) == std::vector<double>{0.125, 0.25, 0.5, 0.75});
    CHECK(default_beta_grid(1.1) == std::vector<double>{0.125, 0.25, 0.5, 0.75, 1.0});
    CHECK(default_beta_grid(0.2) == std::vector<double>{0.125});
    CHECK(default_beta_grid(0.1) == std::vector<double>{0.05});
    for (double a = 0.15; a < 2.5; a += 0.05) {
      for (double b : default_beta_grid(a)) {
        const auto wider = default_beta_grid(a + 0.05);
        CHECK(std::find(wider.begin(), wider.end(), b) != wider.end());
      }
    }
  }

  TEST_CASE("Minkowski adaptability") {
    const SetFamily lat = lattice_family();
    CHECK(check_minkowski_adaptable(lat, 2.0).ok);
    CHECK(!check_minkowski_adaptable(lat, 2.5).ok);

    const SetFamily grid = generate_family({"reciprocal_grid", {{"M", {20, 40, 80, 160}}}});
    const AdaptabilityVerdict one = check_minkowski_adaptable(grid, 1.0);
    CHECK(one.diam_fit.slope == doctest::Approx(1.0).epsilon(0.05));
    CHECK(one.ok);
    CHECK(!check_minkowski_adaptable(grid, 2.0).ok);

    const SetFamily van = generate_family({"cantor_vanishing", {{"lambda", 0.2}, {"M", {3, 4, 5, 6, 7, 8}}}});
    const AdaptabilityVerdict v = check_minkowski_adaptable(van, 0.1);
    CHECK(v.diam_diverging);
    CHECK(!v.ok);

    CHECK_THROWS_AS(check_minkowski_adaptable(lat, 0.0), InvalidInput);
  }

  TEST_CASE("Hausdorff adaptability") {
    const SetFamily lat = lattice_family();
    const std::vector<double> betas{0.5, 1.0};
    const AdaptabilityVerdict v = check_hausdorff_adaptable(lat, 2.0, betas);
    CHECK(v.energy_checked);
    REQUIRE(v.energy_fits.size() == 2);
    CHECK(v.ok);
    for (const auto& e : v.energy_fits) CHECK(std::abs(e.fit.slope) <= kDefaultSlopeTol);

    // Near beta = d the ratio approaches its limit like N^((beta - d) / d): the
    // slope is still above tol at desk scale but shrinks as the family grows.
    const std::vector<double> near{1.5};
    const SetFamily few = generate_family({"lattice", {{"d", 2}, {"q", {10, 20, 40}}}});
    const SetFamily many = generate_family({"lattice", {{"d", 2}, {"q", {20, 40, 80}}}});
    const double s_few = check_hausdorff_adaptable(few, 2.0, near).energy_fits[0].fit.slope;
    const double s_many = check_hausdorff_adaptable(many, 2.0, near).energy_fits[0].fit.slope;
    CHECK(s_many > 0.0);
    CHECK(s_many < 0.85 * s_few);

    const SetFamily grid = generate_family({"reciprocal_grid", {{"M", {20, 40, 80, 160}}}});
    const std::vector<double> small{0.5};
    const AdaptabilityVerdict g = check_hausdorff_adaptable(grid, 1.0, small);
    REQUIRE(g.energy_checked);
    CHECK(g.energy_fits[0].fit.slope == doctest::Approx(0.25).epsilon(0.3));
    CHECK(!g.ok);

    const SetFamily cantor = generate_family({"cantor_fixed", {{"lambda", 0.125}, {"M", {2, 3, 4, 5, 6}}}});
    const AdaptabilityVerdict c = check_hausdorff_adaptable(cantor, 1.0);
    CHECK(!c.diam_condition_ok);
    CHECK(!c.energy_checked);
    CHECK(!c.ok);

    const std::vector<double> bad{1.0};
    CHECK_THROWS_AS(check_hausdorff_adaptable(lat, 1.0, bad), InvalidInput);
  }

  TEST_CASE("adaptability is monotone in alpha") {
    const std::vector<SetFamily> families{
        lattice_family(),
        generate_family({"delone", {{"d", 2}, {"q", {10, 20, 40}}}}),
        generate_family({"reciprocal_grid", {{"M", {20, 40, 80}}}}),
        generate_family({"cantor_fixed", {{"lambda", 1.0 / 9}, {"M", {3, 4, 5, 6}}}}),
    };
    for (const auto& f : families) {
      FamilyProfile profile(f);
      bool seen_pass = false;
      for (double alpha = 2.0; alpha >= 0.1; alpha -= 0.1) {
        const bool mink = check_minkowski_adaptable(profile, alpha).ok;
        const bool haus = check_hausdorff_adaptable(profile, alpha).ok;
        if (seen_pass) CHECK(mink);
        if (haus) CHECK(mink);
        seen_pass = seen_pass || mink;
      }
    }
  }

  TEST_CASE("prune examples") {
    const PruneResult r = prune_to_separation(make_points({{0}, {0.01}, {1}}), 1.0, 0.5);
    CHECK(r.achieved);
    CHECK(r.removed == 1);
    CHECK(r.kept == std::vector<Index>{0, 2});
    CHECK(r.subset.size() == 2);

    const PointSet g = gen_lattice(2, 5);
    const PruneResult same = prune_to_separation(g, 2.0, 0.5);
    CHECK(same.removed == 0);
    CHECK(same.achieved);
    CHECK(same.subset.size() == g.size());

    CHECK_THROWS_AS(prune_to_separation(g, 0.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(prune_to_separation(g, 1.0, 0.0), InvalidInput);
  }

  TEST_CASE("prune matches the reference procedure") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const PointSet a = seed % 2 == 0 ? clustered(60 + seed, seed) : testing::random_points(80, 2, seed);
      for (double eps : {0.3, 0.7, 2.0}) {
        const PruneResult fast = prune_to_separation(a, 2.0, eps);
        const PruneResult slow = reference_prune(a, 2.0, eps);
        CHECK(fast.kept == slow.kept);
        CHECK(fast.removed == slow.removed);
        CHECK(fast.achieved == slow.achieved);
      }
    }
  }

  TEST_CASE("prune contract on Delone-like sets") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PointSet a = gen_delone(2, 12, 0.4, seed, Frame::natural);
      // below this eps, N/2 removals would force the unit-diameter energy past its actual value
      const double eps = 0.9 * std::pow(4.0 * riesz_sum(a, 2.0).scale_invariant_ratio, -0.5);
      const PruneResult r = prune_to_separation(a, 2.0, eps);
      CHECK(r.achieved);
      CHECK(r.removed <= a.size() / 2);
    }
  }

  TEST_CASE("alpha grid") {
    const auto g = alpha_values({}, 2);
    CHECK(g.front() == doctest::Approx(0.1));
    CHECK(g.back() == doctest::Approx(2.0));
    CHECK(g.size() == 39);
    CHECK_THROWS_AS(alpha_values({0.0, 0.05, 0.0}, 2), InvalidInput);
  }

  TEST_CASE("lattice estimates reach the ambient dimension") {
    const SetFamily lat = lattice_family();
    const DimensionEstimate h = estimate_hausdorff_dimension(lat, default_strategies(lat));
    // the slope test on betas close to d is what stops the scan short of 2 here
    CHECK(h.value >= 1.0);
    CHECK(h.value < 2.0);
    CHECK(h.strategy_used == "identity");
    const DimensionEstimate m = estimate_minkowski_dimension(lat, default_strategies(lat));
    CHECK(m.value == doctest::Approx(2.0));
  }

  TEST_CASE("reciprocal grid: the tail strategy recovers a high Hausdorff estimate") {
    const SetFamily grid = generate_family({"reciprocal_grid", {{"M", {40, 60, 80, 100}}}});
    const DimensionEstimate plain = estimate_hausdorff_dimension(grid, {identity_strategy()});
    const DimensionEstimate tail = estimate_hausdorff_dimension(grid, {reciprocal_tail_strategy(0.2)});
    CHECK(plain.value < 0.5);
    CHECK(tail.value >= 1.9 - 1e-9);
    CHECK(tail.strategy_used == "reciprocal_tail(eps=0.2)");
  }

  TEST_CASE("vanishing Cantor estimates are zero") {
    const SetFamily van = generate_family({"cantor_vanishing", {{"lambda", 0.2}, {"M", {3, 4, 5, 6, 7, 8}}}});
    const auto strategies = default_strategies(van);
    CHECK(strategies.size() == 4);
    CHECK(estimate_hausdorff_dimension(van, strategies).value == 0.0);
    CHECK(estimate_minkowski_dimension(van, strategies).value == 0.0);
  }

  TEST_CASE("Hausdorff estimate never exceeds the Minkowski estimate") {
    const std::vector<SetFamily> families{
        lattice_family(),
        generate_family({"reciprocal_grid", {{"M", {20, 40, 80}}}}),
        generate_family({"cantor_fixed", {{"lambda", 1.0 / 9}, {"M", {3, 4, 5, 6}}}}),
    };
    for (const auto& f : families) {
      const auto s = default_strategies(f);
      CHECK(estimate_hausdorff_dimension(f, s).value <= estimate_minkowski_dimension(f, s).value);
    }
  }

  TEST_CASE("box counting") {
    const std::vector<double> one{1.0, 0.9};
    CHECK(box_counting(make_points({{0, 0}, {1, 0}}), one).counts[0] == 1.0);
    CHECK(box_count(make_points({{0, 0}, {1, 0}}), 0.99) == 1.0);

    PointMatrix p(10000, 2);
    Rng rng(5);
    for (Index i = 0; i < p.rows(); ++i) p.row(i) << rng.uniform(), rng.uniform();
    std::vector<double> mid;
    for (int k = 2; k <= 5; ++k) mid.push_back(std::ldexp(1.0, -k));
    const BoxCountReport r = box_counting(PointSet(p), mid);
    CHECK(r.fitted_dimension == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r.ci_low <= r.fitted_dimension);
    CHECK(r.ci_high >= r.fitted_dimension);

    std::vector<double> seq;
    for (int k = 4; k <= 12; ++k) seq.push_back(std::ldexp(1.0, -k));
    const BoxCountReport s = box_counting(gen_reciprocal_sequence(1.0, 10000), seq);
    CHECK(std::abs(s.fitted_dimension - 0.5) <= 0.07);

    const std::vector<double> empty;
    CHECK_THROWS_AS(box_counting(PointSet(p), empty), InvalidInput);
    const std::vector<double> up{0.1, 0.2};
    CHECK_THROWS_AS(box_counting(PointSet(p), up), InvalidInput);
  }
}
