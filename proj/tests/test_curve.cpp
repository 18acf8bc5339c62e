#include <catch_amalgamated.hpp>

#include <otconv/curve.hpp>
#include <otconv/measure.hpp>
#include <otconv/sampler.hpp>
#include <otconv/transport.hpp>

#include <cmath>

using namespace otconv;

namespace {

DiscreteMeasure uniform_on(std::vector<Point> points) {
  const std::size_t n = points.size();
  return DiscreteMeasure(std::move(points), std::vector<double>(n, 1.0 / n));
}

// Two mass-half particles travelling 0 -> 1 and 1 -> 0.
AccelerationFreeCurve crossing_pair() {
  const DiscreteMeasure mu = uniform_on({{0.0}, {1.0}});
  return curve_from_plan(TransportPlan(mu, mu, {{0, 1, 0.5}, {1, 0, 0.5}}));
}

}  // namespace

TEST_CASE("curve from identity plan is constant") {
  SampleRng rng(3);
  const DiscreteMeasure mu = random_measure(rng, 4, 2);
  const AccelerationFreeCurve curve = curve_from_plan(identity_plan(mu));
  CHECK(curve.plan_cost() == 0.0);
  for (const Particle& p : curve.particles())
    CHECK(squared_norm(p.displacement) == 0.0);
  for (double t : {0.0, 0.3, 1.0}) {
    const DiscreteMeasure snapshot = eval(curve, t);
    REQUIRE(snapshot.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      CHECK(distance(snapshot.atom(i), mu.atom(i)) <= 1e-15);
  }
}

TEST_CASE("dirac-to-dirac curve interpolates linearly") {
  const AccelerationFreeCurve curve =
      curve_from_plan(solve_w2(dirac({0.0}), dirac({1.0})).plan);
  const DiscreteMeasure quarter = eval(curve, 0.25);
  REQUIRE(quarter.size() == 1);
  CHECK(quarter.atom(0)[0] == 0.25);
}

TEST_CASE("crossing particles merge into a single atom at the crossing") {
  const AccelerationFreeCurve curve = crossing_pair();
  CHECK(curve.plan_cost() == Catch::Approx(1.0).margin(1e-15));
  const DiscreteMeasure mid = eval(curve, 0.5);
  REQUIRE(mid.size() == 1);
  CHECK(mid.atom(0)[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(mid.weight(0) == 1.0);
}

TEST_CASE("eval validates the parameter range") {
  const AccelerationFreeCurve curve = crossing_pair();
  CHECK_THROWS_AS(eval(curve, -0.01), OutOfRange);
  CHECK_THROWS_AS(eval(curve, 1.01), OutOfRange);
  CHECK(eval(curve, 0.0).size() == 2);
  CHECK(eval(curve, 1.0).size() == 2);
}

TEST_CASE("crossing times") {
  SECTION("single particle curve has none") {
    const AccelerationFreeCurve curve =
        curve_from_plan(solve_w2(dirac({0.0}), dirac({1.0})).plan);
    CHECK(crossing_times(curve).empty());
  }
  SECTION("crossing pair meets exactly at one half") {
    const auto times = crossing_times(crossing_pair());
    REQUIRE(times.size() == 1);
    CHECK(times[0] == 0.5);
  }
  SECTION("parallel particles never cross") {
    const DiscreteMeasure mu = uniform_on({{0.0}, {1.0}});
    const DiscreteMeasure nu = uniform_on({{2.0}, {3.0}});
    const AccelerationFreeCurve curve =
        curve_from_plan(TransportPlan(mu, nu, {{0, 0, 0.5}, {1, 1, 0.5}}));
    CHECK(crossing_times(curve).empty());
  }
  SECTION("higher-dimensional near miss is not a crossing") {
    const DiscreteMeasure mu = uniform_on({{0.0, 0.0}, {1.0, 0.5}});
    const DiscreteMeasure nu = uniform_on({{1.0, 0.0}, {0.0, 0.5}});
    const AccelerationFreeCurve curve =
        curve_from_plan(TransportPlan(mu, nu, {{0, 0, 0.5}, {1, 1, 0.5}}));
    CHECK(crossing_times(curve).empty());  // lines differ in the second component
  }
}

TEST_CASE("restriction_is_geodesic") {
  SECTION("geodesics restrict to geodesics") {
    SampleRng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = rng.uniform_int(1, 3);
      const AccelerationFreeCurve geo =
          geodesic(random_measure(rng, rng.uniform_int(2, 4), d),
                   random_measure(rng, rng.uniform_int(2, 4), d));
      REQUIRE(geo.kind() == CurveKind::Geodesic);
      CHECK(restriction_is_geodesic(geo, 0.0, 1.0));
      CHECK(restriction_is_geodesic(geo, 0.2, 0.7));
    }
  }
  SECTION("the crossing pair is not a unit-time geodesic") {
    // Both endpoints are the same measure, so W2 = 0 while plan_cost = 1.
    CHECK_FALSE(restriction_is_geodesic(crossing_pair(), 0.0, 1.0));
  }
  SECTION("the crossing pair is a geodesic within the certified radius") {
    CHECK(restriction_is_geodesic(crossing_pair(), 0.0, 0.25));
  }
  SECTION("interval validation") {
    CHECK_THROWS_AS(restriction_is_geodesic(crossing_pair(), 0.5, 0.5), OutOfRange);
    CHECK_THROWS_AS(restriction_is_geodesic(crossing_pair(), -0.1, 0.5), OutOfRange);
  }
}

TEST_CASE("local geodesic radius") {
  SECTION("constant curve") {
    SampleRng rng(9);
    const AccelerationFreeCurve curve =
        curve_from_plan(identity_plan(random_measure(rng, 3, 2)));
    CHECK(local_geodesic_radius(curve, 0.0, Direction::Forward) == 0.5);
    CHECK(local_geodesic_radius(curve, 1.0, Direction::Backward) == 0.5);
  }
  SECTION("crossing pair") {
    const AccelerationFreeCurve curve = crossing_pair();
    CHECK(local_geodesic_radius(curve, 0.0, Direction::Forward) == 0.25);
    CHECK(local_geodesic_radius(curve, 0.5, Direction::Forward) == 0.25);
    CHECK(local_geodesic_radius(curve, 0.5, Direction::Backward) == 0.25);
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(local_geodesic_radius(crossing_pair(), 1.0, Direction::Forward),
                    OutOfRange);
    CHECK_THROWS_AS(local_geodesic_radius(crossing_pair(), 0.0, Direction::Backward),
                    OutOfRange);
  }
}

TEST_CASE("radius verification halves past planar optimality loss") {
  // Two particles in the plane whose lines never cross, yet the diagonal
  // coupling stops being optimal after t = 1/3: the swap condition
  // <a_0 - b_0, a_t - b_t> = 1 - 3t turns negative while the second
  // component keeps the lines apart. The first candidate (half the full
  // interval) must fail verification and halve once more.
  const DiscreteMeasure mu({{1.0, 0.0}, {0.0, 0.0}}, {0.5, 0.5});
  const DiscreteMeasure nu({{-2.0, 0.01}, {0.0, 0.0}}, {0.5, 0.5});
  const AccelerationFreeCurve curve =
      curve_from_plan(TransportPlan(mu, nu, {{0, 0, 0.5}, {1, 1, 0.5}}));
  REQUIRE(crossing_times(curve).empty());
  CHECK_FALSE(restriction_is_geodesic(curve, 0.0, 0.5));
  CHECK(local_geodesic_radius(curve, 0.0, Direction::Forward) == 0.25);
}

TEST_CASE("restrictions inside a certified radius are geodesics") {
  SampleRng rng(505);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = rng.uniform_int(1, 3);
    const DiscreteMeasure mu = random_measure(rng, rng.uniform_int(2, 4), d);
    const DiscreteMeasure nu = random_measure(rng, rng.uniform_int(2, 4), d);
    const AccelerationFreeCurve curve =
        curve_from_plan(random_feasible_plan(rng, mu, nu));
    for (double s : {0.0, 0.4}) {
      const double radius = local_geodesic_radius(curve, s, Direction::Forward);
      for (double fraction : {0.5, 1.0})
        REQUIRE(restriction_is_geodesic(curve, s, s + fraction * radius));
    }
  }
}

TEST_CASE("generalized geodesics") {
  SECTION("equal inputs give a constant curve") {
    SampleRng rng(21);
    const DiscreteMeasure mu = random_measure(rng, 3, 2);
    const AccelerationFreeCurve curve = generalized_geodesic(mu, mu, mu);
    CHECK(curve.kind() == CurveKind::GeneralizedGeodesic);
    CHECK(curve.plan_cost() == 0.0);
  }
  SECTION("dirac base yields the straight line between targets") {
    const AccelerationFreeCurve curve =
        generalized_geodesic(dirac({0.0}), dirac({2.0}), dirac({5.0}));
    REQUIRE(curve.particles().size() == 1);
    CHECK(eval(curve, 0.5).atom(0)[0] == Catch::Approx(3.5).margin(1e-15));
  }
  SECTION("endpoints reproduce the second and third measures") {
    SampleRng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      const DiscreteMeasure mu1 = random_measure(rng, 3, 2, 1.0, true);
      const DiscreteMeasure mu2 = random_measure(rng, 3, 2, 1.0, true);
      const DiscreteMeasure mu3 = random_measure(rng, 3, 2, 1.0, true);
      const AccelerationFreeCurve curve = generalized_geodesic(mu1, mu2, mu3);
      const DiscreteMeasure start = eval(curve, 0.0);
      const DiscreteMeasure end = eval(curve, 1.0);
      REQUIRE(start.size() == mu2.size());
      REQUIRE(end.size() == mu3.size());
      for (std::size_t i = 0; i < start.size(); ++i) {
        const std::size_t j = mu2.nearest_atom(start.atom(i));
        CHECK(distance(start.atom(i), mu2.atom(j)) <= 1e-12);
        CHECK(std::abs(start.weight(i) - mu2.weight(j)) <= 1e-12);
      }
      for (std::size_t i = 0; i < end.size(); ++i) {
        const std::size_t j = mu3.nearest_atom(end.atom(i));
        CHECK(distance(end.atom(i), mu3.atom(j)) <= 1e-12);
        CHECK(std::abs(end.weight(i) - mu3.weight(j)) <= 1e-12);
      }
    }
  }
  SECTION("base equal to the first endpoint recovers the geodesic cost") {
    SampleRng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
      const int d = rng.uniform_int(1, 3);
      const DiscreteMeasure mu2 = random_measure(rng, rng.uniform_int(2, 4), d);
      const DiscreteMeasure mu3 = random_measure(rng, rng.uniform_int(2, 4), d);
      const AccelerationFreeCurve curve = generalized_geodesic(mu2, mu2, mu3);
      REQUIRE(std::abs(curve.plan_cost() - solve_w2(mu2, mu3).cost) <= 1e-9);
    }
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(generalized_geodesic(dirac({0.0}), dirac({0.0, 0.0}), dirac({1.0})),
                    DimensionMismatch);
  }
}

TEST_CASE("gluing splits into product couplings, not monotone reorderings") {
  // A base atom that splits mass in both plans induces the independent
  // product coupling between the split pieces, so the generalized geodesic
  // carries crossing pairs that a plain geodesic between the endpoints would
  // sort out.
  const DiscreteMeasure base = dirac({0.0});
  const DiscreteMeasure left({{-1.0}, {1.0}}, {0.5, 0.5});
  const DiscreteMeasure right({{-2.0}, {2.0}}, {0.5, 0.5});
  const AccelerationFreeCurve curve = generalized_geodesic(base, left, right);
  REQUIRE(curve.particles().size() == 4);  // 2 x 2 product pairs
  double cross_mass = 0.0;
  for (const Particle& p : curve.particles())
    if (p.start[0] * (p.start[0] + p.displacement[0]) < 0.0) cross_mass += p.mass;
  CHECK(cross_mass == Catch::Approx(0.5).margin(1e-15));
  // The product coupling costs more than the monotone one.
  CHECK(curve.plan_cost() > solve_w2(left, right).cost + 0.5);
}

TEST_CASE("mass is conserved along every curve") {
  SampleRng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = rng.uniform_int(1, 3);
    const DiscreteMeasure mu = random_measure(rng, rng.uniform_int(2, 5), d);
    const DiscreteMeasure nu = random_measure(rng, rng.uniform_int(2, 5), d);
    const AccelerationFreeCurve curve =
        curve_from_plan(random_feasible_plan(rng, mu, nu));
    for (int k = 0; k <= 10; ++k) {
      const DiscreteMeasure snapshot = eval(curve, k / 10.0);
      double total = 0.0;
      for (double w : snapshot.weights()) total += w;
      REQUIRE(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("plan restriction bounds the Wasserstein distance") {
  SampleRng rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = rng.uniform_int(1, 3);
    const DiscreteMeasure mu = random_measure(rng, rng.uniform_int(2, 4), d);
    const DiscreteMeasure nu = random_measure(rng, rng.uniform_int(2, 4), d);
    const bool optimal = trial % 2 == 0;
    const AccelerationFreeCurve curve =
        optimal ? geodesic(mu, nu)
                : curve_from_plan(random_feasible_plan(rng, mu, nu));
    const double speed = std::sqrt(curve.plan_cost());
    for (auto [s, t] : {std::pair{0.0, 1.0}, {0.1, 0.6}, {0.3, 0.9}}) {
      const double w2 = solve_w2(eval(curve, s), eval(curve, t)).w2;
      REQUIRE(w2 <= (t - s) * speed + 1e-9);
      if (optimal) REQUIRE(w2 == Catch::Approx((t - s) * speed).margin(1e-9));
    }
  }
}

TEST_CASE("monotone one-dimensional geodesics have no interior crossings") {
  SampleRng rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteMeasure mu = random_measure(rng, rng.uniform_int(2, 5), 1);
    const DiscreteMeasure nu = random_measure(rng, rng.uniform_int(2, 5), 1);
    const auto times = crossing_times(geodesic(mu, nu));
    for (double q : times) REQUIRE((q == 0.0 || q == 1.0));
  }
}

TEST_CASE("certified optimal plans upgrade curves to geodesic kind") {
  SampleRng rng(404);
  const DiscreteMeasure mu = random_measure(rng, 3, 2);
  const DiscreteMeasure nu = random_measure(rng, 3, 2);
  const W2Solution sol = solve_w2(mu, nu);
  CHECK(curve_from_plan(sol.plan).kind() == CurveKind::FromPlan);
  CHECK(curve_from_plan(sol.plan, true).kind() == CurveKind::Geodesic);
  const DiscreteMeasure two({{0.0}, {1.0}}, {0.5, 0.5});
  const TransportPlan swap(two, two, {{0, 1, 0.5}, {1, 0, 0.5}});
  CHECK(curve_from_plan(swap, true).kind() == CurveKind::FromPlan);
}
