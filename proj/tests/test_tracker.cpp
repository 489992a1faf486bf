// Parametric front tracker: semi-implicit V = -k + f steps, intersections,
// volume preservation and the tangent-ellipse experiment.

#include <catch2/catch_amalgamated.hpp>

#include <flatflow/tracker.hpp>

#include <random>

using namespace flatflow;

namespace {

double max_radius_dev(const TrackedCurve& c, Vec2 center, double r) {
  double dev = 0.0;
  for (const auto& p : c.pts)
    dev = std::max(dev, std::abs((p - center).norm() - r));
  return dev;
}

double cfl_dt(const CurveSystem& sys, double frac = 0.8) {
  double ms = std::numeric_limits<double>::infinity();
  for (const auto& c : sys.curves) ms = std::min(ms, c.min_spacing());
  return frac * 0.2 * ms * ms;
}

}  // namespace

TEST_CASE("cyclic tridiagonal solver matches dense elimination") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 12;
  const double a = -0.4, b = 2.0, c = -0.3;
  std::vector<double> d(n);
  for (auto& v : d) v = u(rng);
  auto x = detail::solve_cyclic_tridiagonal(a, b, c, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double lhs =
        a * x[(i + n - 1) % n] + b * x[i] + c * x[(i + 1) % n];
    CHECK(lhs == Catch::Approx(d[i]).margin(1e-10));
  }
}

TEST_CASE("curve primitives on a circle") {
  TrackedCurve c = TrackedCurve::circle({0.3, -0.2}, 1.0, 256);
  CHECK(c.length() == Catch::Approx(2.0 * M_PI).epsilon(1e-3));
  CHECK(c.signed_area() == Catch::Approx(M_PI).epsilon(1e-3));
  CHECK(c.total_turning() == Catch::Approx(2.0 * M_PI).margin(1e-9));
  CHECK(c.min_spacing() == Catch::Approx(2.0 * M_PI / 256).epsilon(0.01));
  for (double k : c.vertex_curvature())
    CHECK(k == Catch::Approx(1.0).epsilon(0.01));

  c.resample(128);
  CHECK(c.size() == 128);
  CHECK(c.length() == Catch::Approx(2.0 * M_PI).epsilon(1e-2));
}

TEST_CASE("mean curvature forcing") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::circle({0.0, 0.0}, 2.0, 512));
  CHECK(mean_curvature_forcing(sys) == Catch::Approx(0.5).epsilon(1e-3));
  sys.curves.push_back(TrackedCurve::circle({5.0, 0.0}, 2.0, 512));
  CHECK(mean_curvature_forcing(sys) == Catch::Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(mean_curvature_forcing(CurveSystem{}), EmptySetError);
}

TEST_CASE("intersection detection") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::circle({0.0, 0.0}, 1.0, 64));
  sys.curves.push_back(TrackedCurve::circle({3.0, 0.0}, 1.0, 64));
  CHECK_FALSE(curves_intersect(sys));
  sys.curves[1] = TrackedCurve::circle({1.5, 0.0}, 1.0, 64);
  CHECK(curves_intersect(sys));

  // self-intersecting bowtie
  CurveSystem bow;
  bow.curves.push_back(
      {{{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}});
  CHECK(curves_intersect(bow));
}

TEST_CASE("stationary circle under f = 1") {
  CurveSystem sys;
  sys.mode = TrackerMode::prescribed_forcing;
  sys.curves.push_back(TrackedCurve::circle({0.0, 0.0}, 1.0, 256));
  ForcingSpec f = ForcingSpec::constant(1.0);
  const double dt = cfl_dt(sys);
  sys = evolve(std::move(sys), dt, 1.0, TrackerParams{}, &f);
  CHECK_FALSE(sys.intersection_detected);
  CHECK(max_radius_dev(sys.curves[0], {0.0, 0.0}, 1.0) < 1e-6);
}

TEST_CASE("shrinking circle tracks the closed form") {
  CurveSystem sys;
  sys.mode = TrackerMode::prescribed_forcing;
  sys.curves.push_back(TrackedCurve::circle({0.0, 0.0}, 1.0, 256));
  ForcingSpec f = ForcingSpec::constant(0.0);
  // final spacing governs the CFL bound; size dt for r(0.45) ~ 0.316
  const double ds_final = 2.0 * M_PI * std::sqrt(1.0 - 0.9) / 256.0;
  const double dt = 0.5 * 0.2 * ds_final * ds_final;
  sys = evolve(std::move(sys), dt, 0.45, TrackerParams{}, &f);
  CHECK(max_radius_dev(sys.curves[0], {0.0, 0.0}, std::sqrt(1.0 - 0.9)) < 1e-3);
}

TEST_CASE("volume-preserving ellipse converges to the disk") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::ellipse({0.0, 0.0}, 1.0 / 1.2, 1.0, 256));
  const double a0 = sys.total_area();
  const double dt = cfl_dt(sys, 0.5);
  sys = evolve(std::move(sys), dt, 6.0, TrackerParams{});
  CHECK_FALSE(sys.intersection_detected);
  CHECK(std::abs(sys.total_area() - a0) / a0 < 0.005);
  const double r_lim = std::sqrt(a0 / M_PI);
  CHECK(max_radius_dev(sys.curves[0], {0.0, 0.0}, r_lim) < 5e-3);
}

TEST_CASE("tracker invariants along a volume-preserving run") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::ellipse({0.0, 0.0}, 0.8, 1.1, 192));
  const double dt = cfl_dt(sys, 0.5);
  double min_curv = 1e9;
  double worst_turning = 0.0;
  double worst_spacing_ratio = 1.0;
  auto observer = [&](const CurveSystem& s) {
    const auto& c = s.curves[0];
    for (double k : c.vertex_curvature()) min_curv = std::min(min_curv, k);
    worst_turning = std::max(
        worst_turning, std::abs(c.total_turning() - 2.0 * M_PI));
    double lo = 1e9, hi = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double l = (c.pts[(i + 1) % n] - c.pts[i]).norm();
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    worst_spacing_ratio = std::max(worst_spacing_ratio, hi / lo);
  };
  sys = evolve(std::move(sys), dt, 3.0, TrackerParams{}, nullptr, observer);
  CHECK(min_curv > 0.0);          // convexity preserved
  CHECK(worst_turning < 0.05);    // turning stays 2 pi
  CHECK(worst_spacing_ratio < 1.1);

  // bi-axial symmetry of the vertex set is preserved within spacing tolerance
  const auto& c = sys.curves[0];
  const double ds = c.length() / double(c.size());
  for (const auto& p : c.pts) {
    double best = 1e9;
    for (const auto& q : c.pts)
      best = std::min(best, (Vec2{-p.x, p.y} - q).norm());
    CHECK(best < ds);
  }
}

TEST_CASE("CFL guard") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::circle({0.0, 0.0}, 1.0, 64));
  const double ms = sys.curves[0].min_spacing();
  CHECK_THROWS_AS(tracker_step(sys, 1.0 * ms * ms, 0.0), StepTooLargeError);
  CHECK_THROWS_AS(tracker_step(sys, 0.0, 0.0), StepTooLargeError);
  CHECK_NOTHROW(tracker_step(sys, 0.1 * ms * ms, 0.0));
}

TEST_CASE("hausdorff_to_circles") {
  CurveSystem sys;
  sys.curves.push_back(TrackedCurve::circle({1.0, 0.0}, 0.5, 512));
  const double d0 = hausdorff_to_circles(sys, {{1.0, 0.0}}, 0.5);
  CHECK(d0 < 1e-4);
  const double d1 = hausdorff_to_circles(sys, {{1.0, 0.0}}, 0.6);
  CHECK(d1 == Catch::Approx(0.1).margin(1e-3));
}

TEST_CASE("theorem3_run tangent circles stay put for a = 1") {
  Theorem3Result res = theorem3_run(1.0, 0.1, 2e-5, 192, 0.05);
  CHECK_FALSE(res.intersection);
  CHECK(res.rho == 1.0);
  for (const auto& s : res.series) {
    CHECK(s.hausdorff_to_limit < 2e-3);
    CHECK(s.x1_gap > 0.0);
  }
}

TEST_CASE("theorem3_run a = 1.2 contracts toward the tangent disks") {
  const double a = 1.2;
  const double rho = 1.0 / std::sqrt(a);
  TrackedCurve probe = TrackedCurve::ellipse({0, 0}, 1.0 / a, 1.0, 192);
  const double ms = probe.min_spacing();
  const double dt = 0.5 * 0.2 * ms * ms;
  Theorem3Result res = theorem3_run(a, 4.0, dt, 192, 0.5);
  CHECK_FALSE(res.intersection);
  REQUIRE(res.series.size() >= 4);
  CHECK(res.series.front().hausdorff_to_limit > 0.05);
  CHECK(res.series.back().hausdorff_to_limit < 0.01 * rho);
  for (const auto& s : res.series) CHECK(s.x1_gap > 0.0);
  // area preserved, length decreasing
  const double a0 = res.series.front().area;
  CHECK(std::abs(res.series.back().area - a0) / a0 < 0.005);
  for (std::size_t i = 1; i < res.series.size(); ++i)
    CHECK(res.series[i].energy <= res.series[i - 1].energy + 1e-6);
  CHECK_THROWS_AS(theorem3_run(0.8, 1.0, 1e-4), std::invalid_argument);
}
