/// @file tracker.hpp
/// @brief Parametric front tracker for V = -k + f(t) on closed curves,
///        including the volume-preserving mode f(t) = average curvature.
///
/// Each step treats the curvature term implicitly along the curve (cyclic
/// tridiagonal solve per coordinate) and the forcing explicitly, then
/// resamples to uniform arclength; tangential motion is absorbed by the
/// resampling. Intersections (self or cross) stop the flow with a flag.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <unordered_map>

#include "core.hpp"
#include "forcing.hpp"

namespace flatflow {

/// Closed polyline curve; `pts` does not repeat the first point.
struct TrackedCurve {
  std::vector<Vec2> pts;

  std::size_t size() const { return pts.size(); }

  double length() const {
    double l = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
      l += (pts[(i + 1) % n] - pts[i]).norm();
    return l;
  }

  double signed_area() const {
    double a = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
      a += pts[i].cross(pts[(i + 1) % n]);
    return 0.5 * a;
  }

  double min_spacing() const {
    double m = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i)
      m = std::min(m, (pts[(i + 1) % n] - pts[i]).norm());
    return m;
  }

  /// Sum of exterior angles; +-2*pi for simple loops (exact for polylines).
  double total_turning() const {
    const std::size_t n = pts.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e0 = pts[(i + 1) % n] - pts[i];
      const Vec2 e1 = pts[(i + 2) % n] - pts[(i + 1) % n];
      total += std::atan2(e0.cross(e1), e0.dot(e1));
    }
    return total;
  }

  /// Discrete curvature per vertex: exterior angle over the mean of the two
  /// adjacent edge lengths.
  std::vector<double> vertex_curvature() const {
    const std::size_t n = pts.size();
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e0 = pts[i] - pts[(i + n - 1) % n];
      const Vec2 e1 = pts[(i + 1) % n] - pts[i];
      const double ds = 0.5 * (e0.norm() + e1.norm());
      if (ds > 0.0) k[i] = std::atan2(e0.cross(e1), e0.dot(e1)) / ds;
    }
    return k;
  }

  /// Redistributes n vertices at uniform arclength, anchored at pts[0].
  void resample(std::size_t n) {
    const std::size_t m = pts.size();
    if (m < 3) throw DegenerateContourError("curve has fewer than 3 vertices");
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      cum[i + 1] = cum[i] + (pts[(i + 1) % m] - pts[i]).norm();
    const double total = cum[m];
    if (total <= 0.0) throw DegenerateContourError("curve has zero length");
    std::vector<Vec2> out(n);
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = total * double(j) / double(n);
      while (seg + 1 < m && cum[seg + 1] < s) ++seg;
      const Vec2 a = pts[seg], b = pts[(seg + 1) % m];
      const double ls = cum[seg + 1] - cum[seg];
      const double t = ls > 0.0 ? (s - cum[seg]) / ls : 0.0;
      out[j] = a + (b - a) * t;
    }
    pts = std::move(out);
  }

  /// Counterclockwise ellipse with semi-axes (rx, ry), n vertices at uniform
  /// arclength. `phase` in [0,1) offsets the parametric seed so no vertex
  /// lands on a symmetry axis exactly.
  static TrackedCurve ellipse(Vec2 c, double rx, double ry, std::size_t n,
                              double phase = 0.5) {
    TrackedCurve curve;
    const std::size_t dense = std::max<std::size_t>(8 * n, 1024);
    curve.pts.resize(dense);
    for (std::size_t j = 0; j < dense; ++j) {
      const double th = 2.0 * M_PI * (double(j) + phase) / double(dense);
      curve.pts[j] = {c.x + rx * std::cos(th), c.y + ry * std::sin(th)};
    }
    curve.resample(n);
    return curve;
  }

  static TrackedCurve circle(Vec2 c, double r, std::size_t n,
                             double phase = 0.5) {
    return ellipse(c, r, r, n, phase);
  }
};

enum class TrackerMode { prescribed_forcing, volume_preserving };

struct CurveSystem {
  std::vector<TrackedCurve> curves;
  double t = 0.0;
  TrackerMode mode = TrackerMode::volume_preserving;
  bool intersection_detected = false;

  double total_length() const {
    double l = 0.0;
    for (const auto& c : curves) l += c.length();
    return l;
  }
  double total_area() const {
    double a = 0.0;
    for (const auto& c : curves) a += c.signed_area();
    return a;
  }
};

/// f(t) = average of curvature over the whole boundary, computed as
/// (total turning)/(total length) = 2 pi N / L, exact for polylines.
inline double mean_curvature_forcing(const CurveSystem& sys) {
  if (sys.curves.empty()) throw EmptySetError();
  double turning = 0.0, len = 0.0;
  for (const auto& c : sys.curves) {
    turning += c.total_turning();
    len += c.length();
  }
  if (len <= 0.0) throw DegenerateContourError("zero total length");
  return turning / len;
}

namespace detail {

/// Solves the cyclic tridiagonal system with constant coefficients
/// a x_{i-1} + b x_i + c x_{i+1} = d_i (indices mod n) by the rank-one
/// correction of the open tridiagonal solve.
inline std::vector<double> solve_cyclic_tridiagonal(double a, double b,
                                                    double c,
                                                    const std::vector<double>& d) {
  const std::size_t n = d.size();
  if (n < 3) throw FlatFlowError("cyclic tridiagonal solve needs n >= 3");
  const double gamma = -b;
  std::vector<double> bb(n, b);
  bb[0] = b - gamma;
  bb[n - 1] = b - a * c / gamma;

  auto tri = [&](std::vector<double> rhs) {
    std::vector<double> cp(n);
    cp[0] = c / bb[0];
    rhs[0] /= bb[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = bb[i] - a * cp[i - 1];
      cp[i] = c / m;
      rhs[i] = (rhs[i] - a * rhs[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
    return rhs;
  };

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = c;
  std::vector<double> y = tri(d);
  const std::vector<double> z = tri(u);
  const double vy = y[0] + (a / gamma) * y[n - 1];
  const double vz = z[0] + (a / gamma) * z[n - 1];
  const double fact = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) y[i] -= fact * z[i];
  return y;
}

inline bool segments_touch(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); };
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0) != (d2 > 0)) && d1 != 0 && d2 != 0 &&
      ((d3 > 0) != (d4 > 0)) && d3 != 0 && d4 != 0)
    return true;
  auto on = [&](Vec2 a, Vec2 b, Vec2 c) {
    return orient(a, b, c) == 0.0 && (c - a).dot(c - b) <= 0.0;
  };
  return on(p1, p2, q1) || on(p1, p2, q2) || on(q1, q2, p1) || on(q1, q2, p2);
}

}  // namespace detail

/// Exact intersection test over all curves (self and cross), accelerated by
/// a uniform spatial hash on segments. Adjacent segments of the same curve
/// share endpoints and are not reported.
inline bool curves_intersect(const CurveSystem& sys) {
  struct Seg {
    int curve;
    std::size_t idx;
    Vec2 a, b;
  };
  std::vector<Seg> segs;
  double maxlen = 0.0;
  for (int ci = 0; ci < int(sys.curves.size()); ++ci) {
    const auto& p = sys.curves[ci].pts;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
      Seg s{ci, i, p[i], p[(i + 1) % n]};
      maxlen = std::max(maxlen, (s.b - s.a).norm());
      segs.push_back(s);
    }
  }
  if (segs.empty() || maxlen <= 0.0) return false;

  const double cell = 2.0 * maxlen;
  auto key = [&](std::int64_t ix, std::int64_t iy) {
    return (ix << 32) ^ (iy & 0xffffffff);
  };
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    const auto ix0 = std::int64_t(std::floor(std::min(segs[s].a.x, segs[s].b.x) / cell));
    const auto ix1 = std::int64_t(std::floor(std::max(segs[s].a.x, segs[s].b.x) / cell));
    const auto iy0 = std::int64_t(std::floor(std::min(segs[s].a.y, segs[s].b.y) / cell));
    const auto iy1 = std::int64_t(std::floor(std::max(segs[s].a.y, segs[s].b.y) / cell));
    for (std::int64_t ix = ix0; ix <= ix1; ++ix)
      for (std::int64_t iy = iy0; iy <= iy1; ++iy)
        buckets[key(ix, iy)].push_back(s);
  }

  for (const auto& [k, list] : buckets) {
    for (std::size_t p = 0; p < list.size(); ++p)
      for (std::size_t q = p + 1; q < list.size(); ++q) {
        const Seg& s1 = segs[list[p]];
        const Seg& s2 = segs[list[q]];
        if (s1.curve == s2.curve) {
          const std::size_t n = sys.curves[s1.curve].size();
          const std::size_t diff =
              (s1.idx + n - s2.idx) % n;
          if (diff <= 1 || diff == n - 1) continue;
        }
        if (detail::segments_touch(s1.a, s1.b, s2.a, s2.b)) return true;
      }
  }
  return false;
}

/// One semi-implicit step with scalar forcing f, followed by resampling.
/// Requires dt <= c_cfl * (min spacing)^2.
inline void tracker_step(CurveSystem& sys, double dt, double f,
                         double c_cfl = 0.2) {
  if (dt <= 0.0) throw StepTooLargeError("tracker_step: dt must be positive");
  for (const auto& c : sys.curves) {
    const double ms = c.min_spacing();
    if (dt > c_cfl * ms * ms)
      throw StepTooLargeError("tracker_step: dt exceeds " +
                              std::to_string(c_cfl) + " * spacing^2");
  }
#pragma omp parallel for schedule(dynamic)
  for (int ci = 0; ci < int(sys.curves.size()); ++ci) {
    auto& curve = sys.curves[ci];
    const std::size_t n = curve.size();
    const double ds = curve.length() / double(n);
    const double mu = dt / (ds * ds);
    std::vector<double> rx(n), ry(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 t = curve.pts[(i + 1) % n] - curve.pts[(i + n - 1) % n];
      const double tn = t.norm();
      // outward normal of a counterclockwise curve
      const Vec2 nrm = tn > 0.0 ? Vec2{t.y / tn, -t.x / tn} : Vec2{0.0, 0.0};
      rx[i] = curve.pts[i].x + dt * f * nrm.x;
      ry[i] = curve.pts[i].y + dt * f * nrm.y;
    }
    const std::vector<double> sx =
        detail::solve_cyclic_tridiagonal(-mu, 1.0 + 2.0 * mu, -mu, rx);
    const std::vector<double> sy =
        detail::solve_cyclic_tridiagonal(-mu, 1.0 + 2.0 * mu, -mu, ry);
    for (std::size_t i = 0; i < n; ++i) curve.pts[i] = {sx[i], sy[i]};
    curve.resample(n);
  }
  sys.t += dt;
}

struct TrackerParams {
  double c_cfl = 0.2;
  /// Fraction of the area error fed back into f per unit time in
  /// volume-preserving mode; counters the slow outward drift of the discrete
  /// average-curvature constraint. 0 disables the correction.
  double area_feedback_gain = 0.0;
  double area_target = 0.0;  // 0: captured from the initial state
};

/// Evolves the system to time T in steps of dt. Volume-preserving mode
/// computes f from the current state each step; otherwise f comes from the
/// forcing spec at the current time. Stops with `intersection_detected` when
/// curves touch. The observer, when set, sees the state after every step.
inline CurveSystem evolve(CurveSystem sys, double dt, double T,
                          const TrackerParams& params = {},
                          const ForcingSpec* forcing = nullptr,
                          const std::function<void(const CurveSystem&)>&
                              observer = nullptr) {
  if (sys.mode == TrackerMode::prescribed_forcing && !forcing)
    throw FlatFlowError("evolve: prescribed_forcing mode needs a ForcingSpec");
  double target = params.area_target;
  if (params.area_feedback_gain > 0.0 && target == 0.0)
    target = sys.total_area();

  while (sys.t < T - 1e-12) {
    double f;
    if (sys.mode == TrackerMode::volume_preserving) {
      f = mean_curvature_forcing(sys);
      if (params.area_feedback_gain > 0.0)
        f += params.area_feedback_gain * (target - sys.total_area()) /
             sys.total_length();
    } else {
      f = forcing->value(sys.t);
    }
    tracker_step(sys, std::min(dt, T - sys.t), f, params.c_cfl);
    if (curves_intersect(sys)) {
      sys.intersection_detected = true;
      break;
    }
    if (observer) observer(sys);
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Distance of a curve system to a union of circles (both directions).

inline double point_to_polyline(const TrackedCurve& c, Vec2 p) {
  const std::size_t n = c.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = c.pts[i], b = c.pts[(i + 1) % n];
    const Vec2 ab = b - a;
    const double l2 = ab.dot(ab);
    const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    best = std::min(best, (p - (a + ab * t)).norm());
  }
  return best;
}

/// Hausdorff distance between the union of the tracked curves and the union
/// of circles of radius r about `centers` (circle side sampled).
inline double hausdorff_to_circles(const CurveSystem& sys,
                                   const std::vector<Vec2>& centers, double r,
                                   int samples_per_circle = 1024) {
  double worst = 0.0;
  for (const auto& c : sys.curves)
    for (const auto& p : c.pts) {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& ctr : centers)
        d = std::min(d, std::abs((p - ctr).norm() - r));
      worst = std::max(worst, d);
    }
  for (const auto& ctr : centers)
    for (int m = 0; m < samples_per_circle; ++m) {
      const double th = 2.0 * M_PI * (m + 0.5) / samples_per_circle;
      const Vec2 q{ctr.x + r * std::cos(th), ctr.y + r * std::sin(th)};
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : sys.curves) d = std::min(d, point_to_polyline(c, q));
      worst = std::max(worst, d);
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Tangent-ellipse experiment: E0 = (G - rho e1) u (G + rho e1) with
// G = {a^2 x1^2 + x2^2 < 1}, rho = 1/sqrt(a), evolved volume-preserving.
// The flow must stay out of the x2-axis and converge to the tangent disks
// D_rho(+-rho e1).

struct Theorem3Sample {
  double t = 0.0;
  double hausdorff_to_limit = 0.0;
  double x1_gap = 0.0;  // min x1 over the right component's vertices
  double area = 0.0;
  double energy = 0.0;  // total length (the decreasing quantity of the flow)
};

struct Theorem3Result {
  CurveSystem system;
  std::vector<Theorem3Sample> series;
  double rho = 0.0;
  bool intersection = false;
};

inline Theorem3Result theorem3_run(double a, double T, double dt,
                                   std::size_t n_vertices = 512,
                                   double sample_every = 0.1,
                                   TrackerParams params = {0.2, 50.0, 0.0}) {
  if (a < 1.0) throw std::invalid_argument("theorem3_run: need a >= 1");
  Theorem3Result res;
  res.rho = 1.0 / std::sqrt(a);
  const double rho = res.rho;
  const std::vector<Vec2> centers{{-rho, 0.0}, {rho, 0.0}};

  CurveSystem sys;
  sys.mode = TrackerMode::volume_preserving;
  sys.curves.push_back(
      TrackedCurve::ellipse({-rho, 0.0}, 1.0 / a, 1.0, n_vertices));
  sys.curves.push_back(
      TrackedCurve::ellipse({rho, 0.0}, 1.0 / a, 1.0, n_vertices));
  // anchor the feedback to the initial area once; re-capturing it per evolve
  // call would let the polygon's slight outward bias ratchet the target
  if (params.area_feedback_gain > 0.0 && params.area_target == 0.0)
    params.area_target = sys.total_area();

  auto sample = [&](const CurveSystem& s) {
    Theorem3Sample m;
    m.t = s.t;
    m.hausdorff_to_limit = hausdorff_to_circles(s, centers, rho);
    m.x1_gap = std::numeric_limits<double>::infinity();
    for (const auto& p : s.curves[1].pts) m.x1_gap = std::min(m.x1_gap, p.x);
    m.area = s.total_area();
    m.energy = s.total_length();
    return m;
  };
  res.series.push_back(sample(sys));

  const long per = std::max(1L, long(std::llround(sample_every / dt)));
  while (sys.t < T - 1e-12 && !sys.intersection_detected) {
    const double until = std::min(T, sys.t + per * dt);
    sys = evolve(std::move(sys), dt, until, params);
    res.series.push_back(sample(sys));
  }
  res.intersection = sys.intersection_detected;
  res.system = std::move(sys);
  return res;
}

/// Curve dump: component, s, x, y, k per vertex.
inline void write_curves_csv(const CurveSystem& sys, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw FlatFlowError("cannot open " + path);
  f << "component,s,x,y,k\n";
  for (std::size_t ci = 0; ci < sys.curves.size(); ++ci) {
    const auto& c = sys.curves[ci];
    const auto k = c.vertex_curvature();
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      f << ci << "," << s << "," << c.pts[i].x << "," << c.pts[i].y << ","
        << k[i] << "\n";
      s += (c.pts[(i + 1) % c.size()] - c.pts[i]).norm();
    }
  }
}

}  // namespace flatflow
