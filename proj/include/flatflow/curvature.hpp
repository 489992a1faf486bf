/// @file curvature.hpp
/// @brief Per-vertex curvature estimation on contours and the turning-angle
///        primitive theta(s) = integral of curvature.

#pragma once

#include "contour.hpp"

namespace flatflow {

namespace detail {

/// Taubin algebraic circle fit; returns the unsigned radius. Robust for
/// deep arcs where a parabola fit is badly biased, and averages raster
/// noise over all samples. Center is written to `center`.
inline double taubin_radius(const std::vector<Vec2>& pts, Vec2& center) {
  Vec2 mean{0.0, 0.0};
  for (const auto& p : pts) mean = mean + p;
  mean = mean * (1.0 / double(pts.size()));
  double mxx = 0, myy = 0, mxy = 0, mxz = 0, myz = 0, mzz = 0;
  for (const auto& p : pts) {
    const double x = p.x - mean.x, y = p.y - mean.y, z = x * x + y * y;
    mxx += x * x; myy += y * y; mxy += x * y;
    mxz += x * z; myz += y * z; mzz += z * z;
  }
  const double n = double(pts.size());
  mxx /= n; myy /= n; mxy /= n; mxz /= n; myz /= n; mzz /= n;
  const double mz = mxx + myy;
  const double cov = mxx * myy - mxy * mxy;
  const double var = mzz - mz * mz;
  const double a3 = 4.0 * mz;
  const double a2 = -3.0 * mz * mz - mzz;
  const double a1 = var * mz + 4.0 * cov * mz - mxz * mxz - myz * myz;
  const double a0 = mxz * (mxz * myy - myz * mxy) +
                    myz * (myz * mxx - mxz * mxy) - var * cov;
  double x = 0.0;
  for (int it = 0; it < 32; ++it) {
    const double f = a0 + x * (a1 + x * (a2 + x * a3));
    const double fp = a1 + x * (2.0 * a2 + 3.0 * a3 * x);
    if (fp == 0.0) break;
    const double dx = f / fp;
    x -= dx;
    if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  const double det = (x - mxx) * (x - myy) - mxy * mxy;
  if (det == 0.0) return std::numeric_limits<double>::infinity();
  const double cx = 0.5 * (mxz * (myy - x) - myz * mxy) / det;
  const double cy = 0.5 * (myz * (mxx - x) - mxz * mxy) / det;
  center = {mean.x + cx, mean.y + cy};
  double r = 0.0;
  for (const auto& p : pts) r += (p - center).norm();
  return r / n;
}

}  // namespace detail

/// Fills `contour.curvature` with the signed curvature from a least-squares
/// circle through samples at arclength +-window around each vertex. The
/// window is max(3*cell, length/12) so raster noise (which carries down to
/// zero spatial frequency on near-flat arcs) is averaged over a long span;
/// the circle model keeps deep arcs unbiased where a polynomial fit fails.
/// Sign follows the outward-normal convention: positive on convex outer
/// boundaries (counterclockwise), negative on holes.
inline void curvature_profile(Contour& contour, double cell) {
  const std::size_t n = contour.size();
  if (n < 8)
    throw DegenerateContourError("contour too small for curvature estimation");
  const double w =
      std::min(std::max(3.0 * cell, contour.length / 12.0), 0.25 * contour.length);
  constexpr int kHalf = 12;  // 25 samples across [-w, w]
  contour.curvature.assign(n, 0.0);
  std::vector<Vec2> pts(2 * kHalf + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = contour.arclength[i];
    for (int q = -kHalf; q <= kHalf; ++q)
      pts[q + kHalf] = contour.at_arclength(s + w * double(q) / kHalf);
    Vec2 center;
    const double r = detail::taubin_radius(pts, center);
    if (!std::isfinite(r) || r == 0.0) continue;
    const Vec2 tang = pts.back() - pts.front();
    const Vec2 toc = center - contour.vertices[i];
    contour.curvature[i] = (tang.cross(toc) > 0.0 ? 1.0 : -1.0) / r;
  }
}

/// Convenience: extract contours of E with curvature filled.
inline std::vector<Contour> contours_with_curvature(const SetMask& e) {
  auto cs = extract_contours(e);
  for (auto& c : cs) curvature_profile(c, e.grid.cell);
  return cs;
}

/// theta(s) = int_0^s k dtau by the trapezoid rule on vertex arclengths.
/// Returns (s_i, theta_i) including the closing value theta(l).
inline std::vector<std::pair<double, double>> turning_angle(
    const Contour& contour) {
  const std::size_t n = contour.size();
  if (contour.curvature.size() != n)
    throw DegenerateContourError("turning_angle requires curvature");
  std::vector<std::pair<double, double>> out;
  out.reserve(n + 1);
  double theta = 0.0;
  out.emplace_back(0.0, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double s0 = contour.arclength[i - 1];
    const double s1 = (i < n) ? contour.arclength[i] : contour.length;
    const double k0 = contour.curvature[i - 1];
    const double k1 = contour.curvature[i % n];
    theta += 0.5 * (k0 + k1) * (s1 - s0);
    out.emplace_back(s1, theta);
  }
  return out;
}

}  // namespace flatflow
