/// @file contour.hpp
/// @brief Interface extraction: marching squares on the signed distance
///        field with linear interpolation, oriented closed polylines.
///
/// Contours are traced so the set lies on the left: outer boundaries come
/// out counterclockwise, holes clockwise. Saddle cells are resolved by the
/// sign of the mean of the four corner values.

#pragma once

#include <unordered_map>

#include "distance.hpp"

namespace flatflow {

/// Closed oriented polyline. `vertices` does not repeat the first point;
/// closure is implicit. `arclength[i]` is the cumulative length up to
/// vertex i (arclength[0] = 0); total length is `length`.
struct Contour {
  std::vector<Vec2> vertices;
  std::vector<double> arclength;
  std::vector<double> curvature;  // per vertex, filled by curvature_profile
  double length = 0.0;

  std::size_t size() const { return vertices.size(); }

  void finalize() {
    arclength.assign(vertices.size(), 0.0);
    length = 0.0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
      length += (vertices[i + 1] - vertices[i]).norm();
      arclength[i + 1] = length;
    }
    if (vertices.size() > 1)
      length += (vertices.front() - vertices.back()).norm();
  }

  double signed_area() const {
    double a = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i)
      a += vertices[i].cross(vertices[(i + 1) % n]);
    return 0.5 * a;
  }

  bool counterclockwise() const { return signed_area() > 0.0; }

  /// Point at arclength s (periodic).
  Vec2 at_arclength(double s) const {
    const std::size_t n = vertices.size();
    s = std::fmod(s, length);
    if (s < 0) s += length;
    std::size_t i = std::upper_bound(arclength.begin(), arclength.end(), s) -
                    arclength.begin();
    std::size_t i0 = i - 1;
    Vec2 a = vertices[i0], b = vertices[(i0 + 1) % n];
    double seg = (b - a).norm();
    double t = seg > 0 ? (s - arclength[i0]) / seg : 0.0;
    return a + (b - a) * t;
  }

  /// Resamples to uniform arclength spacing and convolves the vertex
  /// positions with a periodic Gaussian of width sigma (in arclength).
  /// Removes the cell-scale staircase of raster contours; the induced
  /// inward bias is O(sigma^2 * curvature).
  void smooth_closed(double sigma, double spacing) {
    const std::size_t n =
        std::max<std::size_t>(8, std::size_t(std::llround(length / spacing)));
    std::vector<Vec2> resampled(n);
    for (std::size_t j = 0; j < n; ++j)
      resampled[j] = at_arclength(length * double(j) / double(n));
    const double ds = length / double(n);
    const int halfw = std::min(
        int(n) - 1, std::max(1, int(std::ceil(3.0 * sigma / ds))));
    std::vector<double> w(2 * halfw + 1);
    double wsum = 0.0;
    for (int q = -halfw; q <= halfw; ++q) {
      w[q + halfw] = std::exp(-0.5 * (q * ds) * (q * ds) / (sigma * sigma));
      wsum += w[q + halfw];
    }
    std::vector<Vec2> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      Vec2 acc{0.0, 0.0};
      for (int q = -halfw; q <= halfw; ++q) {
        const std::size_t idx = (j + n + std::size_t(q + int(n))) % n;
        acc = acc + resampled[idx] * w[q + halfw];
      }
      out[j] = acc * (1.0 / wsum);
    }
    vertices = std::move(out);
    finalize();
  }

  /// Total turning angle (sum of exterior angles), +-2*pi for simple loops.
  double total_turning() const {
    const std::size_t n = vertices.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
      Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
      total += std::atan2(e0.cross(e1), e0.dot(e1));
    }
    return total;
  }
};

namespace detail {

struct MsSegment {
  std::int64_t from_edge;
  std::int64_t to_edge;
  Vec2 from_pt;
  Vec2 to_pt;
};

// Edge ids on the node lattice: horizontal (i,j)-(i+1,j) -> 2*(j*nx+i),
// vertical (i,j)-(i,j+1) -> 2*(j*nx+i)+1.
inline std::int64_t h_edge(int i, int j, int nx) {
  return 2 * (std::int64_t(j) * nx + i);
}
inline std::int64_t v_edge(int i, int j, int nx) {
  return 2 * (std::int64_t(j) * nx + i) + 1;
}

}  // namespace detail

/// Marching-squares contours of the 0-level of a node-sampled field
/// (nodes = cell centers, negative = inside).
inline std::vector<Contour> contours_of_field(const ScalarField& sd) {
  using detail::MsSegment;
  const GridSpec& g = sd.grid;
  const int nx = g.nx, ny = g.ny;

  std::vector<MsSegment> segs;
  std::unordered_map<std::int64_t, std::size_t> by_from;

  auto crossing = [&](int i0, int j0, int i1, int j1) {
    double v0 = sd.at(i0, j0), v1 = sd.at(i1, j1);
    double t = v0 / (v0 - v1);
    Vec2 p0 = g.center(i0, j0), p1 = g.center(i1, j1);
    return p0 + (p1 - p0) * t;
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const bool a = sd.at(i, j) < 0;          // lower-left
      const bool b = sd.at(i + 1, j) < 0;      // lower-right
      const bool c = sd.at(i + 1, j + 1) < 0;  // upper-right
      const bool d = sd.at(i, j + 1) < 0;      // upper-left
      int code = (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0) | (d ? 8 : 0);
      if (code == 0 || code == 15) continue;

      const std::int64_t eb = detail::h_edge(i, j, nx);
      const std::int64_t et = detail::h_edge(i, j + 1, nx);
      const std::int64_t el = detail::v_edge(i, j, nx);
      const std::int64_t er = detail::v_edge(i + 1, j, nx);
      auto pt_b = [&] { return crossing(i, j, i + 1, j); };
      auto pt_t = [&] { return crossing(i, j + 1, i + 1, j + 1); };
      auto pt_l = [&] { return crossing(i, j, i, j + 1); };
      auto pt_r = [&] { return crossing(i + 1, j, i + 1, j + 1); };

      auto emit = [&](std::int64_t fe, Vec2 fp, std::int64_t te, Vec2 tp) {
        by_from[fe] = segs.size();
        segs.push_back({fe, te, fp, tp});
      };

      switch (code) {
        case 1: emit(eb, pt_b(), el, pt_l()); break;
        case 2: emit(er, pt_r(), eb, pt_b()); break;
        case 4: emit(et, pt_t(), er, pt_r()); break;
        case 8: emit(el, pt_l(), et, pt_t()); break;
        case 3: emit(er, pt_r(), el, pt_l()); break;
        case 12: emit(el, pt_l(), er, pt_r()); break;
        case 9: emit(eb, pt_b(), et, pt_t()); break;
        case 6: emit(et, pt_t(), eb, pt_b()); break;
        case 14: emit(el, pt_l(), eb, pt_b()); break;
        case 13: emit(eb, pt_b(), er, pt_r()); break;
        case 11: emit(er, pt_r(), et, pt_t()); break;
        case 7: emit(et, pt_t(), el, pt_l()); break;
        case 5: {  // a,c inside; saddle
          double mid = 0.25 * (sd.at(i, j) + sd.at(i + 1, j) +
                               sd.at(i + 1, j + 1) + sd.at(i, j + 1));
          if (mid < 0) {
            emit(eb, pt_b(), er, pt_r());
            emit(et, pt_t(), el, pt_l());
          } else {
            emit(eb, pt_b(), el, pt_l());
            emit(et, pt_t(), er, pt_r());
          }
          break;
        }
        case 10: {  // b,d inside; saddle
          double mid = 0.25 * (sd.at(i, j) + sd.at(i + 1, j) +
                               sd.at(i + 1, j + 1) + sd.at(i, j + 1));
          if (mid < 0) {
            emit(el, pt_l(), eb, pt_b());
            emit(er, pt_r(), et, pt_t());
          } else {
            emit(er, pt_r(), eb, pt_b());
            emit(el, pt_l(), et, pt_t());
          }
          break;
        }
      }
    }
  }

  std::vector<Contour> out;
  std::vector<bool> used(segs.size(), false);
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    Contour c;
    std::size_t s = s0;
    while (!used[s]) {
      used[s] = true;
      c.vertices.push_back(segs[s].from_pt);
      auto it = by_from.find(segs[s].to_edge);
      if (it == by_from.end())
        throw DomainContactError("open interface: set touches grid boundary");
      s = it->second;
    }
    if (s != s0)
      throw DomainContactError("interface tracing failed to close a loop");
    c.finalize();
    out.push_back(std::move(c));
  }
  return out;
}

/// Contours of the discrete interface of E (0-level of its signed distance),
/// denoised by arclength resampling plus Gaussian smoothing at the cell
/// scale. Curvature fields are left empty; see curvature_profile.
inline std::vector<Contour> extract_contours(const SetMask& e,
                                             double smooth_sigma_cells = 2.0) {
  if (e.empty()) throw EmptySetError();
  auto cs = contours_of_field(signed_distance(e));
  if (smooth_sigma_cells > 0.0)
    for (auto& c : cs)
      c.smooth_closed(smooth_sigma_cells * e.grid.cell, 0.5 * e.grid.cell);
  return cs;
}

/// Replace the raster signed distance with the exact distance to an
/// interface polyline wherever a cell lies within `zone` of some segment;
/// the sign comes from scan-line parity against the polyline. Cells beyond
/// the zone keep their raster values (there the raster error is relatively
/// small and only the near field drives a minimizing-movements step).
inline void refine_distance_near_interface(ScalarField& sd,
                                           const std::vector<Contour>& cs,
                                           double zone) {
  const GridSpec& g = sd.grid;
  if (cs.empty()) return;

  // Row crossings for the inside/outside parity test at cell centers.
  std::vector<std::vector<double>> xings(g.ny);
  for (const auto& c : cs) {
    const std::size_t m = c.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 a = c.vertices[i], b = c.vertices[(i + 1) % m];
      if (a.y == b.y) continue;
      const double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
      int jlo = std::max(0, int(std::floor((ylo - g.origin_y) / g.cell - 0.5)));
      int jhi = std::min(g.ny - 1,
                         int(std::ceil((yhi - g.origin_y) / g.cell)));
      for (int j = jlo; j <= jhi; ++j) {
        const double y = g.center(0, j).y;
        if ((a.y <= y) != (b.y <= y))
          xings[j].push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
      }
    }
  }
  for (auto& v : xings) std::sort(v.begin(), v.end());

  // Exact min distance to the polyline, stamped per segment over its
  // zone-inflated bounding box.
  std::vector<double> d2(g.size(), detail::kInf);
  const int pad = int(std::ceil(zone / g.cell)) + 1;
  for (const auto& c : cs) {
    const std::size_t m = c.size();
    for (std::size_t q = 0; q < m; ++q) {
      const Vec2 a = c.vertices[q], b = c.vertices[(q + 1) % m];
      const Vec2 ab = b - a;
      const double L2 = ab.dot(ab);
      int ilo = std::max(
          0, int((std::min(a.x, b.x) - g.origin_x) / g.cell - 0.5) - pad);
      int ihi = std::min(
          g.nx - 1, int((std::max(a.x, b.x) - g.origin_x) / g.cell) + pad);
      int jlo = std::max(
          0, int((std::min(a.y, b.y) - g.origin_y) / g.cell - 0.5) - pad);
      int jhi = std::min(
          g.ny - 1, int((std::max(a.y, b.y) - g.origin_y) / g.cell) + pad);
      for (int j = jlo; j <= jhi; ++j)
        for (int i = ilo; i <= ihi; ++i) {
          const std::size_t k = g.index(i, j);
          const Vec2 p = g.center(i, j);
          const double t =
              L2 > 0.0 ? std::clamp((p - a).dot(ab) / L2, 0.0, 1.0) : 0.0;
          const Vec2 foot = a + ab * t;
          const double dd = (p - foot).dot(p - foot);
          if (dd < d2[k]) d2[k] = dd;
        }
    }
  }
  const double zone2 = zone * zone;
  for (int j = 0; j < g.ny; ++j) {
    const auto& row = xings[j];
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (d2[k] > zone2) continue;
      const double x = g.center(i, j).x;
      const long cnt =
          std::upper_bound(row.begin(), row.end(), x) - row.begin();
      const double d = std::sqrt(d2[k]);
      sd.values[k] = (cnt % 2) ? -d : d;
    }
  }
}

/// Sum of polyline lengths of all interface contours; 0 for the empty set.
inline double perimeter(const SetMask& e) {
  if (e.empty()) return 0.0;
  double p = 0.0;
  for (const auto& c : extract_contours(e)) p += c.length;
  return p;
}

}  // namespace flatflow
