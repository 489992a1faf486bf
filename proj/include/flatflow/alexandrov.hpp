/// @file alexandrov.hpp
/// @brief Disk-union fitting and the quantitative-Alexandrov margins: a set
///        whose curvature is L1-close to c0 is Hausdorff-close to a union
///        of N disks of radius 1/c0, with perimeter close to 2 pi N / c0.

#pragma once

#include <json.hpp>

#include "curvature.hpp"
#include "distance.hpp"

namespace flatflow {

/// N centers with a common radius. Tangency allowed, overlap flagged by the
/// caller (fitted unions of rough sets may transiently overlap).
struct DiskUnion {
  std::vector<Vec2> centers;
  double radius = 1.0;
};

enum class RadiusMode { fixed_inverse_c0, length_over_2pi };

struct AlexandrovReport {
  int n_components = 0;
  DiskUnion disks;
  double l1_dev = 0.0;       // ||k - c0||_L1 after rescaling lengths by c0
  double l2_dev = 0.0;       // rescaled L2 deviation
  double sup_excess = 0.0;   // hausdorff_excess(E, union of fitted disks)
  double perimeter_gap = 0.0;          // |P(E) - 2 pi N / c0|
  double perimeter_gap_signed = 0.0;   // P(E) - 2 pi N / c0
  bool has_holes = false;
  std::vector<std::pair<int, int>> contact_pairs;  // centers closer than 2r+2cell
  double estimator_floor = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json centers = nlohmann::json::array();
    for (const auto& c : disks.centers) centers.push_back({c.x, c.y});
    return {{"N", n_components},
            {"radius", disks.radius},
            {"centers", centers},
            {"l1_dev", l1_dev},
            {"l2_dev", l2_dev},
            {"sup_excess", sup_excess},
            {"perimeter_gap", perimeter_gap},
            {"perimeter_gap_signed", perimeter_gap_signed},
            {"has_holes", has_holes},
            {"contact_pairs", contact_pairs.size()},
            {"estimator_floor", estimator_floor}};
  }
};

/// Fits one disk per outer contour: center at the arclength centroid
/// (1/l) closed-int gamma(s) ds, radius 1/c0 (or l/2pi as a sensitivity
/// option), and fills the deviation norms and both lemma left-hand sides.
inline AlexandrovReport fit_disk_union(
    const SetMask& e, double c0,
    RadiusMode radius_mode = RadiusMode::fixed_inverse_c0) {
  if (e.empty()) throw EmptySetError();
  auto contours = contours_with_curvature(e);

  AlexandrovReport rep;
  double l1 = 0.0, l22 = 0.0, total_perim = 0.0, outer_length = 0.0;
  for (const auto& c : contours) {
    total_perim += c.length;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double s0 = c.arclength[i];
      const double s1 = (i + 1 < n) ? c.arclength[i + 1] : c.length;
      const double d0 = std::abs(c.curvature[i] - c0);
      const double d1 = std::abs(c.curvature[(i + 1) % n] - c0);
      l1 += 0.5 * (d0 + d1) * (s1 - s0);
      l22 += 0.5 * (d0 * d0 + d1 * d1) * (s1 - s0);
    }
    if (!c.counterclockwise()) {
      rep.has_holes = true;
      continue;
    }
    outer_length += c.length;
    Vec2 centroid{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = c.vertices[i];
      const Vec2 b = c.vertices[(i + 1) % n];
      const double seg = (b - a).norm();
      centroid = centroid + (a + b) * (0.5 * seg);
    }
    rep.disks.centers.push_back(centroid * (1.0 / c.length));
  }
  rep.n_components = int(rep.disks.centers.size());
  rep.l1_dev = l1;                     // invariant under the c0 rescale
  rep.l2_dev = std::sqrt(l22 / c0);

  rep.disks.radius = radius_mode == RadiusMode::fixed_inverse_c0
                         ? 1.0 / c0
                         : outer_length / (2.0 * M_PI * std::max(1, rep.n_components));

  const double target_perim = 2.0 * M_PI * rep.n_components / c0;
  rep.perimeter_gap_signed = total_perim - target_perim;
  rep.perimeter_gap = std::abs(rep.perimeter_gap_signed);

  SetMask f = disk_union_mask(e.grid, rep.disks.centers, rep.disks.radius);
  rep.sup_excess = f.empty() || f.full()
                       ? std::numeric_limits<double>::infinity()
                       : hausdorff_excess(e, f);

  const double cell = e.grid.cell;
  for (int i = 0; i < rep.n_components; ++i)
    for (int j = i + 1; j < rep.n_components; ++j)
      if ((rep.disks.centers[i] - rep.disks.centers[j]).norm() <
          2.0 * rep.disks.radius + 2.0 * cell)
        rep.contact_pairs.emplace_back(i, j);

  // Curvature-estimator noise floor: ~2% relative error integrated over the
  // boundary, in rescaled units.
  rep.estimator_floor = 0.02 * c0 * total_perim;
  return rep;
}

struct AlexandrovMargins {
  double ratio_excess = 0.0;     // (c0 * sup_excess) / l1_dev
  double ratio_perimeter = 0.0;  // (c0 * perimeter_gap) / l1_dev
  bool below_floor = false;      // deviation below the estimator floor
};

/// Empirical constants of the two lemma inequalities (dimensionless, in the
/// rescaled frame where the target disks have radius one). When l1_dev is
/// below the estimator floor the ratios are flagged rather than divided out.
inline AlexandrovMargins alexandrov_margins(const AlexandrovReport& rep,
                                            double c0) {
  AlexandrovMargins m;
  if (rep.l1_dev <= rep.estimator_floor) {
    m.below_floor = true;
    m.ratio_excess = std::numeric_limits<double>::infinity();
    m.ratio_perimeter = std::numeric_limits<double>::infinity();
    return m;
  }
  m.ratio_excess = c0 * rep.sup_excess / rep.l1_dev;
  m.ratio_perimeter = c0 * rep.perimeter_gap / rep.l1_dev;
  return m;
}

}  // namespace flatflow
