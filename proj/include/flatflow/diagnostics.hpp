/// @file diagnostics.hpp
/// @brief Energy/dissipation monitors and comparison-principle checks.
///
/// All checks report margins; pass/fail thresholds are the caller's.

#pragma once

#include <json.hpp>

#include "curvature.hpp"
#include "flow.hpp"

namespace flatflow {

/// E(E) = P(E) - c0 |E|.
inline double energy(const SetMask& e, double c0) {
  if (e.empty()) return 0.0;
  return perimeter(e) - c0 * area(e);
}

/// (1/h) int_{E_k1 delta E_k} |dbar_{E_k}| dx (cell sum).
inline double mm_dissipation(const SetMask& e_k, const SetMask& e_k1,
                             double h) {
  if (h <= 0.0) throw FlatFlowError("mm_dissipation: h must be positive");
  require_same_grid(e_k.grid, e_k1.grid);
  if (symm_diff_area(e_k, e_k1) == 0.0) return 0.0;
  ScalarField sd = signed_distance(e_k);
  double s = 0.0;
  for (std::size_t k = 0; k < e_k.inside.size(); ++k)
    if (e_k.inside[k] != e_k1.inside[k]) s += std::abs(sd.values[k]);
  return s * e_k.grid.cell * e_k.grid.cell / h;
}

/// sum over contours of the closed trapezoid integral of (k - fbar)^2 ds.
inline double boundary_dissipation(const std::vector<Contour>& contours,
                                   double fb) {
  double total = 0.0;
  for (const auto& c : contours) {
    const std::size_t n = c.size();
    if (c.curvature.size() != n)
      throw DegenerateContourError("boundary_dissipation requires curvature");
    for (std::size_t i = 0; i < n; ++i) {
      const double s0 = c.arclength[i];
      const double s1 = (i + 1 < n) ? c.arclength[i + 1] : c.length;
      const double d0 = c.curvature[i] - fb;
      const double d1 = c.curvature[(i + 1) % n] - fb;
      total += 0.5 * (d0 * d0 + d1 * d1) * (s1 - s0);
    }
  }
  return total;
}

struct CheckReport {
  std::string check;
  bool pass = false;
  double margin = 0.0;
  long worst_step = -1;
  nlohmann::json details;

  nlohmann::json to_json() const {
    return {{"check", check},
            {"pass", pass},
            {"margin", margin},
            {"worst_step", worst_step},
            {"details", details}};
  }
};

/// Energy quasi-monotonicity and per-step dissipation inequality for a
/// recorded trajectory with (asymptotically) constant forcing.
///
/// Two monitors:
///  - per step, the minimality consequence
///      (1/h) int_delta |dbar| + P(E_{k+1}) <= P(E_k) + fbar (|E_{k+1}|-|E_k|)
///    must hold up to `tol_abs + tol_rel_perimeter * P(E_k)`;
///  - after `burn_in` steps the energy may only move up by that tolerance.
/// Also fits the smallest C with
///      (1/2h) int_delta |dbar| + P(E_{k+1}) <= (1 + C h) P(E_k).
inline CheckReport check_energy_quasimonotone(const Trajectory& traj,
                                              double c0, long burn_in = 10,
                                              double tol_abs = 0.0,
                                              double tol_rel_perimeter = 0.02) {
  CheckReport rep;
  rep.check = "energy_quasimonotone";
  double worst_violation = -std::numeric_limits<double>::infinity();
  double max_energy_jump = 0.0;
  long worst = -1;
  double c_fit = 0.0;
  nlohmann::json violations = nlohmann::json::array();

  double prev_perim = -1.0, prev_area = 0.0, prev_energy = 0.0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const auto& r = traj.records[k];
    if (r.extinct) break;
    if (prev_perim >= 0.0) {
      const double tol = tol_abs + tol_rel_perimeter * prev_perim;
      const double lhs = r.mm_dissipation + r.perimeter_after;
      const double rhs = prev_perim + r.fbar * (r.area_after - prev_area);
      const double viol = lhs - rhs;  // > 0 means inequality violated
      if (viol > worst_violation) {
        worst_violation = viol;
        worst = long(k);
      }
      if (viol > tol)
        violations.push_back({{"step", k}, {"violation", viol}, {"tol", tol}});
      const double lhs2 = 0.5 * r.mm_dissipation + r.perimeter_after;
      if (lhs2 > prev_perim && prev_perim > 0.0)
        c_fit = std::max(c_fit, (lhs2 / prev_perim - 1.0) / r.h);
      if (long(k) >= burn_in) {
        const double jump = (r.perimeter_after - c0 * r.area_after) - prev_energy;
        max_energy_jump = std::max(max_energy_jump, jump);
      }
    }
    prev_perim = r.perimeter_after;
    prev_area = r.area_after;
    prev_energy = r.perimeter_after - c0 * r.area_after;
  }

  rep.margin = worst_violation;
  rep.worst_step = worst;
  rep.pass = violations.empty();
  rep.details = {{"fitted_C", c_fit},
                 {"max_energy_jump_after_burn_in", max_energy_jump},
                 {"violations", violations}};
  return rep;
}

enum class ComparisonMode { containment, disjointness };

/// Weak comparison principle monitor. In containment mode trajB must stay
/// inside trajA (initial F0 in E0, f_A > f_B); in disjointness mode the two
/// flows must stay disjoint (-f_B > f_A). Penetration depth is reported in
/// cells; the conventional pass threshold is one cell.
inline CheckReport check_comparison(const Trajectory& trajA,
                                    const Trajectory& trajB,
                                    ComparisonMode mode,
                                    double pass_cells = 1.0) {
  require_same_grid(trajA.grid, trajB.grid);
  if (trajA.h != trajB.h)
    throw FlatFlowError("check_comparison: trajectories differ in h");
  CheckReport rep;
  rep.check = mode == ComparisonMode::containment ? "comparison_containment"
                                                  : "comparison_disjointness";
  const double cell = trajA.grid.cell;
  double worst = 0.0;
  long worst_step = -1;

  const std::size_t n =
      std::min(trajA.records.size(), trajB.records.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = trajA.records[k].mask_after;
    const auto& b = trajB.records[k].mask_after;
    if (!a || !b)
      throw FlatFlowError("check_comparison needs per-step masks retained");
    if (trajA.records[k].extinct || trajB.records[k].extinct) break;
    double pen = 0.0;
    if (mode == ComparisonMode::containment) {
      // cells of B outside A, depth measured to the interface of A
      ScalarField sdA = signed_distance(*a);
      for (std::size_t i = 0; i < a->inside.size(); ++i)
        if (b->inside[i] && !a->inside[i])
          pen = std::max(pen, std::abs(sdA.values[i]));
    } else {
      bool overlap = false;
      for (std::size_t i = 0; i < a->inside.size() && !overlap; ++i)
        overlap = a->inside[i] && b->inside[i];
      if (overlap) {
        ScalarField sdA = signed_distance(*a);
        ScalarField sdB = signed_distance(*b);
        for (std::size_t i = 0; i < a->inside.size(); ++i)
          if (a->inside[i] && b->inside[i])
            pen = std::max(pen, std::min(std::abs(sdA.values[i]),
                                         std::abs(sdB.values[i])));
      }
    }
    if (pen > worst) {
      worst = pen;
      worst_step = long(k);
    }
  }
  rep.margin = worst / cell;  // in cells
  rep.worst_step = worst_step;
  rep.pass = rep.margin <= pass_cells;
  rep.details = {{"max_penetration_cells", rep.margin}};
  return rep;
}

}  // namespace flatflow
