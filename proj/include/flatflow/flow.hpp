/// @file flow.hpp
/// @brief One minimizing-movements step and the chained discrete trajectory.
///
/// A step minimizes P(E) + (1/h) int_E dbar_{E_k} - fbar |E| through its
/// exact convex relaxation (tv.hpp) thresholded at 1/2. The bulk potential
/// w = dbar/h - fbar is clamped to +-(3 C1 sqrt(h))/h before the solve: the
/// step displacement is bounded by C1 sqrt(h), so far-field values cannot
/// affect the minimizer.

#pragma once

#include <functional>
#include <memory>

#include "contour.hpp"
#include "curvature.hpp"
#include "forcing.hpp"
#include "tv.hpp"

namespace flatflow {

struct FlowParams {
  SolverTolerances tol;
  double clamp_c1 = 2.0;   // displacement constant C1 used for w clamping
  int margin_cells = 3;    // minimum clearance to the domain boundary
  int band_pad_cells = 4;  // active-band padding beyond the C1 sqrt(h) reach
};

struct StepRecord {
  long k = 0;
  double h = 0.0;
  double fbar = 0.0;
  std::shared_ptr<const SetMask> mask_before;
  std::shared_ptr<const SetMask> mask_after;
  double objective_before = 0.0;  // F_k(E_k)
  double objective_after = 0.0;   // F_k(E_{k+1})
  double el_residual = 0.0;       // max |dbar/h + k - fbar| on the new contour
  double area_after = 0.0;
  double perimeter_after = 0.0;
  double energy_after = 0.0;        // P - c0 |E| with the forcing's c0
  double displacement_sup = 0.0;    // sup_{E_{k+1} delta E_k} |dbar_{E_k}|
  double mm_dissipation = 0.0;      // (1/h) int_{delta} |dbar_{E_k}|
  double symm_diff = 0.0;           // |E_{k+1} delta E_k|
  long threshold_band_cells = 0;    // cells with u* in [0.4, 0.6]
  int solver_iterations = 0;
  double solver_gap = 0.0;
  bool extinct = false;
};

struct Trajectory {
  GridSpec grid;
  double h = 0.0;
  ForcingSpec forcing;
  std::vector<StepRecord> records;
  bool extinct = false;
};

namespace detail {

inline void check_margin(const SetMask& e, int margin) {
  const GridSpec& g = e.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (e.inside[g.index(i, j)] &&
          (i < margin || j < margin || i >= g.nx - margin ||
           j >= g.ny - margin))
        throw DomainContactError("set within " + std::to_string(margin) +
                                 " cells of the domain boundary");
}

/// Periodic Gaussian smoothing of per-vertex samples (uniform spacing ds).
inline std::vector<double> smooth_circular(const std::vector<double>& v,
                                           double ds, double sigma) {
  const std::size_t n = v.size();
  const int halfw =
      std::min(int(n) - 1, std::max(1, int(std::ceil(3.0 * sigma / ds))));
  std::vector<double> w(2 * halfw + 1);
  double wsum = 0.0;
  for (int q = -halfw; q <= halfw; ++q) {
    w[q + halfw] = std::exp(-0.5 * (q * ds) * (q * ds) / (sigma * sigma));
    wsum += w[q + halfw];
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int q = -halfw; q <= halfw; ++q)
      acc += v[(i + n + std::size_t(q + int(n))) % n] * w[q + halfw];
    out[i] = acc / wsum;
  }
  return out;
}

/// F_k(E) evaluated with the polyline perimeter and unclamped dbar.
inline double step_objective(const SetMask& e, const ScalarField& sd_prev,
                             double h, double fb) {
  const double c2 = e.grid.cell * e.grid.cell;
  double bulk = 0.0;
  for (std::size_t k = 0; k < e.inside.size(); ++k)
    if (e.inside[k]) bulk += sd_prev.values[k];
  return perimeter(e) + bulk * c2 / h - fb * area(e);
}

}  // namespace detail

/// One minimizing-movements step. `solver` carries warm-start state across
/// steps; pass a fresh TvStepSolver for a standalone step. Extinction
/// (empty minimizer) is returned as a flagged record, not an error.
inline StepRecord mm_step(const std::shared_ptr<const SetMask>& e_k, double h,
                          double fb, const FlowParams& params,
                          TvStepSolver& solver, long k_index = 0,
                          const ScalarField* sd_precomputed = nullptr) {
  if (h <= 0.0) throw FlatFlowError("mm_step: h must be positive");
  const GridSpec& g = e_k->grid;
  const double cell = g.cell;
  const int margin = std::max(
      params.margin_cells,
      int(std::ceil(params.clamp_c1 * std::sqrt(h) / cell)));
  detail::check_margin(*e_k, margin);

  ScalarField sd = sd_precomputed ? *sd_precomputed : signed_distance(*e_k);

  const double w_max = 3.0 * params.clamp_c1 * std::sqrt(h) / h;
  std::vector<double> c(g.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    double w = sd.values[k] / h - fb;
    w = std::clamp(w, -w_max, w_max);
    c[k] = cell * w;
  }

  // Solve on a band around the current interface: the minimizer agrees with
  // the indicator beyond the displacement reach C1 sqrt(h). If the new set
  // still touches the band edge (data rougher than the assumed constant),
  // the band is widened and the solve repeated.
  double band_radius =
      params.clamp_c1 * std::sqrt(h) + params.band_pad_cells * cell;
  TvSolveInfo info;
  for (int attempt = 0;; ++attempt) {
    std::vector<std::uint8_t> active(g.size()), frozen(g.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      active[k] = std::abs(sd.values[k]) <= band_radius;
      frozen[k] = e_k->inside[k];
    }
    info = solver.solve_banded(c, params.tol, active, frozen);
    const auto& sol = solver.solution();
    double worst = 0.0;
    for (std::size_t k = 0; k < sol.size(); ++k)
      if ((sol[k] >= 0.5) != bool(e_k->inside[k]))
        worst = std::max(worst, std::abs(sd.values[k]));
    if (worst <= band_radius - 2.0 * cell || attempt >= 2) break;
    band_radius *= 2.0;
  }

  StepRecord rec;
  rec.k = k_index;
  rec.h = h;
  rec.fbar = fb;
  rec.mask_before = e_k;
  rec.solver_iterations = info.iterations;
  rec.solver_gap = info.gap;

  auto after = std::make_shared<SetMask>(g);
  const auto& u = solver.solution();
  long band = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    after->inside[k] = u[k] >= 0.5 ? 1 : 0;
    band += (u[k] >= 0.4 && u[k] <= 0.6);
  }
  rec.threshold_band_cells = band;
  rec.mask_after = after;

  // Step diagnostics over the symmetric difference (also meaningful for an
  // extinction step, where the whole set is the difference).
  const double c2 = cell * cell;
  double disp = 0.0, dissip = 0.0;
  std::size_t ndiff = 0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if (after->inside[k] != e_k->inside[k]) {
      ++ndiff;
      const double d = std::abs(sd.values[k]);
      disp = std::max(disp, d);
      dissip += d;
    }
  rec.displacement_sup = disp;
  rec.mm_dissipation = dissip * c2 / h;
  rec.symm_diff = double(ndiff) * c2;
  rec.objective_before = detail::step_objective(*e_k, sd, h, fb);
  rec.objective_after = detail::step_objective(*after, sd, h, fb);

  if (after->empty()) {
    rec.extinct = true;
    return rec;
  }
  detail::check_margin(*after, params.margin_cells);
  rec.area_after = area(*after);

  // The raster interface carries correlated wiggle in dbar along the contour
  // (staircase noise plus the orientation bias of the discrete total
  // variation), so dbar is averaged over the same arclength window the
  // curvature estimator uses before forming the pointwise Euler-Lagrange
  // residual; both terms of the residual then see the same scales.
  double perim = 0.0, el = 0.0;
  for (auto& contour : contours_with_curvature(*after)) {
    perim += contour.length;
    const std::size_t n = contour.size();
    std::vector<double> sdv(n);
    for (std::size_t i = 0; i < n; ++i)
      sdv[i] = sd.interp(contour.vertices[i]);
    const double win = std::min(std::max(3.0 * cell, contour.length / 12.0),
                                0.25 * contour.length);
    const std::vector<double> sm =
        detail::smooth_circular(sdv, contour.length / double(n), win);
    for (std::size_t i = 0; i < n; ++i)
      el = std::max(el, std::abs(sm[i] / h + contour.curvature[i] - fb));
  }
  rec.perimeter_after = perim;
  rec.el_residual = el;
  return rec;
}

using StepObserver = std::function<void(const StepRecord&)>;

/// Chained minimizing-movements trajectory on [0, T]. Snapshot masks are
/// retained every `keep_masks_every` steps (plus first and last); other
/// records carry diagnostics only. The observer, when set, sees every
/// record with both masks still attached.
inline Trajectory run_flow(const SetMask& e0, double h,
                           const ForcingSpec& forcing, double T,
                           const FlowParams& params = {},
                           const StepObserver& observer = nullptr,
                           long keep_masks_every = 1) {
  if (T < h) throw FlatFlowError("run_flow: need T >= h");
  Trajectory traj;
  traj.grid = e0.grid;
  traj.h = h;
  traj.forcing = forcing;

  const long nsteps = long(std::ceil(T / h - 1e-12));
  auto current = std::make_shared<const SetMask>(e0);
  TvStepSolver solver(e0.grid);

  // Seed the relaxation with a smoothed indicator of E0.
  {
    ScalarField sd = signed_distance(e0);
    std::vector<double> u0(e0.grid.size());
    const double scale = 2.0 * e0.grid.cell;
    for (std::size_t k = 0; k < u0.size(); ++k)
      u0[k] = std::clamp(0.5 - sd.values[k] / scale, 0.0, 1.0);
    solver.set_initial(u0);
    solver.seed_dual_from_signed_distance(sd);
  }

  // Sub-cell interface carried between steps: the new set is read as the
  // 0.5-level of the relaxation, interpolated between cell centers. Measuring
  // the next step's distances to that polyline instead of to the raster mask
  // removes most of the reconstruction bias that otherwise pins the flow a
  // fraction of a cell behind per step.
  std::vector<Contour> interface;
  const double zone = params.clamp_c1 * std::sqrt(h) +
                      (params.band_pad_cells + 2) * e0.grid.cell;

  for (long k = 0; k < nsteps; ++k) {
    const double fb = fbar(forcing, k, h);
    ScalarField sd = signed_distance(*current);
    if (!interface.empty())
      refine_distance_near_interface(sd, interface, zone);
    StepRecord rec = mm_step(current, h, fb, params, solver, k, &sd);
    if (!rec.extinct) {
      ScalarField lvl(e0.grid);
      const auto& u = solver.solution();
      for (std::size_t q = 0; q < u.size(); ++q) lvl.values[q] = 0.5 - u[q];
      interface = contours_of_field(lvl);
    }
    rec.energy_after =
        rec.extinct ? 0.0 : rec.perimeter_after - forcing.c0 * rec.area_after;
    if (observer) observer(rec);
    const bool keep = (k % keep_masks_every == 0) || rec.extinct ||
                      k + 1 == nsteps;
    auto next = rec.mask_after;
    if (!keep) {
      rec.mask_before.reset();
      rec.mask_after.reset();
    } else if (k > 0 && (k - 1) % keep_masks_every != 0) {
      rec.mask_before.reset();
    }
    traj.records.push_back(std::move(rec));
    if (traj.records.back().extinct) {
      traj.extinct = true;
      break;
    }
    current = std::move(next);
  }
  return traj;
}

}  // namespace flatflow
