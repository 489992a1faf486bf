/// @file oracle.hpp
/// @brief Exact one-dimensional disk reductions of the implicit scheme,
///        used as ground truth for the grid flow and the front tracker.

#pragma once

#include <vector>

#include "forcing.hpp"

namespace flatflow {

struct DiskState {
  double r = 0.0;
  bool extinct = false;
};

/// One implicit step of the disk recurrence (r_{k+1} - r_k)/h = -1/r_{k+1} + f:
/// the larger root of r^2 - (r_k + h f) r + h = 0. The larger root is the
/// branch continuous in h at h = 0; a negative discriminant means the
/// minimizing-movements step has an empty minimizer (extinction).
inline DiskState disk_step(double r_k, double h, double f) {
  if (r_k <= 0.0 || h <= 0.0)
    throw std::invalid_argument("disk_step: need r_k > 0, h > 0");
  const double b = r_k + h * f;
  const double disc = b * b - 4.0 * h;
  if (disc < 0.0 || b <= 0.0) return {0.0, true};
  return {0.5 * (b + std::sqrt(disc)), false};
}

/// Chained disk steps with the exact interval-averaged forcing; the state at
/// index k corresponds to time kh (index 0 is the initial radius).
inline std::vector<DiskState> disk_trajectory(double r0, double h,
                                              const ForcingSpec& f, double T) {
  std::vector<DiskState> out;
  out.push_back({r0, false});
  const long n = long(std::ceil(T / h - 1e-12));
  for (long k = 0; k < n; ++k) {
    DiskState s = disk_step(out.back().r, h, fbar(f, k, h));
    out.push_back(s);
    if (s.extinct) break;
  }
  return out;
}

/// Barrier radii of the disk comparison recurrence run to time sqrt(delta)
/// with forcing -Lambda, for the inner disks (radius 1 - delta^{1/4}) and
/// the outer probe disks (radius 4 delta^{1/4}), together with the
/// closed-form lower bounds they must dominate.
struct CompaBounds {
  double inner_radius = 0.0;      // recurrence value at t = sqrt(delta)
  double inner_lower_bound = 0.0; // 1 - delta^{1/4} - 2 sqrt(delta)(Lambda+2)
  double probe_radius = 0.0;
  double probe_lower_bound = 0.0; // delta^{1/4}
  bool delta_too_large = false;
};

inline CompaBounds compa_bounds(double delta, double lambda,
                                double h = 0.0) {
  CompaBounds b;
  if (delta < 0.0) throw std::invalid_argument("compa_bounds: delta >= 0");
  if (delta > 0.1) {
    b.delta_too_large = true;
    return b;
  }
  const double q = std::pow(delta, 0.25);
  b.inner_lower_bound = 1.0 - q - 2.0 * std::sqrt(delta) * (lambda + 2.0);
  b.probe_lower_bound = q;
  if (delta == 0.0) {
    b.inner_radius = 1.0;
    b.probe_radius = 0.0;
    return b;
  }
  if (h <= 0.0) h = std::sqrt(delta) / 256.0;
  auto iterate = [&](double r0) {
    double r = r0;
    const long K = long(std::ceil(std::sqrt(delta) / h));
    for (long k = 0; k < K; ++k) {
      DiskState s = disk_step(r, h, -lambda);
      if (s.extinct) return 0.0;
      r = s.r;
    }
    return r;
  };
  b.inner_radius = iterate(1.0 - q);
  b.probe_radius = iterate(4.0 * q);
  return b;
}

}  // namespace flatflow
