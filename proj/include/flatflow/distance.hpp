/// @file distance.hpp
/// @brief Exact Euclidean signed distance on the grid and Hausdorff-type
///        set comparison.
///
/// The transform is the two-pass squared-distance lower-envelope algorithm
/// (per-row, then per-column), exact for cell-center point sets. The
/// interface is placed at the 0.5-level between inside and outside cell
/// centers, so distances to the discrete interface are the cell-center
/// distances minus cell/2.

#pragma once

#include <limits>

#include "core.hpp"

namespace flatflow {

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1-D squared distance transform of a sampled function (Felzenszwalb &
/// Huttenlocher lower envelope). f[i] = 0 on sites, +inf elsewhere.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d,
                   std::vector<int>& v, std::vector<double>& z) {
  const int n = int(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (f[v[0]] == kInf) {
      v[0] = q;
      continue;
    }
    double s;
    while (true) {
      int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (f[v[0]] == kInf) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    int p = v[k];
    d[q] = double(q - p) * (q - p) + f[p];
  }
}

/// Squared distance (in cell units) from every cell to the nearest cell
/// where `site` is true.
inline std::vector<double> edt_2d(const GridSpec& g,
                                  const std::vector<std::uint8_t>& site) {
  const int nx = g.nx, ny = g.ny;
  std::vector<double> tmp(g.size());
  // Row pass.
  {
    std::vector<double> f(nx), d(nx), z(nx + 1);
    std::vector<int> v(nx);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i)
        f[i] = site[g.index(i, j)] ? 0.0 : kInf;
      edt_1d(f, d, v, z);
      for (int i = 0; i < nx; ++i) tmp[g.index(i, j)] = d[i];
    }
  }
  // Column pass.
  std::vector<double> out(g.size());
  {
    std::vector<double> f(ny), d(ny), z(ny + 1);
    std::vector<int> v(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) f[j] = tmp[g.index(i, j)];
      edt_1d(f, d, v, z);
      for (int j = 0; j < ny; ++j) out[g.index(i, j)] = d[j];
    }
  }
  return out;
}

}  // namespace detail

/// Exact signed distance to the discrete interface of E: negative inside,
/// positive outside, |value| = cell-center distance to the opposite phase
/// minus cell/2. Throws EmptySetError / FullSetError when one phase is
/// missing.
inline ScalarField signed_distance(const SetMask& e) {
  const auto n = e.count();
  if (n == 0) throw EmptySetError();
  if (n == e.grid.size()) throw FullSetError();

  auto d_in2 = detail::edt_2d(e.grid, e.inside);     // distance to inside cells
  auto outside = e.complement();
  auto d_out2 = detail::edt_2d(e.grid, outside.inside);

  ScalarField sd(e.grid);
  const double c = e.grid.cell;
  for (std::size_t k = 0; k < e.inside.size(); ++k) {
    if (e.inside[k])
      sd.values[k] = -(std::sqrt(d_out2[k]) * c - 0.5 * c);
    else
      sd.values[k] = std::sqrt(d_in2[k]) * c - 0.5 * c;
  }
  return sd;
}

/// sup over cells of E delta F of the distance to the interface of F.
/// Throws on degenerate F (empty or full).
inline double hausdorff_excess(const SetMask& e, const SetMask& f) {
  require_same_grid(e.grid, f.grid);
  ScalarField sd = signed_distance(f);
  double m = 0.0;
  for (std::size_t k = 0; k < e.inside.size(); ++k)
    if (e.inside[k] != f.inside[k])
      m = std::max(m, std::abs(sd.values[k]));
  return m;
}

}  // namespace flatflow
