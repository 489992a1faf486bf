/// @file core.hpp
/// @brief Grid types for planar sets: GridSpec, SetMask, ScalarField,
///        mask constructors, area/symmetric-difference measures and PGM I/O.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace flatflow {

struct FlatFlowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySetError : FlatFlowError {
  EmptySetError() : FlatFlowError("set is empty on the grid") {}
};
struct FullSetError : FlatFlowError {
  FullSetError() : FlatFlowError("set covers the whole grid") {}
};
struct SolverDivergedError : FlatFlowError {
  using FlatFlowError::FlatFlowError;
};
struct DomainContactError : FlatFlowError {
  using FlatFlowError::FlatFlowError;
};
struct MismatchedGridsError : FlatFlowError {
  MismatchedGridsError() : FlatFlowError("operands live on different grids") {}
};
struct DegenerateContourError : FlatFlowError {
  using FlatFlowError::FlatFlowError;
};
struct StepTooLargeError : FlatFlowError {
  using FlatFlowError::FlatFlowError;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

/// Rectangular computational domain; cells are squares of side `cell`,
/// cell (i,j) has its center at origin + ((i+1/2)cell, (j+1/2)cell).
struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell = 1.0;
  int nx = 0;
  int ny = 0;

  GridSpec() = default;
  GridSpec(double ox, double oy, double c, int nx_, int ny_)
      : origin_x(ox), origin_y(oy), cell(c), nx(nx_), ny(ny_) {
    if (cell <= 0.0 || nx < 1 || ny < 1)
      throw FlatFlowError("invalid GridSpec");
  }

  /// Symmetric square grid covering [-half, half]^2 with n cells per side.
  static GridSpec centered(double half, int n) {
    return GridSpec(-half, -half, 2.0 * half / n, n, n);
  }

  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
  Vec2 center(int i, int j) const {
    return {origin_x + (i + 0.5) * cell, origin_y + (j + 0.5) * cell};
  }
  double width() const { return nx * cell; }
  double height() const { return ny * cell; }
  double domain_area() const { return width() * height(); }

  bool operator==(const GridSpec& o) const {
    return origin_x == o.origin_x && origin_y == o.origin_y &&
           cell == o.cell && nx == o.nx && ny == o.ny;
  }
};

/// A bounded planar set as a binary indicator on cell centers.
struct SetMask {
  GridSpec grid;
  std::vector<std::uint8_t> inside;

  SetMask() = default;
  explicit SetMask(const GridSpec& g) : grid(g), inside(g.size(), 0) {}

  bool at(int i, int j) const { return inside[grid.index(i, j)] != 0; }
  void set(int i, int j, bool v) { inside[grid.index(i, j)] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : inside) c += v;
    return c;
  }
  bool empty() const { return count() == 0; }
  bool full() const { return count() == grid.size(); }

  SetMask complement() const {
    SetMask m(grid);
    for (std::size_t k = 0; k < inside.size(); ++k)
      m.inside[k] = inside[k] ? 0 : 1;
    return m;
  }

  bool operator==(const SetMask& o) const {
    return grid == o.grid && inside == o.inside;
  }
};

/// Real-valued grid function on cell centers.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double& at(int i, int j) { return values[grid.index(i, j)]; }

  /// Bilinear interpolation on the cell-center lattice; clamps to the lattice
  /// hull outside.
  double interp(const Vec2& p) const {
    double fx = (p.x - grid.origin_x) / grid.cell - 0.5;
    double fy = (p.y - grid.origin_y) / grid.cell - 0.5;
    fx = std::clamp(fx, 0.0, double(grid.nx - 1));
    fy = std::clamp(fy, 0.0, double(grid.ny - 1));
    int i0 = std::min(int(fx), grid.nx - 2);
    int j0 = std::min(int(fy), grid.ny - 2);
    if (grid.nx == 1) i0 = 0;
    if (grid.ny == 1) j0 = 0;
    double tx = fx - i0, ty = fy - j0;
    double v00 = at(i0, j0), v10 = at(std::min(i0 + 1, grid.nx - 1), j0);
    double v01 = at(i0, std::min(j0 + 1, grid.ny - 1));
    double v11 = at(std::min(i0 + 1, grid.nx - 1), std::min(j0 + 1, grid.ny - 1));
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 +
           (1 - tx) * ty * v01 + tx * ty * v11;
  }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw MismatchedGridsError();
}

inline double area(const SetMask& e) {
  return double(e.count()) * e.grid.cell * e.grid.cell;
}

inline double symm_diff_area(const SetMask& e, const SetMask& f) {
  require_same_grid(e.grid, f.grid);
  std::size_t c = 0;
  for (std::size_t k = 0; k < e.inside.size(); ++k)
    c += (e.inside[k] != f.inside[k]);
  return double(c) * e.grid.cell * e.grid.cell;
}

inline SetMask set_union(const SetMask& e, const SetMask& f) {
  require_same_grid(e.grid, f.grid);
  SetMask m(e.grid);
  for (std::size_t k = 0; k < e.inside.size(); ++k)
    m.inside[k] = (e.inside[k] | f.inside[k]);
  return m;
}

inline SetMask set_difference(const SetMask& e, const SetMask& f) {
  require_same_grid(e.grid, f.grid);
  SetMask m(e.grid);
  for (std::size_t k = 0; k < e.inside.size(); ++k)
    m.inside[k] = (e.inside[k] && !f.inside[k]) ? 1 : 0;
  return m;
}

// ---------------------------------------------------------------------------
// Mask constructors (cell-center membership test).

inline SetMask mask_from_predicate(const GridSpec& g,
                                   const std::function<bool(Vec2)>& pred) {
  SetMask m(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (pred(g.center(i, j))) m.inside[g.index(i, j)] = 1;
  return m;
}

inline SetMask disk_mask(const GridSpec& g, Vec2 c, double r) {
  return mask_from_predicate(g, [&](Vec2 p) {
    return (p - c).dot(p - c) < r * r;
  });
}

inline SetMask disk_union_mask(const GridSpec& g, const std::vector<Vec2>& cs,
                               double r) {
  return mask_from_predicate(g, [&](Vec2 p) {
    for (const auto& c : cs)
      if ((p - c).dot(p - c) < r * r) return true;
    return false;
  });
}

inline SetMask ellipse_mask(const GridSpec& g, Vec2 c, double rx, double ry) {
  return mask_from_predicate(g, [&](Vec2 p) {
    double u = (p.x - c.x) / rx, v = (p.y - c.y) / ry;
    return u * u + v * v < 1.0;
  });
}

inline SetMask square_mask(const GridSpec& g, Vec2 c, double side) {
  double hs = side / 2;
  return mask_from_predicate(g, [&](Vec2 p) {
    return std::abs(p.x - c.x) < hs && std::abs(p.y - c.y) < hs;
  });
}

/// Star-shaped set r(phi) = r0*(1 + eps*cos(m*phi)) about `c`.
inline SetMask perturbed_disk_mask(const GridSpec& g, Vec2 c, double r0,
                                   double eps, int m) {
  return mask_from_predicate(g, [&](Vec2 p) {
    Vec2 d = p - c;
    double rr = d.norm();
    double phi = std::atan2(d.y, d.x);
    return rr < r0 * (1.0 + eps * std::cos(m * phi));
  });
}

/// Smooth random star-shaped blob: r(phi) = r0*(1 + sum amp_m cos(m phi + ph_m)).
/// Deterministic in the seed.
inline SetMask random_blob_mask(const GridSpec& g, Vec2 c, double r0,
                                double amp, unsigned seed, int max_mode = 5) {
  // xorshift-based angles/amplitudes, no <random> engine state to carry.
  auto next = [state = std::uint64_t(seed * 2654435769u + 1)]() mutable {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state % 1000003u) / 1000003.0;
  };
  std::vector<double> amps(max_mode + 1, 0.0), phases(max_mode + 1, 0.0);
  for (int m = 2; m <= max_mode; ++m) {
    amps[m] = amp * (2.0 * next() - 1.0) / m;
    phases[m] = 2.0 * M_PI * next();
  }
  return mask_from_predicate(g, [=](Vec2 p) {
    Vec2 d = p - c;
    double rr = d.norm();
    double phi = std::atan2(d.y, d.x);
    double rad = 1.0;
    for (int m = 2; m <= max_mode; ++m)
      rad += amps[m] * std::cos(m * phi + phases[m]);
    return rr < r0 * rad;
  });
}

// ---------------------------------------------------------------------------
// Mask file format: binary PGM (P5, 8-bit, 255 = inside) plus sidecar JSON
// with keys origin_x, origin_y, cell, nx, ny.

inline void save_mask_pgm(const SetMask& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FlatFlowError("cannot open " + path);
  f << "P5\n" << m.grid.nx << " " << m.grid.ny << "\n255\n";
  // PGM rows run top-to-bottom; store row ny-1 first.
  for (int j = m.grid.ny - 1; j >= 0; --j)
    for (int i = 0; i < m.grid.nx; ++i) {
      unsigned char v = m.at(i, j) ? 255 : 0;
      f.write(reinterpret_cast<const char*>(&v), 1);
    }
  nlohmann::json meta = {{"origin_x", m.grid.origin_x},
                         {"origin_y", m.grid.origin_y},
                         {"cell", m.grid.cell},
                         {"nx", m.grid.nx},
                         {"ny", m.grid.ny}};
  std::ofstream mf(path + ".json");
  mf << meta.dump(2) << "\n";
}

inline SetMask load_mask_pgm(const std::string& path) {
  std::ifstream mf(path + ".json");
  if (!mf) throw FlatFlowError("cannot open " + path + ".json");
  nlohmann::json meta = nlohmann::json::parse(mf);
  GridSpec g(meta.at("origin_x").get<double>(),
             meta.at("origin_y").get<double>(), meta.at("cell").get<double>(),
             meta.at("nx").get<int>(), meta.at("ny").get<int>());
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FlatFlowError("cannot open " + path);
  std::string magic;
  int nx, ny, maxval;
  f >> magic >> nx >> ny >> maxval;
  if (magic != "P5" || nx != g.nx || ny != g.ny)
    throw FlatFlowError("PGM/sidecar mismatch in " + path);
  f.get();
  SetMask m(g);
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      char v;
      f.read(&v, 1);
      m.set(i, j, static_cast<unsigned char>(v) >= 128);
    }
  return m;
}

}  // namespace flatflow
