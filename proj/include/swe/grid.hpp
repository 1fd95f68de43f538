#pragma once

#include <cstddef>
#include <vector>

namespace swe {

using Field = std::vector<double>;

/// Uniform node-centred Cartesian grid with (mx+1) x (my+1) nodes.
///
/// Node (l, p) sits at (x0 + l*dx, y0 + p*dy). Fields are stored row-major
/// with l fastest, so x-direction sweeps stream contiguously.
struct Grid {
  double x0 = 0.0;
  double y0 = 0.0;
  double lx = 0.0;
  double ly = 0.0;
  int mx = 0;
  int my = 0;
  double dx = 0.0;
  double dy = 0.0;

  int nx() const { return mx + 1; }
  int ny() const { return my + 1; }
  std::size_t size() const { return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()); }
  std::size_t index(int l, int p) const {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(nx()) + static_cast<std::size_t>(l);
  }
  double x(int l) const { return x0 + l * dx; }
  double y(int p) const { return y0 + p * dy; }

  /// Nodes 2..mx-2 along x (and 2..my-2 along y) carry the five-point stencils.
  int interior_count() const { return (mx - 3) * (my - 3); }

  bool operator==(const Grid&) const = default;
};

/// Builds a grid from extents; dx = lx/mx, dy = ly/my.
/// Throws std::invalid_argument for mx or my below 5 or non-positive extents.
Grid build_grid(double x0, double y0, double lx, double ly, int mx, int my);

/// Builds a grid from prescribed spacings; the extents become mx*dx, my*dy.
Grid build_grid_from_spacing(double x0, double y0, double dx, double dy, int mx, int my);

enum class NodeClass { Interior, BoundaryLayer };

/// Interior iff 2 <= l <= mx-2 and 2 <= p <= my-2. Throws std::out_of_range
/// for indices outside the grid.
NodeClass classify(const Grid& grid, int l, int p);

inline bool is_interior(const Grid& grid, int l, int p) {
  return l >= 2 && l <= grid.mx - 2 && p >= 2 && p <= grid.my - 2;
}

/// Conservative flow field phi = (h, hu, hv) at time t.
struct FlowState {
  Grid grid;
  Field h;
  Field hu;
  Field hv;
  double t = 0.0;

  static FlowState zeros(const Grid& grid, double t = 0.0);

  bool all_finite() const;
};

struct Velocities {
  Field u;
  Field v;
};

/// u = hu/h, v = hv/h on cells with h >= h_eps; zero on drier cells.
Velocities primitive_velocities(const FlowState& state, double h_eps);

/// Masked division for a single node.
inline void primitive_at(double h, double hu, double hv, double h_eps, double& u, double& v) {
  if (h >= h_eps) {
    u = hu / h;
    v = hv / h;
  } else {
    u = 0.0;
    v = 0.0;
  }
}

}  // namespace swe
