#include "swe/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swe {

namespace {

void check_counts(int mx, int my) {
  if (mx < 5 || my < 5) {
    throw std::invalid_argument("grid needs at least 5 cells per axis (got mx=" + std::to_string(mx) +
                                ", my=" + std::to_string(my) + ")");
  }
}

}  // namespace

Grid build_grid(double x0, double y0, double lx, double ly, int mx, int my) {
  check_counts(mx, my);
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw std::invalid_argument("grid extents must be positive");
  }
  Grid g;
  g.x0 = x0;
  g.y0 = y0;
  g.lx = lx;
  g.ly = ly;
  g.mx = mx;
  g.my = my;
  g.dx = lx / mx;
  g.dy = ly / my;
  return g;
}

Grid build_grid_from_spacing(double x0, double y0, double dx, double dy, int mx, int my) {
  check_counts(mx, my);
  if (!(dx > 0.0) || !(dy > 0.0)) {
    throw std::invalid_argument("grid spacings must be positive");
  }
  Grid g;
  g.x0 = x0;
  g.y0 = y0;
  g.mx = mx;
  g.my = my;
  g.dx = dx;
  g.dy = dy;
  g.lx = dx * mx;
  g.ly = dy * my;
  return g;
}

NodeClass classify(const Grid& grid, int l, int p) {
  if (l < 0 || l > grid.mx || p < 0 || p > grid.my) {
    throw std::out_of_range("node (" + std::to_string(l) + ", " + std::to_string(p) + ") outside grid");
  }
  return is_interior(grid, l, p) ? NodeClass::Interior : NodeClass::BoundaryLayer;
}

FlowState FlowState::zeros(const Grid& grid, double t) {
  FlowState s;
  s.grid = grid;
  s.h.assign(grid.size(), 0.0);
  s.hu.assign(grid.size(), 0.0);
  s.hv.assign(grid.size(), 0.0);
  s.t = t;
  return s;
}

bool FlowState::all_finite() const {
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!std::isfinite(h[i]) || !std::isfinite(hu[i]) || !std::isfinite(hv[i])) return false;
  }
  return std::isfinite(t);
}

Velocities primitive_velocities(const FlowState& state, double h_eps) {
  Velocities vel;
  vel.u.resize(state.h.size());
  vel.v.resize(state.h.size());
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    primitive_at(state.h[i], state.hu[i], state.hv[i], h_eps, vel.u[i], vel.v[i]);
  }
  return vel;
}

}  // namespace swe
