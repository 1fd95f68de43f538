#include "swe/stencils.hpp"

#include <stdexcept>
#include <string>

namespace swe {

namespace {

void check_inputs(const Field& field, const Grid& grid, double delta) {
  if (field.size() != grid.size()) {
    throw std::invalid_argument("field size " + std::to_string(field.size()) + " does not match grid size " +
                                std::to_string(grid.size()));
  }
  if (!(delta > 0.0)) throw std::invalid_argument("stencil spacing must be positive");
}

std::ptrdiff_t stride_of(const Grid& grid, Axis axis) {
  return axis == Axis::X ? 1 : static_cast<std::ptrdiff_t>(grid.nx());
}

// Checks that offsets [lo, hi] around (l, p) along `axis` stay on the grid.
void check_footprint(const Grid& grid, Axis axis, int l, int p, int lo, int hi) {
  if (l < 0 || l > grid.mx || p < 0 || p > grid.my) {
    throw std::out_of_range("node outside grid");
  }
  const int pos = axis == Axis::X ? l : p;
  const int last = axis == Axis::X ? grid.mx : grid.my;
  if (pos + lo < 0 || pos + hi > last) {
    throw std::out_of_range("stencil footprint [" + std::to_string(pos + lo) + ", " + std::to_string(pos + hi) +
                            "] leaves the grid at node (" + std::to_string(l) + ", " + std::to_string(p) + ")");
  }
}

template <typename Kernel>
StencilResult sweep_interior(const Grid& grid, Kernel&& kernel) {
  StencilResult out;
  out.values.assign(grid.size(), 0.0);
  out.valid.assign(grid.size(), 0);
  for (int p = 2; p <= grid.my - 2; ++p) {
    for (int l = 2; l <= grid.mx - 2; ++l) {
      const std::size_t i = grid.index(l, p);
      out.values[i] = kernel(i);
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace

StencilResult apply_stencil(const Field& field, const Grid& grid, Axis axis, StencilKind kind, double delta) {
  check_inputs(field, grid, delta);
  const std::ptrdiff_t s = stride_of(grid, axis);
  const double* base = field.data();
  return sweep_interior(grid, [&](std::size_t i) { return stencil::apply(kind, base + i, s, delta); });
}

double apply_stencil_at(const Field& field, const Grid& grid, Axis axis, StencilKind kind, double delta, int l,
                        int p) {
  check_inputs(field, grid, delta);
  const StencilTaps t = taps(kind);
  check_footprint(grid, axis, l, p, t.first_offset, t.first_offset + t.count - 1);
  return stencil::apply(kind, field.data() + grid.index(l, p), stride_of(grid, axis), delta);
}

StencilResult upwind_pair(const Field& w, const Field& psi, const Grid& grid, Axis axis, double delta) {
  check_inputs(w, grid, delta);
  check_inputs(psi, grid, delta);
  const std::ptrdiff_t s = stride_of(grid, axis);
  return sweep_interior(grid, [&](std::size_t i) { return stencil::upwind_pair(w.data() + i, psi.data() + i, s, delta); });
}

double upwind_pair_at(const Field& w, const Field& psi, const Grid& grid, Axis axis, double delta, int l, int p) {
  check_inputs(w, grid, delta);
  check_inputs(psi, grid, delta);
  check_footprint(grid, axis, l, p, -2, 2);
  const std::size_t i = grid.index(l, p);
  return stencil::upwind_pair(w.data() + i, psi.data() + i, stride_of(grid, axis), delta);
}

}  // namespace swe
