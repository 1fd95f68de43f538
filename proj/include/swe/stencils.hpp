#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "swe/grid.hpp"

namespace swe {

/// One-dimensional first-derivative difference operators.
///   C2: centred, 2nd order, offsets -1..+1
///   C4: centred, 4th order, offsets -2..+2
///   F3: forward-biased, 3rd order, offsets -1..+2
///   B3: backward-biased, 3rd order, offsets -2..+1
enum class StencilKind { C2, C4, F3, B3 };

enum class Axis { X, Y };

struct StencilTaps {
  int first_offset;
  int count;
  std::array<double, 5> weights;
  double scale;  // weights are divided by scale * delta
};

constexpr StencilTaps taps(StencilKind kind) {
  switch (kind) {
    case StencilKind::C2:
      return {-1, 3, {-1.0, 0.0, 1.0, 0.0, 0.0}, 2.0};
    case StencilKind::C4:
      return {-2, 5, {1.0, -8.0, 0.0, 8.0, -1.0}, 12.0};
    case StencilKind::F3:
      return {-1, 4, {-2.0, -3.0, 6.0, -1.0, 0.0}, 6.0};
    case StencilKind::B3:
      return {-2, 4, {1.0, -6.0, 3.0, 2.0, 0.0}, 6.0};
  }
  return {0, 0, {}, 1.0};
}

namespace stencil {

// Pointwise kernels on strided storage. `c` points at the evaluation node and
// `s` is the distance between neighbours along the axis (1 for x, nx for y).
// No bounds checking; callers guarantee the footprint is in range.

inline double c2(const double* c, std::ptrdiff_t s, double delta) {
  return (c[s] - c[-s]) / (2.0 * delta);
}

inline double c4(const double* c, std::ptrdiff_t s, double delta) {
  return (-c[2 * s] + 8.0 * (c[s] - c[-s]) + c[-2 * s]) / (12.0 * delta);
}

inline double f3(const double* c, std::ptrdiff_t s, double delta) {
  return (-c[2 * s] + 6.0 * c[s] - 3.0 * c[0] - 2.0 * c[-s]) / (6.0 * delta);
}

inline double b3(const double* c, std::ptrdiff_t s, double delta) {
  return (2.0 * c[s] + 3.0 * c[0] - 6.0 * c[-s] + c[-2 * s]) / (6.0 * delta);
}

inline double apply(StencilKind kind, const double* c, std::ptrdiff_t s, double delta) {
  switch (kind) {
    case StencilKind::C2: return c2(c, s, delta);
    case StencilKind::C4: return c4(c, s, delta);
    case StencilKind::F3: return f3(c, s, delta);
    case StencilKind::B3: return b3(c, s, delta);
  }
  return 0.0;
}

// Composite upwind pair  [w(+1) * B3 psi(+1) - w(-1) * F3 psi(-1)] / (2 delta).
// Footprint audit: B3 at +1 reads offsets -1..+2, F3 at -1 reads -2..+1, so the
// whole operator stays within -2..+2, the same as C4.
inline double upwind_pair(const double* w, const double* psi, std::ptrdiff_t s, double delta) {
  return (w[s] * b3(psi + s, s, delta) - w[-s] * f3(psi - s, s, delta)) / (2.0 * delta);
}

}  // namespace stencil

/// Derivative field with a validity mask; invalid nodes hold zero.
struct StencilResult {
  Field values;
  std::vector<unsigned char> valid;
};

/// Applies `kind` along `axis` at every interior node; boundary-layer nodes
/// are zero-filled and flagged invalid. Throws std::invalid_argument for a
/// field that does not match the grid or a non-positive delta.
StencilResult apply_stencil(const Field& field, const Grid& grid, Axis axis, StencilKind kind, double delta);

/// Single-node evaluation; throws std::out_of_range when the footprint leaves the grid.
double apply_stencil_at(const Field& field, const Grid& grid, Axis axis, StencilKind kind, double delta, int l,
                        int p);

/// The composite operator  d2(w d3-/+ psi)  evaluated on interior nodes.
StencilResult upwind_pair(const Field& w, const Field& psi, const Grid& grid, Axis axis, double delta);

double upwind_pair_at(const Field& w, const Field& psi, const Grid& grid, Axis axis, double delta, int l, int p);

}  // namespace swe
