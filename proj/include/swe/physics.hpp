#pragma once

#include <array>
#include <cmath>

#include "swe/grid.hpp"

namespace swe {

/// Three components in (continuity, x-momentum, y-momentum) order.
using CellVec3 = std::array<double, 3>;

/// Row-major 3x3 matrix.
using Mat3 = std::array<double, 9>;

inline CellVec3 mat_vec(const Mat3& m, const CellVec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

struct PhysParams {
  double g = 10.0;          // m/s^2
  double n_manning = 0.0;   // s/m^(1/3)
  double c0 = 40.0;         // m^(1/2)/s
  double h_eps = 1e-6;      // m, wet/dry threshold

  /// Throws std::invalid_argument unless g > 0, c0 > 0, n >= 0, h_eps > 0.
  void validate() const;
};

/// Velocities used inside flux evaluations: hu/h and hv/h on cells with
/// h >= h_eps, below that sqrt(2) h q / sqrt(h^4 + h_eps^4). Continuous in
/// (h, hu, hv), so iterations across the wet/dry threshold do not jump.
inline void flux_velocities(double h, double hu, double hv, double h_eps, double& u, double& v) {
  if (h >= h_eps) {
    u = hu / h;
    v = hv / h;
    return;
  }
  const double h2 = h * h;
  const double e2 = h_eps * h_eps;
  const double scale = std::sqrt(2.0) * h / std::sqrt(h2 * h2 + e2 * e2);
  u = scale * hu;
  v = scale * hv;
}

/// x-direction flux (hu, hu^2 + g h^2/2, huv).
inline CellVec3 flux_E(double h, double u, double v, double g) {
  return {h * u, h * u * u + 0.5 * g * h * h, h * u * v};
}

/// y-direction flux (hv, huv, hv^2 + g h^2/2).
inline CellVec3 flux_F(double h, double u, double v, double g) {
  return {h * v, h * u * v, h * v * v + 0.5 * g * h * h};
}

struct FrictionSlope {
  double sfx = 0.0;
  double sfy = 0.0;
};

/// Manning friction slopes
///   Sfx = n^2 (u^{3/2} + u v^{1/2}) / (c0^2 h^{4/3}), and symmetrically Sfy,
/// with fractional powers taken on magnitudes and the leading velocity's sign
/// kept, so friction always opposes the motion. Dry cells (h < h_eps) return 0.
FrictionSlope manning_friction(double h, double u, double v, const PhysParams& params);

/// Source vector g h (0, S0x - Sfx, S0y - Sfy).
inline CellVec3 source_G(double h, double s0x, double s0y, double sfx, double sfy, double g) {
  return {0.0, g * h * (s0x - sfx), g * h * (s0y - sfy)};
}

/// Derivative of E with respect to the primitive triple (h, u, v):
///   [u,        h,    0 ]
///   [u^2 + gh, 2hu,  0 ]
///   [uv,       hv,   hu]
Mat3 jacobian_E(double h, double u, double v, double g);

/// Derivative of E with respect to the conservative triple (h, hu, hv).
Mat3 conservative_jacobian_E(double h, double u, double v, double g);

/// Derivative of F with respect to the conservative triple (h, hu, hv).
Mat3 conservative_jacobian_F(double h, double u, double v, double g);

struct BedSlopes {
  Field s0x;
  Field s0y;

  static BedSlopes flat(const Grid& grid);
  static BedSlopes constant(const Grid& grid, double s0x, double s0y);
  BedSlopes negated() const;
};

/// Gradient of the paraboloid z = h0 (r^2/d^2 - 1) centred at (xc, yc):
///   S0x = 2 h0 (x - xc)/d^2, S0y = 2 h0 (y - yc)/d^2.
/// Throws std::invalid_argument for d <= 0.
BedSlopes paraboloid_slopes(const Grid& grid, double h0, double d, double xc, double yc);

}  // namespace swe
