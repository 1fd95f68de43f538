#include "swe/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace swe {

void PhysParams::validate() const {
  if (!(g > 0.0)) throw std::invalid_argument("gravity must be positive");
  if (!(c0 > 0.0)) throw std::invalid_argument("c0 must be positive");
  if (!(n_manning >= 0.0)) throw std::invalid_argument("Manning roughness must be non-negative");
  if (!(h_eps > 0.0)) throw std::invalid_argument("wet/dry threshold must be positive");
}

FrictionSlope manning_friction(double h, double u, double v, const PhysParams& params) {
  if (h < params.h_eps || params.n_manning == 0.0) return {};
  const double denom = params.c0 * params.c0 * std::pow(h, 4.0 / 3.0);
  const double n2 = params.n_manning * params.n_manning;
  const double au = std::abs(u);
  const double av = std::abs(v);
  const double sfx = n2 * (std::copysign(au * std::sqrt(au), u) + u * std::sqrt(av)) / denom;
  const double sfy = n2 * (std::copysign(av * std::sqrt(av), v) + v * std::sqrt(au)) / denom;
  return {sfx, sfy};
}

Mat3 jacobian_E(double h, double u, double v, double g) {
  return {u,         h,           0.0,  //
          u * u + g * h, 2.0 * h * u, 0.0,  //
          u * v,     h * v,       h * u};
}

Mat3 conservative_jacobian_E(double h, double u, double v, double g) {
  return {0.0,           1.0,     0.0,  //
          g * h - u * u, 2.0 * u, 0.0,  //
          -u * v,        v,       u};
}

Mat3 conservative_jacobian_F(double h, double u, double v, double g) {
  return {0.0,           0.0, 1.0,  //
          -u * v,        v,   u,    //
          g * h - v * v, 0.0, 2.0 * v};
}

BedSlopes BedSlopes::flat(const Grid& grid) { return constant(grid, 0.0, 0.0); }

BedSlopes BedSlopes::constant(const Grid& grid, double s0x, double s0y) {
  BedSlopes s;
  s.s0x.assign(grid.size(), s0x);
  s.s0y.assign(grid.size(), s0y);
  return s;
}

BedSlopes BedSlopes::negated() const {
  BedSlopes s = *this;
  for (double& x : s.s0x) x = -x;
  for (double& y : s.s0y) y = -y;
  return s;
}

BedSlopes paraboloid_slopes(const Grid& grid, double h0, double d, double xc, double yc) {
  if (!(d > 0.0)) throw std::invalid_argument("paraboloid radius d must be positive");
  BedSlopes s;
  s.s0x.resize(grid.size());
  s.s0y.resize(grid.size());
  const double scale = 2.0 * h0 / (d * d);
  for (int p = 0; p <= grid.my; ++p) {
    for (int l = 0; l <= grid.mx; ++l) {
      const std::size_t i = grid.index(l, p);
      s.s0x[i] = scale * (grid.x(l) - xc);
      s.s0y[i] = scale * (grid.y(p) - yc);
    }
  }
  return s;
}

}  // namespace swe
