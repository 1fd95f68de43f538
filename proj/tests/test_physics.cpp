#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "swe/physics.hpp"

using namespace swe;

TEST_CASE("x flux") {
  const CellVec3 e = flux_E(2.0, 3.0, 1.0, 10.0);
  CHECK(e[0] == 6.0);
  CHECK(e[1] == 38.0);
  CHECK(e[2] == 6.0);
  CHECK(flux_E(0.0, 0.0, 0.0, 10.0) == CellVec3{0.0, 0.0, 0.0});
  CHECK(flux_E(1.0, 0.0, 0.0, 10.0) == CellVec3{0.0, 5.0, 0.0});
}

TEST_CASE("y flux mirrors the x flux") {
  const CellVec3 f = flux_F(2.0, 3.0, 1.0, 10.0);
  CHECK(f[0] == 2.0);
  CHECK(f[1] == 6.0);
  CHECK(f[2] == 22.0);
  CHECK(flux_F(0.0, 0.0, 0.0, 10.0) == CellVec3{0.0, 0.0, 0.0});
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double h = std::abs(d(rng)), u = d(rng), v = d(rng);
    const CellVec3 fy = flux_F(h, u, v, 9.81);
    const CellVec3 ex = flux_E(h, v, u, 9.81);
    CHECK(fy[0] == ex[0]);
    CHECK(fy[1] == doctest::Approx(ex[2]).epsilon(1e-15));
    CHECK(fy[2] == ex[1]);
  }
}

TEST_CASE("fluxes at rest are hydrostatic") {
  for (double h : {0.0, 0.3, 2.0}) {
    CHECK(flux_E(h, 0, 0, 10) == CellVec3{0.0, 5.0 * h * h, 0.0});
    CHECK(flux_F(h, 0, 0, 10) == CellVec3{0.0, 0.0, 5.0 * h * h});
  }
}

TEST_CASE("Manning friction values and signs") {
  PhysParams p;
  p.n_manning = 0.025;
  p.c0 = 40.0;
  const FrictionSlope still = manning_friction(1.0, 0.0, 0.0, p);
  CHECK(still.sfx == 0.0);
  CHECK(still.sfy == 0.0);
  const FrictionSlope f = manning_friction(1.0, 1.0, 1.0, p);
  CHECK(f.sfx == doctest::Approx(7.8125e-7).epsilon(1e-12));
  CHECK(f.sfy == doctest::Approx(7.8125e-7).epsilon(1e-12));
  const FrictionSlope r = manning_friction(1.0, -1.0, 1.0, p);
  CHECK(r.sfx == doctest::Approx(-7.8125e-7).epsilon(1e-12));
  CHECK(manning_friction(1e-9, 5.0, 5.0, p).sfx == 0.0);
}

TEST_CASE("Manning friction opposes motion under reflections") {
  PhysParams p;
  p.n_manning = 0.03;
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-4.0, 4.0), depth(0.01, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double h = depth(rng), u = d(rng), v = d(rng);
    const FrictionSlope a = manning_friction(h, u, v, p);
    const FrictionSlope b = manning_friction(h, -u, v, p);
    const FrictionSlope c = manning_friction(h, u, -v, p);
    CHECK(b.sfx == doctest::Approx(-a.sfx).epsilon(1e-14));
    CHECK(std::abs(b.sfy) == doctest::Approx(std::abs(a.sfy)).epsilon(1e-14));
    CHECK(std::abs(c.sfx) == doctest::Approx(std::abs(a.sfx)).epsilon(1e-14));
    CHECK(a.sfx * u >= 0.0);
    CHECK(a.sfy * v >= 0.0);
  }
}

TEST_CASE("source vector") {
  CHECK(source_G(0.0, 0.3, 0.1, 0.0, 0.0, 10.0) == CellVec3{0.0, 0.0, 0.0});
  const CellVec3 s = source_G(1.0, 0.01, 0.0, 0.0, 0.0, 10.0);
  CHECK(s[1] == doctest::Approx(0.1));
  CHECK(s[2] == 0.0);
  CHECK(source_G(2.0, 0.2, -0.1, 0.2, -0.1, 10.0) == CellVec3{0.0, 0.0, 0.0});
  const CellVec3 one = source_G(1.0, 0.05, -0.02, 0.01, 0.003, 9.81);
  const CellVec3 three = source_G(3.0, 0.05, -0.02, 0.01, 0.003, 9.81);
  CHECK(three[1] == doctest::Approx(3.0 * one[1]));
  CHECK(three[2] == doctest::Approx(3.0 * one[2]));
}

TEST_CASE("flux Jacobian in primitive variables") {
  CHECK(jacobian_E(1.0, 2.0, 3.0, 10.0) == Mat3{2, 1, 0, 14, 4, 0, 6, 3, 2});
  CHECK(jacobian_E(0.0, 0.0, 0.0, 10.0) == Mat3{});
  CHECK(jacobian_E(1.0, 0.0, 0.0, 10.0) == Mat3{0, 1, 0, 10, 0, 0, 0, 0, 0});
}

TEST_CASE("Jacobians agree with central differences") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-2.0, 2.0), depth(0.2, 3.0);
  const double g = 9.81, eps = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const double h = depth(rng), u = d(rng), v = d(rng);
    // Primitive form.
    const Mat3 jp = jacobian_E(h, u, v, g);
    const double prim[3] = {h, u, v};
    for (int c = 0; c < 3; ++c) {
      double lo[3] = {prim[0], prim[1], prim[2]}, hi[3] = {prim[0], prim[1], prim[2]};
      lo[c] -= eps;
      hi[c] += eps;
      const CellVec3 a = flux_E(hi[0], hi[1], hi[2], g), b = flux_E(lo[0], lo[1], lo[2], g);
      for (int r = 0; r < 3; ++r) {
        const double fd = (a[r] - b[r]) / (2 * eps);
        CHECK(std::abs(fd - jp[3 * r + c]) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
    // Conservative forms.
    const double cons[3] = {h, h * u, h * v};
    const auto as_e = [g](const double* q) { return flux_E(q[0], q[1] / q[0], q[2] / q[0], g); };
    const auto as_f = [g](const double* q) { return flux_F(q[0], q[1] / q[0], q[2] / q[0], g); };
    const Mat3 je = conservative_jacobian_E(h, u, v, g);
    const Mat3 jf = conservative_jacobian_F(h, u, v, g);
    for (int c = 0; c < 3; ++c) {
      double lo[3] = {cons[0], cons[1], cons[2]}, hi[3] = {cons[0], cons[1], cons[2]};
      lo[c] -= eps;
      hi[c] += eps;
      const CellVec3 ea = as_e(hi), eb = as_e(lo), fa = as_f(hi), fb = as_f(lo);
      for (int r = 0; r < 3; ++r) {
        const double fde = (ea[r] - eb[r]) / (2 * eps), fdf = (fa[r] - fb[r]) / (2 * eps);
        CHECK(std::abs(fde - je[3 * r + c]) <= 1e-5 * std::max(1.0, std::abs(fde)));
        CHECK(std::abs(fdf - jf[3 * r + c]) <= 1e-5 * std::max(1.0, std::abs(fdf)));
      }
    }
  }
}

TEST_CASE("flux velocities are exact when wet and bounded when nearly dry") {
  double u, v;
  flux_velocities(2.0, 6.0, -2.0, 1e-3, u, v);
  CHECK(u == 3.0);
  CHECK(v == -1.0);
  flux_velocities(0.0, 1.0, 1.0, 1e-3, u, v);
  CHECK(u == 0.0);
  CHECK(v == 0.0);
  // Continuous across the threshold.
  double u_lo, v_lo, u_hi, v_hi;
  flux_velocities(1e-3 * (1 - 1e-12), 2e-3, 0.0, 1e-3, u_lo, v_lo);
  flux_velocities(1e-3, 2e-3, 0.0, 1e-3, u_hi, v_hi);
  CHECK(u_lo == doctest::Approx(u_hi).epsilon(1e-9));
  // Thin film with finite momentum yields a bounded velocity.
  flux_velocities(1e-9, 1e-3, 0.0, 1e-3, u, v);
  CHECK(std::abs(u) < 1e-2);
}

TEST_CASE("paraboloid slopes") {
  const Grid g = build_grid(0, 0, 4, 4, 8, 8);
  const BedSlopes s = paraboloid_slopes(g, 0.1, 1.0, 2.0, 2.0);
  CHECK(s.s0x[g.index(4, 4)] == 0.0);
  CHECK(s.s0y[g.index(4, 4)] == 0.0);
  CHECK(s.s0x[g.index(6, 4)] == doctest::Approx(0.2));  // x - xc = 1
  CHECK(s.s0y[g.index(4, 0)] == doctest::Approx(-0.4));
  const BedSlopes n = s.negated();
  CHECK(n.s0x[g.index(6, 4)] == doctest::Approx(-0.2));
  CHECK_THROWS_AS(paraboloid_slopes(g, 0.1, 0.0, 2, 2), std::invalid_argument);
  const Grid flood = build_grid_from_spacing(0, 0, 8.89, 12.36, 9, 81);
  const BedSlopes f = paraboloid_slopes(flood, 0.1, 1.0, 40.0, 500.0);
  for (int l = 0; l <= flood.mx; ++l) CHECK(f.s0x[flood.index(l, 3)] == doctest::Approx(0.2 * (flood.x(l) - 40.0)));
}

TEST_CASE("constant and flat slopes") {
  const Grid g = build_grid(0, 0, 1, 1, 5, 6);
  const BedSlopes c = BedSlopes::constant(g, 0.01, -0.02);
  CHECK(c.s0x.size() == g.size());
  CHECK(c.s0y[5] == -0.02);
  const BedSlopes f = BedSlopes::flat(g);
  CHECK(f.s0x[3] == 0.0);
}

TEST_CASE("parameter validation") {
  PhysParams p;
  CHECK_NOTHROW(p.validate());
  p.g = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PhysParams{};
  p.n_manning = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PhysParams{};
  p.h_eps = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = PhysParams{};
  p.c0 = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
