#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "swe/verification.hpp"

using namespace swe;

TEST_CASE("radial basin closed form") {
  const ThackerParams p;
  const ExactValue c = thacker1_exact(2.0, 2.0, 0.0, p);
  CHECK(c.h == doctest::Approx(0.125).epsilon(1e-14));
  for (double x : {0.3, 1.7, 2.4}) {
    const ExactValue e = thacker1_exact(x, 3.1 - x, 0.0, p);
    CHECK(e.u == 0.0);
    CHECK(e.v == 0.0);
  }
  CHECK(thacker1_exact(0.0, 0.0, 0.3, p).h == 0.0);  // dry corner
  CHECK(thacker_omega(ThackerCase::Radial, p) == doctest::Approx(std::sqrt(8.0)));
  CHECK(thacker_horizon(ThackerCase::Radial, p) == doctest::Approx(6.0 * std::numbers::pi / std::sqrt(8.0)));
}

TEST_CASE("planar basin closed form") {
  const ThackerParams p;
  const ExactValue c = thacker2_exact(2.0, 2.0, 0.0, p);
  CHECK(c.u == 0.0);
  CHECK(c.v == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c.h == doctest::Approx(0.075).epsilon(1e-14));
  CHECK(thacker_omega(ThackerCase::Planar, p) == doctest::Approx(std::sqrt(2.0)));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const double t = d(rng);
    const ExactValue a = thacker2_exact(d(rng), d(rng), t, p);
    const ExactValue b = thacker2_exact(d(rng), d(rng), t, p);
    CHECK(a.u == b.u);
    CHECK(a.v == b.v);
  }
}

TEST_CASE("bed elevation") {
  const ThackerParams p;
  CHECK(paraboloid_z(2.0, 2.0, p) == doctest::Approx(-0.1));
  CHECK(paraboloid_z(3.0, 2.0, p) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(paraboloid_z(2.0, 4.0, p) == doctest::Approx(0.3));
}

TEST_CASE("both solutions repeat after one period") {
  const ThackerParams p;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.5, 3.5);
  for (ThackerCase which : {ThackerCase::Radial, ThackerCase::Planar}) {
    const double period = 2.0 * std::numbers::pi / thacker_omega(which, p);
    for (int i = 0; i < 30; ++i) {
      const double x = d(rng), y = d(rng), t = d(rng);
      const ExactValue a = thacker_exact(which, x, y, t, p);
      const ExactValue b = thacker_exact(which, x, y, t + period, p);
      CHECK(a.h == doctest::Approx(b.h).epsilon(1e-12).scale(1.0));
      CHECK(a.u == doctest::Approx(b.u).epsilon(1e-12).scale(1.0));
      CHECK(a.v == doctest::Approx(b.v).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("closed forms satisfy the continuous equations in the wet region") {
  const ThackerParams p;
  const double delta = 1e-3;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> pos(1.5, 2.5), time(0.0, 5.0);
  for (ThackerCase which : {ThackerCase::Radial, ThackerCase::Planar}) {
    const auto at = [&](double x, double y, double t) { return thacker_exact(which, x, y, t, p); };
    int checked = 0;
    while (checked < 20) {
      const double x = pos(rng), y = pos(rng), t = time(rng);
      bool wet = true;
      for (int i = -1; i <= 1 && wet; ++i) {
        for (int j = -1; j <= 1; ++j) wet = wet && at(x + i * delta, y + j * delta, t).h > 1e-3;
      }
      if (!wet) continue;
      ++checked;
      const auto q = [&](double xx, double yy, double tt) {
        const ExactValue e = at(xx, yy, tt);
        return std::array<double, 9>{e.h,
                                     e.h * e.u,
                                     e.h * e.v,
                                     e.h * e.u,
                                     e.h * e.u * e.u + 5.0 * e.h * e.h,
                                     e.h * e.u * e.v,
                                     e.h * e.v,
                                     e.h * e.u * e.v,
                                     e.h * e.v * e.v + 5.0 * e.h * e.h};
      };
      const auto dt = [&](int c) { return (q(x, y, t + delta)[c] - q(x, y, t - delta)[c]) / (2 * delta); };
      const auto dx = [&](int c) { return (q(x + delta, y, t)[c] - q(x - delta, y, t)[c]) / (2 * delta); };
      const auto dy = [&](int c) { return (q(x, y + delta, t)[c] - q(x, y - delta, t)[c]) / (2 * delta); };
      const double h = at(x, y, t).h;
      const double zx = (paraboloid_z(x + delta, y, p) - paraboloid_z(x - delta, y, p)) / (2 * delta);
      const double zy = (paraboloid_z(x, y + delta, p) - paraboloid_z(x, y - delta, p)) / (2 * delta);
      // Conserved variable c, x-flux 3+c, y-flux 6+c; momentum sources -g h grad z.
      CHECK(std::abs(dt(0) + dx(3) + dy(6)) < 1e-3);
      CHECK(std::abs(dt(1) + dx(4) + dy(7) + p.g * h * zx) < 1e-3);
      CHECK(std::abs(dt(2) + dx(5) + dy(8) + p.g * h * zy) < 1e-3);
    }
  }
}

TEST_CASE("interior norm") {
  const Grid g = build_grid(0, 0, 1, 2, 10, 8);
  CHECK(l2_norm(Field(g.size(), 1.0), g) == doctest::Approx(std::sqrt(g.dx * g.dy * 7 * 5)));
  CHECK(l2_norm(Field(g.size(), 0.0), g) == 0.0);
  Field one(g.size(), 0.0);
  one[g.index(4, 3)] = -2.5;
  CHECK(l2_norm(one, g) == doctest::Approx(2.5 * std::sqrt(g.dx * g.dy)));
  Field edge(g.size(), 0.0);
  edge[g.index(1, 3)] = 7.0;
  CHECK(l2_norm(edge, g) == 0.0);

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Field a(g.size()), b(g.size()), s(g.size()), c(g.size());
    const double scale = 5.0 * d(rng);
    for (std::size_t j = 0; j < g.size(); ++j) {
      a[j] = d(rng);
      b[j] = d(rng);
      s[j] = a[j] + b[j];
      c[j] = scale * a[j];
    }
    CHECK(l2_norm(c, g) == doctest::Approx(std::abs(scale) * l2_norm(a, g)).epsilon(1e-13));
    CHECK(l2_norm(s, g) <= l2_norm(a, g) + l2_norm(b, g) + 1e-15);
  }
}

TEST_CASE("time maximum") {
  CHECK(linf_time_norm({1.0, 3.0, 2.0}) == 3.0);
  CHECK(linf_time_norm({0.0}) == 0.0);
  CHECK(linf_time_norm({0.1, 0.2, 0.5}) == 0.5);
  CHECK_THROWS_AS(linf_time_norm({}), std::invalid_argument);
}

TEST_CASE("observed order") {
  CHECK(convergence_order(2.0413e-2, 2.8230e-4) == doctest::Approx(3.8967).epsilon(1e-4));
  CHECK(convergence_order(0.3, 0.3) == 0.0);
  CHECK(convergence_order(81.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  for (int q = 1; q <= 4; ++q) {
    const double e = 0.0123;
    CHECK(std::abs(convergence_order(e, e / std::pow(3.0, q)) - q) < 1e-12);
  }
  CHECK_THROWS_AS(convergence_order(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(convergence_order(1.0, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  ThackerParams p;
  CHECK_NOTHROW(p.validate());
  p.r0 = 1.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ThackerParams{};
  p.h0 = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("exact state and boundary provider agree") {
  const ThackerParams p;
  const Grid g = thacker_grid(p, 1.0 / 9.0);
  CHECK(g.mx == 36);
  CHECK(g.dx == doctest::Approx(1.0 / 9.0));
  const FlowState s = thacker_state(ThackerCase::Planar, g, 0.7, p);
  const BoundaryProvider bc = thacker_boundary(ThackerCase::Planar, p, g);
  for (int l : {0, 1, 17, 35, 36}) {
    const BoundaryValue b = bc(l, 0, 0.7);
    const std::size_t i = g.index(l, 0);
    CHECK(b.h == s.h[i]);
    if (b.h > 0.0) CHECK(b.u * b.h == doctest::Approx(s.hu[i]));
  }
  const BedSlopes sl = thacker_slopes(g, p);
  const std::size_t i = g.index(27, 9);
  CHECK(sl.s0x[i] == doctest::Approx(-2.0 * p.h0 * (g.x(27) - 2.0)));
  CHECK(sl.s0y[i] == doctest::Approx(-2.0 * p.h0 * (g.y(9) - 2.0)));
}

TEST_CASE("short basin run tracks the exact solution") {
  ThackerRun run;
  run.spacing = 1.0 / 27.0;
  run.t_end = 0.2;
  const ErrorReport r = run_thacker(run);
  CHECK(r.status == RunStatus::Completed);
  CHECK(r.t_reached == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.steps > 0);
  CHECK(r.e_h > 0.0);
  CHECK(r.e_h < 2e-3);
  CHECK(r.h_norm_max > 0.0);
}

TEST_CASE("convergence table marks divergent rungs") {
  ThackerRun base;
  base.t_end = 0.05;
  // The second rung's step is far beyond the stable range.
  const std::vector<LadderRung> ladder = {{1.0 / 9.0, 0.01}, {1.0 / 27.0, 5.0}, {1.0 / 27.0, 0.01}};
  const auto table = run_convergence_study(base, ladder);
  REQUIRE(table.size() == 3);
  CHECK(table[0].status == RunStatus::Completed);
  CHECK(table[1].status != RunStatus::Completed);
  CHECK_FALSE(table[1].order_h.has_value());
  CHECK_FALSE(table[2].order_h.has_value());

  std::ostringstream os;
  write_convergence_csv(os, table);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("dx,dy,k,e_h,order_h,e_u,order_u,e_v,order_v", 0) == 0);
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
