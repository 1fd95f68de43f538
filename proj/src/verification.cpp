#include "swe/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "swe/text_format.hpp"

namespace swe {

void ThackerParams::validate() const {
  if (!(l > 0.0) || !(h0 > 0.0) || !(d > 0.0) || !(g > 0.0) || !(r0 > 0.0) || !(eta > 0.0)) {
    throw std::invalid_argument("basin parameters must be positive");
  }
  if (!(r0 < d)) throw std::invalid_argument("initial shoreline radius must be below d");
}

double paraboloid_z(double x, double y, const ThackerParams& p) {
  const double cx = x - 0.5 * p.l;
  const double cy = y - 0.5 * p.l;
  return p.h0 * ((cx * cx + cy * cy) / (p.d * p.d) - 1.0);
}

double thacker_omega(ThackerCase which, const ThackerParams& p) {
  const double factor = which == ThackerCase::Radial ? 8.0 : 2.0;
  return std::sqrt(factor * p.g * p.h0) / p.d;
}

double thacker_horizon(ThackerCase which, const ThackerParams& p) {
  return 6.0 * std::numbers::pi / thacker_omega(which, p);
}

ExactValue thacker1_exact(double x, double y, double t, const ThackerParams& p) {
  const double omega = thacker_omega(ThackerCase::Radial, p);
  const double d2 = p.d * p.d;
  const double r0sq = p.r0 * p.r0;
  const double big_r = (d2 - r0sq) / (d2 + r0sq);
  const double cx = x - 0.5 * p.l;
  const double cy = y - 0.5 * p.l;
  const double r2 = cx * cx + cy * cy;
  const double denom = 1.0 - big_r * std::cos(omega * t);
  const double one_minus_r2 = 1.0 - big_r * big_r;
  const double surface =
      p.h0 * (std::sqrt(one_minus_r2) / denom - (r2 / d2) * (one_minus_r2 / (denom * denom) - 1.0) - 1.0);
  ExactValue e;
  e.h = std::max(0.0, surface - paraboloid_z(x, y, p));
  const double rate = omega * big_r * std::sin(omega * t) / (2.0 * denom);
  e.u = rate * cx;
  e.v = rate * cy;
  return e;
}

ExactValue thacker2_exact(double x, double y, double t, const ThackerParams& p) {
  const double omega = thacker_omega(ThackerCase::Planar, p);
  const double cx = x - 0.5 * p.l;
  const double cy = y - 0.5 * p.l;
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  const double surface = p.eta * p.h0 / (p.d * p.d) * (2.0 * cx * c + 2.0 * cy * s - p.eta);
  ExactValue e;
  e.h = std::max(0.0, surface - paraboloid_z(x, y, p));
  e.u = -p.eta * omega * s;
  e.v = p.eta * omega * c;
  return e;
}

ExactValue thacker_exact(ThackerCase which, double x, double y, double t, const ThackerParams& p) {
  return which == ThackerCase::Radial ? thacker1_exact(x, y, t, p) : thacker2_exact(x, y, t, p);
}

double l2_norm(const Field& field, const Grid& grid) {
  if (field.size() != grid.size()) throw std::invalid_argument("field does not match the grid");
  double sum = 0.0;
  for (int p = 2; p <= grid.my - 2; ++p) {
    for (int l = 2; l <= grid.mx - 2; ++l) {
      const double w = field[grid.index(l, p)];
      sum += w * w;
    }
  }
  return std::sqrt(grid.dx * grid.dy * sum);
}

double linf_time_norm(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("empty norm series");
  return *std::max_element(series.begin(), series.end());
}

double convergence_order(double e_coarse, double e_fine, double refinement_ratio) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) throw std::invalid_argument("errors must be positive");
  if (!(refinement_ratio > 1.0)) throw std::invalid_argument("refinement ratio must exceed 1");
  return std::log(e_coarse / e_fine) / std::log(refinement_ratio);
}

FlowState thacker_state(ThackerCase which, const Grid& grid, double t, const ThackerParams& p) {
  FlowState s = FlowState::zeros(grid, t);
  for (int q = 0; q <= grid.my; ++q) {
    for (int l = 0; l <= grid.mx; ++l) {
      const ExactValue e = thacker_exact(which, grid.x(l), grid.y(q), t, p);
      const std::size_t i = grid.index(l, q);
      s.h[i] = e.h;
      s.hu[i] = e.h * e.u;
      s.hv[i] = e.h * e.v;
    }
  }
  return s;
}

BoundaryProvider thacker_boundary(ThackerCase which, const ThackerParams& p, const Grid& grid) {
  return [which, p, grid](int l, int q, double t) {
    const ExactValue e = thacker_exact(which, grid.x(l), grid.y(q), t, p);
    return BoundaryValue{e.h, e.u, e.v};
  };
}

BedSlopes thacker_slopes(const Grid& grid, const ThackerParams& p) {
  return paraboloid_slopes(grid, p.h0, p.d, 0.5 * p.l, 0.5 * p.l).negated();
}

Grid thacker_grid(const ThackerParams& p, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  const int m = static_cast<int>(std::lround(p.l / spacing));
  return build_grid(0.0, 0.0, p.l, p.l, m, m);
}

NormCache thacker_norm_envelope(ThackerCase which, const Grid& grid, const ThackerParams& p, double t_end,
                                double h_eps, int samples) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  NormCache cache = NormCache::for_grid(grid);
  for (int i = 0; i <= samples; ++i) {
    const double t = t_end * static_cast<double>(i) / samples;
    cache.observe(thacker_state(which, grid, t, p), p.g, h_eps);
  }
  return cache;
}

ErrorReport run_thacker(const ThackerRun& run) {
  run.params.validate();
  PhysParams physics = run.physics;
  physics.g = run.params.g;
  physics.validate();

  const Grid grid = thacker_grid(run.params, run.spacing);
  const double t_end = run.t_end.value_or(thacker_horizon(run.which, run.params));
  const FlowState initial = thacker_state(run.which, grid, 0.0, run.params);

  GovernorConfig gcfg;
  gcfg.gamma = run.gamma;
  gcfg.clamp_to_cfl = run.clamp_to_cfl;
  if (run.fixed_k) {
    gcfg.policy = StepPolicy::Fixed;
    gcfg.fixed_k = *run.fixed_k;
  }
  Governor governor(gcfg, initial, physics.g, physics.h_eps);
  governor.seed(thacker_norm_envelope(run.which, grid, run.params, t_end, physics.h_eps));

  MarchSetup setup;
  setup.physics = physics;
  setup.stage = run.stage;
  setup.slopes = thacker_slopes(grid, run.params);
  setup.boundary = thacker_boundary(run.which, run.params, grid);
  setup.t_end = t_end;

  ErrorReport report;
  report.dx = grid.dx;
  report.dy = grid.dy;
  if (run.fixed_k) report.k = *run.fixed_k;

  Field dh(grid.size(), 0.0), du(grid.size(), 0.0), dv(grid.size(), 0.0);
  const auto on_level = [&](long, const FlowState& s, const StepBound* bound) {
    if (bound && report.k == 0.0) report.k = bound->chosen_k;
    for (int q = 0; q <= grid.my; ++q) {
      for (int l = 0; l <= grid.mx; ++l) {
        const std::size_t i = grid.index(l, q);
        const ExactValue e = thacker_exact(run.which, grid.x(l), grid.y(q), s.t, run.params);
        double u, v;
        primitive_at(s.h[i], s.hu[i], s.hv[i], physics.h_eps, u, v);
        dh[i] = s.h[i] - e.h;
        const bool wet = e.h >= physics.h_eps;
        du[i] = wet ? u - e.u : 0.0;
        dv[i] = wet ? v - e.v : 0.0;
      }
    }
    report.e_h = std::max(report.e_h, l2_norm(dh, grid));
    report.e_u = std::max(report.e_u, l2_norm(du, grid));
    report.e_v = std::max(report.e_v, l2_norm(dv, grid));
    report.h_norm_max = std::max(report.h_norm_max, l2_norm(s.h, grid));
  };

  const MarchOutcome outcome = march(initial, setup, governor, on_level);
  report.status = outcome.status;
  report.steps = outcome.steps;
  report.t_reached = outcome.t;
  if (outcome.status != RunStatus::Completed) {
    // The failing level is not passed to the callback; fold it in so that a
    // blown-up run never reports a small error.
    const FlowState& s = outcome.final_state;
    if (s.all_finite()) {
      on_level(outcome.steps + 1, s, nullptr);
    } else {
      report.e_h = report.e_u = report.e_v = std::numeric_limits<double>::infinity();
    }
  }
  return report;
}

std::vector<ErrorReport> run_convergence_study(const ThackerRun& base, const std::vector<LadderRung>& ladder) {
  if (ladder.empty()) throw std::invalid_argument("empty mesh ladder");
  std::vector<ErrorReport> table;
  table.reserve(ladder.size());
  for (const LadderRung& rung : ladder) {
    ThackerRun run = base;
    run.spacing = rung.spacing;
    if (rung.k) run.fixed_k = rung.k;
    table.push_back(run_thacker(run));
  }
  const auto order = [](double coarse, double fine) -> std::optional<double> {
    if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine)) return std::nullopt;
    return convergence_order(coarse, fine);
  };
  for (std::size_t i = 1; i < table.size(); ++i) {
    const ErrorReport& c = table[i - 1];
    ErrorReport& f = table[i];
    if (c.status != RunStatus::Completed || f.status != RunStatus::Completed) continue;
    f.order_h = order(c.e_h, f.e_h);
    f.order_u = order(c.e_u, f.e_u);
    f.order_v = order(c.e_v, f.e_v);
  }
  return table;
}

void write_convergence_csv(std::ostream& out, const std::vector<ErrorReport>& table) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << "dx,dy,k,e_h,order_h,e_u,order_u,e_v,order_v\n";
  for (const ErrorReport& r : table) {
    const bool ok = r.status == RunStatus::Completed;
    const auto err = [ok](double e) { return ok ? format_double(e) : std::string("nan"); };
    out << format_double(r.dx) << ',' << format_double(r.dy) << ',' << format_double(r.k) << ',' << err(r.e_h)
        << ',' << opt(r.order_h) << ',' << err(r.e_u) << ',' << opt(r.order_u) << ',' << err(r.e_v) << ','
        << opt(r.order_v) << '\n';
  }
}

}  // namespace swe
