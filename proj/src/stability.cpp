#include "swe/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace swe {

namespace {

constexpr double kNormFloor = 1e-14;
constexpr double kStepFloor = 1e-12;

}  // namespace

double cfl_limit(double u_max, double v_max, double h_max, double g, double dx, double dy, double k_max) {
  if (h_max < 0.0) throw std::invalid_argument("h_max must be non-negative");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("spacings must be positive");
  const double c = std::sqrt(g * h_max);
  const double sx = std::abs(u_max) + c;
  const double sy = std::abs(v_max) + c;
  double k = std::numeric_limits<double>::infinity();
  if (sx > 0.0) k = std::min(k, dx / sx);
  if (sy > 0.0) k = std::min(k, dy / sy);
  return std::isfinite(k) ? k : k_max;
}

NormCache NormCache::for_grid(const Grid& grid) {
  NormCache c;
  c.beta_norm = std::sqrt(grid.dx * grid.dy * static_cast<double>(grid.mx - 3) * static_cast<double>(grid.my - 3));
  return c;
}

void NormCache::observe(const FlowState& state, double g, double h_eps) {
  const Grid& grid = state.grid;
  double su = 0.0;
  double sb = 0.0;
  for (int p = 2; p <= grid.my - 2; ++p) {
    for (int l = 2; l <= grid.mx - 2; ++l) {
      const std::size_t i = grid.index(l, p);
      double u, v;
      primitive_at(state.h[i], state.hu[i], state.hv[i], h_eps, u, v);
      const double b = u * u + 0.5 * g * state.h[i];
      su += u * u;
      sb += b * b;
    }
  }
  const double area = grid.dx * grid.dy;
  u_inf_norm = std::max(u_inf_norm, std::sqrt(area * su));
  bernoulli_inf_norm = std::max(bernoulli_inf_norm, std::sqrt(area * sb));
}

double theorem1_limit(const NormCache& cache, double dx, int mx, double gamma, double k_max) {
  if (!(gamma > 0.0) || gamma > 18.0) throw std::invalid_argument("gamma must lie in (0, 18]");
  if (mx <= 3) throw std::invalid_argument("energy-norm bound needs mx > 3");
  if (cache.u_inf_norm < kNormFloor) return k_max;
  const double factor = 48.0 / gamma * dx;
  double k = factor * cache.beta_norm / (std::sqrt(static_cast<double>(mx - 3)) * cache.u_inf_norm);
  if (cache.bernoulli_inf_norm >= kNormFloor) {
    k = std::min(k, factor * cache.u_inf_norm / cache.bernoulli_inf_norm);
  }
  return k;
}

std::string_view to_string(StepSource source) {
  switch (source) {
    case StepSource::CFL: return "CFL";
    case StepSource::Theorem1: return "Theorem1";
    case StepSource::UserOverride: return "UserOverride";
  }
  return "?";
}

void GovernorConfig::validate() const {
  if (policy == StepPolicy::Fixed && !(fixed_k > 0.0)) throw std::invalid_argument("fixed time step must be positive");
  if (!(gamma > 0.0) || gamma > 18.0) throw std::invalid_argument("gamma must lie in (0, 18]");
}

FieldMaxima field_maxima(const FlowState& state, double h_eps) {
  FieldMaxima m;
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    double u, v;
    primitive_at(state.h[i], state.hu[i], state.hv[i], h_eps, u, v);
    m.h_max = std::max(m.h_max, state.h[i]);
    m.u_max = std::max(m.u_max, std::abs(u));
    m.v_max = std::max(m.v_max, std::abs(v));
  }
  return m;
}

Governor::Governor(const GovernorConfig& cfg, const FlowState& initial, double g, double h_eps)
    : cfg_(cfg), cache_(NormCache::for_grid(initial.grid)), g_(g), h_eps_(h_eps) {
  cfg_.validate();
  if (cfg_.k_max > 0.0) {
    k_max_ = cfg_.k_max;
  } else {
    const FieldMaxima m = field_maxima(initial, h_eps);
    const double k0 = cfl_limit(m.u_max, m.v_max, m.h_max, g, initial.grid.dx, initial.grid.dy,
                                std::numeric_limits<double>::infinity());
    k_max_ = std::isfinite(k0) ? std::max(k0, kStepFloor) : std::max(initial.grid.dx, kStepFloor);
  }
  cache_.observe(initial, g, h_eps);
}

void Governor::seed(const NormCache& envelope) {
  cache_.u_inf_norm = std::max(cache_.u_inf_norm, envelope.u_inf_norm);
  cache_.bernoulli_inf_norm = std::max(cache_.bernoulli_inf_norm, envelope.bernoulli_inf_norm);
}

StepBound Governor::propose(const FlowState& current) const {
  StepBound b;
  b.gamma = cfg_.gamma;
  const FieldMaxima m = field_maxima(current, h_eps_);
  const Grid& grid = current.grid;
  b.k_cfl = cfl_limit(m.u_max, m.v_max, m.h_max, g_, grid.dx, grid.dy, k_max_);
  b.k_thm1 = theorem1_limit(cache_, grid.dx, grid.mx, cfg_.gamma, k_max_);
  if (cfg_.policy == StepPolicy::Fixed) {
    b.chosen_k = cfg_.fixed_k;
    b.source = StepSource::UserOverride;
  } else if (cfg_.clamp_to_cfl && b.k_cfl < b.k_thm1) {
    b.chosen_k = b.k_cfl;
    b.source = StepSource::CFL;
  } else {
    b.chosen_k = b.k_thm1;
    b.source = StepSource::Theorem1;
  }
  return b;
}

PentaNormReport penta_norm_diagnostic(int n, double tol, int max_iters) {
  if (n < 1) throw std::invalid_argument("matrix size must be >= 1");
  PentaNormReport rep;
  if (n == 1) return rep;

  const auto apply = [n](const std::vector<double>& x, std::vector<double>& y, bool transpose) {
    // A(i, i+1) = 8, A(i, i+2) = -1, A(i+1, i) = -8, A(i+2, i) = 1; A^T = -A.
    const double s = transpose ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      if (i + 1 < n) acc += 8.0 * x[static_cast<std::size_t>(i + 1)];
      if (i + 2 < n) acc -= x[static_cast<std::size_t>(i + 2)];
      if (i - 1 >= 0) acc -= 8.0 * x[static_cast<std::size_t>(i - 1)];
      if (i - 2 >= 0) acc += x[static_cast<std::size_t>(i - 2)];
      y[static_cast<std::size_t>(i)] = s * acc;
    }
  };

  std::vector<double> x(static_cast<std::size_t>(n));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (double& xi : x) xi = dist(rng);
  std::vector<double> ax(x.size()), atax(x.size());

  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    s = std::sqrt(s);
    for (double& e : v) e /= s;
  };
  normalize(x);

  double lambda = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    apply(x, ax, false);
    apply(ax, atax, true);
    double rq = 0.0;  // Rayleigh quotient x^T A^T A x = ||A x||^2 for unit x
    for (double e : ax) rq += e * e;
    rep.iterations = it;
    const bool done = std::abs(rq - lambda) <= tol * std::max(rq, 1.0);
    lambda = rq;
    if (done) break;
    x = atax;
    normalize(x);
  }
  rep.computed_norm = std::sqrt(lambda);
  return rep;
}

}  // namespace swe
