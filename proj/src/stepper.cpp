#include "swe/stepper.hpp"

#include <lapacke.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "swe/parallel.hpp"
#include "swe/stencils.hpp"

namespace swe {

void StageConfig::validate() const {
  if (picard_max_iters < 1) throw std::invalid_argument("picard_max_iters must be >= 1");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be positive");
  if (!(damping > 0.0) || damping > 1.0) throw std::invalid_argument("damping must lie in (0, 1]");
}

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::Ok: return "Ok";
    case StepStatus::BlowUp: return "BlowUp";
    case StepStatus::IterationFailure: return "IterationFailure";
  }
  return "?";
}

namespace {

struct Row3 {
  std::array<std::vector<double>, 3> c;
  void resize(std::size_t n) {
    for (auto& v : c) v.assign(n, 0.0);
  }
};

bool finite_interior(const FlowState& s) {
  const Grid& g = s.grid;
  for (int p = 2; p <= g.my - 2; ++p) {
    for (int l = 2; l <= g.mx - 2; ++l) {
      const std::size_t i = g.index(l, p);
      if (!std::isfinite(s.h[i]) || !std::isfinite(s.hu[i]) || !std::isfinite(s.hv[i])) return false;
    }
  }
  return true;
}

// Sum over interior nodes of h^2 + hu^2 + hv^2, times dx*dy.
double interior_norm_sq(const Field& a, const Field& b, const Field& c, const Grid& g) {
  double sum = 0.0;
  for (int p = 2; p <= g.my - 2; ++p) {
    for (int l = 2; l <= g.mx - 2; ++l) {
      const std::size_t i = g.index(l, p);
      sum += a[i] * a[i] + b[i] * b[i] + c[i] * c[i];
    }
  }
  return sum * g.dx * g.dy;
}

// Per-node y-flux F and source G evaluated from a state, for the implicit sweep.
struct YTerms {
  std::array<Field, 3> flux;
  std::array<Field, 2> source;  // x- and y-momentum components of G
};

void eval_y_terms(const FlowState& s, const PhysParams& params, const BedSlopes& slopes, YTerms& out) {
  const Grid& g = s.grid;
  for (auto& f : out.flux) f.resize(g.size());
  for (auto& f : out.source) f.resize(g.size());
  parallel_for(0, g.ny(), [&](int p) {
    const bool interior_row = p >= 2 && p <= g.my - 2;
    for (int l = 2; l <= g.mx - 2; ++l) {
      const std::size_t i = g.index(l, p);
      double u, v;
      flux_velocities(s.h[i], s.hu[i], s.hv[i], params.h_eps, u, v);
      const CellVec3 f = flux_F(s.h[i], u, v, params.g);
      out.flux[0][i] = s.hv[i];
      out.flux[1][i] = f[1];
      out.flux[2][i] = f[2];
      if (interior_row) {
        const FrictionSlope sf = manning_friction(s.h[i], u, v, params);
        const CellVec3 src = source_G(s.h[i], slopes.s0x[i], slopes.s0y[i], sf.sfx, sf.sfy, params.g);
        out.source[0][i] = src[1];
        out.source[1][i] = src[2];
      }
    }
  });
}

// r = phi - phi* + (k/2) C4y(F + F*) - (k/2)(G + G*) on interior nodes.
void eval_residual(const FlowState& phi, const FlowState& star, const YTerms& terms, const YTerms& star_terms,
                   double k, std::array<Field, 3>& r) {
  const Grid& g = phi.grid;
  for (auto& f : r) f.assign(g.size(), 0.0);
  const std::ptrdiff_t s = g.nx();
  const double half_k = 0.5 * k;
  const std::array<const Field*, 3> now = {&phi.h, &phi.hu, &phi.hv};
  const std::array<const Field*, 3> old = {&star.h, &star.hu, &star.hv};
  parallel_for(2, g.my - 1, [&](int p) {
    for (int l = 2; l <= g.mx - 2; ++l) {
      const std::size_t i = g.index(l, p);
      for (int c = 0; c < 3; ++c) {
        const double d4 = stencil::c4(terms.flux[c].data() + i, s, g.dy) + stencil::c4(star_terms.flux[c].data() + i, s, g.dy);
        double src = 0.0;
        if (c > 0) src = terms.source[c - 1][i] + star_terms.source[c - 1][i];
        r[c][i] = (*now[c])[i] - (*old[c])[i] + half_k * d4 - half_k * src;
      }
    }
  });
}

// Block-pentadiagonal system  I + (k/2) (C4y A_F(phi*) - dG/dh)  for one x-column,
// stored in LAPACK band format and factorised in place.
struct ColumnSystem {
  static constexpr int kBand = 8;  // 3 unknowns per node, neighbours up to +-2 nodes
  int n = 0;
  int ldab = 3 * kBand + 1;
  std::vector<double> ab;
  std::vector<lapack_int> ipiv;
  bool ok = false;

  void assemble(const FlowState& star, int l, double k, const PhysParams& params, const BedSlopes& slopes) {
    const Grid& g = star.grid;
    const int nodes = g.my - 3;
    n = 3 * nodes;
    ab.assign(static_cast<std::size_t>(ldab) * n, 0.0);
    ipiv.assign(static_cast<std::size_t>(n), 0);
    auto at = [&](int row, int col) -> double& {
      return ab[static_cast<std::size_t>(col) * ldab + (2 * kBand + row - col)];
    };
    static constexpr std::array<double, 5> w = {1.0, -8.0, 0.0, 8.0, -1.0};
    const double coef = 0.5 * k / (12.0 * g.dy);
    for (int pn = 0; pn < nodes; ++pn) {
      for (int c = 0; c < 3; ++c) at(3 * pn + c, 3 * pn + c) += 1.0;
      // Bed-slope part of dG/dphi; friction is left to the iteration.
      const std::size_t self = g.index(l, pn + 2);
      at(3 * pn + 1, 3 * pn) -= 0.5 * k * params.g * slopes.s0x[self];
      at(3 * pn + 2, 3 * pn) -= 0.5 * k * params.g * slopes.s0y[self];
      for (int off = -2; off <= 2; ++off) {
        const int qn = pn + off;
        if (qn < 0 || qn >= nodes || off == 0) continue;
        const std::size_t i = g.index(l, qn + 2);
        double u, v;
        flux_velocities(star.h[i], star.hu[i], star.hv[i], params.h_eps, u, v);
        const Mat3 a = conservative_jacobian_F(star.h[i], u, v, params.g);
        const double wgt = coef * w[static_cast<std::size_t>(off + 2)];
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            at(3 * pn + r, 3 * qn + c) += wgt * a[static_cast<std::size_t>(3 * r + c)];
          }
        }
      }
    }
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kBand, kBand, ab.data(), ldab, ipiv.data());
    ok = info == 0;
  }

  bool solve(std::vector<double>& rhs) const {
    if (!ok) return false;
    return LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kBand, kBand, 1, ab.data(), ldab, ipiv.data(), rhs.data(), n) == 0;
  }
};

}  // namespace

StageResult stage_p1(const FlowState& state, double tau, const PhysParams& params, JacobianForm jacobian) {
  if (!(tau > 0.0)) throw std::invalid_argument("stage step must be positive");
  const Grid& g = state.grid;
  StageResult out;
  out.state = state;
  const double dx = g.dx;
  const double half_tau_sq = 0.5 * tau * tau;
  const int nx = g.nx();

  parallel_for(2, g.my - 1, [&](int p) {
    thread_local Row3 flux;
    thread_local std::array<std::vector<double>, 9> jac;
    flux.resize(static_cast<std::size_t>(nx));
    for (auto& j : jac) j.assign(static_cast<std::size_t>(nx), 0.0);

    for (int l = 0; l <= g.mx; ++l) {
      const std::size_t i = g.index(l, p);
      double u, v;
      flux_velocities(state.h[i], state.hu[i], state.hv[i], params.h_eps, u, v);
      const CellVec3 e = flux_E(state.h[i], u, v, params.g);
      flux.c[0][l] = state.hu[i];
      flux.c[1][l] = e[1];
      flux.c[2][l] = e[2];
      const Mat3 m = jacobian == JacobianForm::AsPrinted ? jacobian_E(state.h[i], u, v, params.g)
                                                          : conservative_jacobian_E(state.h[i], u, v, params.g);
      for (int c = 0; c < 9; ++c) jac[c][l] = m[c];
    }

    for (int l = 2; l <= g.mx - 2; ++l) {
      CellVec3 d4{}, back{}, fwd{};
      for (int c = 0; c < 3; ++c) {
        const double* e = flux.c[c].data() + l;
        d4[c] = stencil::c4(e, 1, dx);
        back[c] = stencil::b3(e + 1, 1, dx);  // slope at l+1 from the left
        fwd[c] = stencil::f3(e - 1, 1, dx);   // slope at l-1 from the right
      }
      Mat3 jr, jl;
      for (int c = 0; c < 9; ++c) {
        jr[c] = jac[c][l + 1];
        jl[c] = jac[c][l - 1];
      }
      const CellVec3 right = mat_vec(jr, back);
      const CellVec3 left = mat_vec(jl, fwd);
      const std::size_t i = g.index(l, p);
      const double inv2dx = 1.0 / (2.0 * dx);
      out.state.h[i] = state.h[i] - tau * d4[0] + half_tau_sq * (right[0] - left[0]) * inv2dx;
      out.state.hu[i] = state.hu[i] - tau * d4[1] + half_tau_sq * (right[1] - left[1]) * inv2dx;
      out.state.hv[i] = state.hv[i] - tau * d4[2] + half_tau_sq * (right[2] - left[2]) * inv2dx;
    }
  });

  if (!finite_interior(out.state)) out.status = StepStatus::BlowUp;
  return out;
}

double implicit_residual(const FlowState& candidate, const FlowState& star, double k, const PhysParams& params,
                         const BedSlopes& slopes) {
  YTerms now, old;
  eval_y_terms(candidate, params, slopes, now);
  eval_y_terms(star, params, slopes, old);
  std::array<Field, 3> r;
  eval_residual(candidate, star, now, old, k, r);
  const Grid& g = star.grid;
  const double scale = std::max(1.0, std::sqrt(interior_norm_sq(star.h, star.hu, star.hv, g)));
  return std::sqrt(interior_norm_sq(r[0], r[1], r[2], g)) / scale;
}

StageResult stage_p2(const FlowState& state, double k, const PhysParams& params, const StageConfig& cfg,
                     const BedSlopes& slopes) {
  if (!(k > 0.0)) throw std::invalid_argument("stage step must be positive");
  cfg.validate();
  const Grid& g = state.grid;
  if (slopes.s0x.size() != g.size() || slopes.s0y.size() != g.size()) {
    throw std::invalid_argument("bed slopes do not match the grid");
  }

  StageResult out;
  out.state = state;
  FlowState& phi = out.state;

  YTerms star_terms, terms;
  eval_y_terms(state, params, slopes, star_terms);
  const double scale = std::max(1.0, std::sqrt(interior_norm_sq(state.h, state.hu, state.hv, g)));

  std::vector<ColumnSystem> systems;
  if (cfg.linearization == Linearization::FrozenJacobian) {
    systems.resize(static_cast<std::size_t>(g.nx()));
    parallel_for(2, g.mx - 1, [&](int l) { systems[static_cast<std::size_t>(l)].assemble(state, l, k, params, slopes); });
  }

  std::array<Field, 3> r;
  std::array<Field*, 3> unknown = {&phi.h, &phi.hu, &phi.hv};
  for (int it = 0;; ++it) {
    if (it == 0) {
      terms = star_terms;
    } else {
      eval_y_terms(phi, params, slopes, terms);
    }
    eval_residual(phi, state, terms, star_terms, k, r);
    const double res = std::sqrt(interior_norm_sq(r[0], r[1], r[2], g)) / scale;
    out.residual_history.push_back(res);
    out.residual = res;
    out.iterations = it;
    if (!std::isfinite(res)) {
      out.status = StepStatus::BlowUp;
      return out;
    }
    if (res <= cfg.picard_tol) return out;
    if (it == cfg.picard_max_iters) {
      out.status = StepStatus::IterationFailure;
      return out;
    }

    if (cfg.linearization == Linearization::PicardOnly) {
      parallel_for(2, g.my - 1, [&](int p) {
        for (int l = 2; l <= g.mx - 2; ++l) {
          const std::size_t i = g.index(l, p);
          for (int c = 0; c < 3; ++c) (*unknown[c])[i] -= cfg.damping * r[c][i];
        }
      });
    } else {
      std::atomic<bool> solved = true;
      parallel_for(2, g.mx - 1, [&](int l) {
        thread_local std::vector<double> rhs;
        const int nodes = g.my - 3;
        rhs.assign(static_cast<std::size_t>(3 * nodes), 0.0);
        for (int pn = 0; pn < nodes; ++pn) {
          const std::size_t i = g.index(l, pn + 2);
          for (int c = 0; c < 3; ++c) rhs[static_cast<std::size_t>(3 * pn + c)] = -r[c][i];
        }
        if (!systems[static_cast<std::size_t>(l)].solve(rhs)) {
          solved = false;
          return;
        }
        for (int pn = 0; pn < nodes; ++pn) {
          const std::size_t i = g.index(l, pn + 2);
          for (int c = 0; c < 3; ++c) (*unknown[c])[i] += cfg.damping * rhs[static_cast<std::size_t>(3 * pn + c)];
        }
      });
      if (!solved) {
        out.status = StepStatus::IterationFailure;
        return out;
      }
    }
  }
}

void apply_boundaries(FlowState& state, const BoundaryProvider& bc, double t) {
  const Grid& g = state.grid;
  auto set = [&](int l, int p) {
    const BoundaryValue b = bc(l, p, t);
    if (b.h < 0.0) {
      throw std::invalid_argument("boundary provider returned negative depth at (" + std::to_string(l) + ", " +
                                  std::to_string(p) + ")");
    }
    const std::size_t i = g.index(l, p);
    state.h[i] = b.h;
    state.hu[i] = b.h * b.u;
    state.hv[i] = b.h * b.v;
  };
  for (int p = 0; p <= g.my; ++p) {
    const bool full_row = p <= 1 || p >= g.my - 1;
    if (full_row) {
      for (int l = 0; l <= g.mx; ++l) set(l, p);
    } else {
      set(0, p);
      set(1, p);
      set(g.mx - 1, p);
      set(g.mx, p);
    }
  }
}

void clamp_depth(FlowState& state) {
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    if (state.h[i] < 0.0) {
      state.h[i] = 0.0;
      state.hu[i] = 0.0;
      state.hv[i] = 0.0;
    }
  }
}

void clear_dry_cells(FlowState& state, double h_eps) {
  for (std::size_t i = 0; i < state.h.size(); ++i) {
    if (state.h[i] < h_eps) {
      state.h[i] = std::max(0.0, state.h[i]);
      state.hu[i] = 0.0;
      state.hv[i] = 0.0;
    }
  }
}

StepResult composed_step(const FlowState& state, double k, const PhysParams& params, const StageConfig& cfg,
                         const BedSlopes& slopes, const BoundaryProvider& bc, const StageObserver& observer) {
  if (!(k > 0.0)) throw std::invalid_argument("time step must be positive");
  const double t0 = state.t;
  const double half = 0.5 * k;
  StepResult out;

  FlowState start = state;
  apply_boundaries(start, bc, t0);

  if (observer) observer("P1", half);
  StageResult s1 = stage_p1(start, half, params, cfg.jacobian);
  if (s1.status != StepStatus::Ok) {
    out.state = std::move(s1.state);
    out.status = s1.status;
    return out;
  }
  apply_boundaries(s1.state, bc, t0);
  clear_dry_cells(s1.state, params.h_eps);

  if (observer) observer("P2", k);
  StageResult s2 = stage_p2(s1.state, k, params, cfg, slopes);
  out.implicit_iterations = s2.iterations;
  out.implicit_residual = s2.residual;
  if (s2.status != StepStatus::Ok) {
    out.state = std::move(s2.state);
    out.status = s2.status;
    return out;
  }
  apply_boundaries(s2.state, bc, t0);
  clear_dry_cells(s2.state, params.h_eps);

  if (observer) observer("P1", half);
  StageResult s3 = stage_p1(s2.state, half, params, cfg.jacobian);
  out.state = std::move(s3.state);
  out.state.t = t0 + k;
  if (s3.status != StepStatus::Ok) {
    out.status = s3.status;
    return out;
  }
  apply_boundaries(out.state, bc, out.state.t);
  clamp_depth(out.state);
  clear_dry_cells(out.state, params.h_eps);
  if (!out.state.all_finite()) out.status = StepStatus::BlowUp;
  return out;
}

}  // namespace swe
