#pragma once

#include <string_view>

#include "swe/grid.hpp"

namespace swe {

/// Wave-speed guideline
///   k <= min(dx / (u_max + sqrt(g h_max)), dy / (v_max + sqrt(g h_max))).
/// A vanishing denominator (dry, quiescent state) returns k_max instead.
double cfl_limit(double u_max, double v_max, double h_max, double g, double dx, double dy, double k_max);

/// Running L-infinity-in-time accumulators of interior L2 norms.
struct NormCache {
  double u_inf_norm = 0.0;         // max over levels of ||u||
  double bernoulli_inf_norm = 0.0;  // max over levels of ||u^2 + g h / 2||
  double beta_norm = 0.0;           // ||1|| = sqrt(dx dy (mx-3)(my-3))

  static NormCache for_grid(const Grid& grid);

  /// Folds one completed level into the running maxima.
  void observe(const FlowState& state, double g, double h_eps);
};

/// Time-step restriction driven by the running norms:
///   k <= (48/gamma) min( ||beta|| / (sqrt(mx-3) |||u|||),  |||u||| / |||u^2 + g h/2||| ) dx.
/// When |||u||| is below 1e-14 the flow is treated as quiescent and k_max is
/// returned; a vanishing Bernoulli norm drops the second branch.
/// Throws std::invalid_argument for gamma outside (0, 18] or mx <= 3.
double theorem1_limit(const NormCache& cache, double dx, int mx, double gamma, double k_max);

enum class StepSource { CFL, Theorem1, UserOverride };

std::string_view to_string(StepSource source);

struct StepBound {
  double k_cfl = 0.0;
  double k_thm1 = 0.0;
  double gamma = 18.0;
  double chosen_k = 0.0;
  StepSource source = StepSource::CFL;
};

enum class StepPolicy {
  Fixed,     // user-supplied k, bounds are only logged
  Governor,  // k chosen from the bounds each step
};

struct GovernorConfig {
  StepPolicy policy = StepPolicy::Governor;
  double fixed_k = 0.0;
  double gamma = 18.0;
  bool clamp_to_cfl = true;  // chosen k = min(k_cfl, k_thm1); otherwise k_thm1 alone
  double k_max = 0.0;        // <= 0: use the CFL value of the initial state

  void validate() const;
};

/// Adaptive step-size selection. Holds the norm cache of the levels computed so far.
class Governor {
 public:
  Governor(const GovernorConfig& cfg, const FlowState& initial, double g, double h_eps);

  /// Bounds for the next step from `current`; the cache must already contain `current`.
  StepBound propose(const FlowState& current) const;

  /// Records a completed level.
  void observe(const FlowState& state) { cache_.observe(state, g_, h_eps_); }

  /// Raises the running norms to at least those of `envelope` (used when a
  /// bound on the whole horizon is known in advance).
  void seed(const NormCache& envelope);

  const NormCache& cache() const { return cache_; }
  double k_max() const { return k_max_; }
  const GovernorConfig& config() const { return cfg_; }

 private:
  GovernorConfig cfg_;
  NormCache cache_;
  double g_;
  double h_eps_;
  double k_max_;
};

struct FieldMaxima {
  double h_max = 0.0;
  double u_max = 0.0;  // max |u|
  double v_max = 0.0;  // max |v|
};

FieldMaxima field_maxima(const FlowState& state, double h_eps);

struct PentaNormReport {
  double bound = 18.0;          // 0 + 2 (8 + 1)
  double computed_norm = 0.0;   // spectral norm from power iteration
  int iterations = 0;
};

/// Spectral norm of the n x n skew pentadiagonal matrix of the fourth-order
/// centred difference (superdiagonals 8, -1; subdiagonals -8, 1), computed by
/// power iteration on A^T A.
PentaNormReport penta_norm_diagnostic(int n, double tol = 1e-10, int max_iters = 200000);

}  // namespace swe
