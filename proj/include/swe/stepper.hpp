#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "swe/grid.hpp"
#include "swe/physics.hpp"

namespace swe {

/// How the implicit y-sweep resolves its nonlinear trapezoidal equation.
enum class Linearization {
  PicardOnly,      // fixed-point iteration on phi**
  FrozenJacobian,  // chord iteration with a banded system linearised at phi*
};

/// Matrix multiplying the one-sided flux slopes in the second-order term of
/// the explicit x-sweep.
enum class JacobianForm {
  AsPrinted,     // derivative of E with respect to (h, u, v)
  Conservative,  // derivative of E with respect to (h, hu, hv)
};

struct StageConfig {
  int picard_max_iters = 25;
  double picard_tol = 1e-10;
  Linearization linearization = Linearization::PicardOnly;
  double damping = 1.0;
  JacobianForm jacobian = JacobianForm::Conservative;

  void validate() const;
};

/// Prescribed primitive values (h, u, v) at a boundary-layer node.
struct BoundaryValue {
  double h = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Called for every node on the two outer layers of each side.
using BoundaryProvider = std::function<BoundaryValue(int l, int p, double t)>;

enum class StepStatus { Ok, BlowUp, IterationFailure };

std::string_view to_string(StepStatus status);

struct StageResult {
  FlowState state;
  StepStatus status = StepStatus::Ok;
  int iterations = 0;
  double residual = 0.0;  // relative residual of the last iterate (implicit stage)
  std::vector<double> residual_history;
};

/// Explicit x-sweep with step tau:
///   phi* = phi - tau C4x E + (tau^2/2) d2x(J . d3x E)
/// on interior nodes. Other nodes are copied unchanged.
StageResult stage_p1(const FlowState& state, double tau, const PhysParams& params,
                     JacobianForm jacobian = JacobianForm::Conservative);

/// Implicit y-sweep with step k: solves
///   phi** = phi* - (k/2) C4y [F(phi**) + F(phi*)] + (k/2) [G(phi**) + G(phi*)]
/// on interior nodes. Non-interior nodes keep the input values.
/// A non-converged solve returns IterationFailure together with the last iterate.
StageResult stage_p2(const FlowState& state, double k, const PhysParams& params, const StageConfig& cfg,
                     const BedSlopes& slopes);

/// Relative residual ||2 phi** - P2bar phi** - P2bar phi*|| / max(1, ||phi*||)
/// over the interior, using the three-component L2 norm.
double implicit_residual(const FlowState& candidate, const FlowState& star, double k, const PhysParams& params,
                         const BedSlopes& slopes);

/// Writes (h, h u, h v) from the provider into every boundary-layer node.
/// Throws std::invalid_argument when the provider returns a negative depth.
void apply_boundaries(FlowState& state, const BoundaryProvider& bc, double t);

struct StepResult {
  FlowState state;
  StepStatus status = StepStatus::Ok;
  int implicit_iterations = 0;
  double implicit_residual = 0.0;
};

/// Receives each stage as it runs: ("P1", k/2), ("P2", k), ("P1", k/2).
using StageObserver = std::function<void(std::string_view stage, double tau)>;

/// One symmetric split step phi^{n+1} = P1(k/2) P2(k) P1(k/2) phi^n.
/// Intermediate boundary layers use the provider at t^n; the completed level
/// uses t^{n+1}. After every stage, cells drier than h_eps are cleared
/// (see clear_dry_cells), which includes the final depth clamp.
StepResult composed_step(const FlowState& state, double k, const PhysParams& params, const StageConfig& cfg,
                         const BedSlopes& slopes, const BoundaryProvider& bc, const StageObserver& observer = {});

/// h := max(h, 0); momenta are zeroed where the depth was clamped.
void clamp_depth(FlowState& state);

/// Cells with h < h_eps get h := max(h, 0) and zero momentum, matching the
/// masked (zero) velocities the rest of the solver sees there.
void clear_dry_cells(FlowState& state, double h_eps);

}  // namespace swe
