#include "swe/driver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swe {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "Completed";
    case RunStatus::BlowUp: return "BlowUp";
    case RunStatus::IterationFailure: return "IterationFailure";
  }
  return "?";
}

namespace {

double depth_norm(const FlowState& s) {
  const Grid& g = s.grid;
  double sum = 0.0;
  for (int p = 2; p <= g.my - 2; ++p) {
    for (int l = 2; l <= g.mx - 2; ++l) {
      const double h = s.h[g.index(l, p)];
      sum += h * h;
    }
  }
  return std::sqrt(sum * g.dx * g.dy);
}

}  // namespace

MarchOutcome march(const FlowState& initial, const MarchSetup& setup, Governor& governor,
                   const LevelCallback& on_level) {
  if (!(setup.t_end > initial.t)) throw std::invalid_argument("end time must exceed the initial time");
  if (!setup.boundary) throw std::invalid_argument("boundary provider missing");

  MarchOutcome out;
  FlowState current = initial;
  apply_boundaries(current, setup.boundary, current.t);
  if (on_level) on_level(0, current, nullptr);

  const double h_ref = depth_norm(current);
  const double limit = setup.blowup_factor * (h_ref > 0.0 ? h_ref : 1.0);
  std::size_t next_landing = 0;

  while (current.t < setup.t_end) {
    if (out.steps >= setup.max_steps) {
      throw std::runtime_error("step budget exhausted before reaching the end time");
    }
    StepBound bound = governor.propose(current);
    double k = bound.chosen_k;
    double target = setup.t_end;
    while (next_landing < setup.landing_times.size() && setup.landing_times[next_landing] <= current.t) {
      ++next_landing;
    }
    if (next_landing < setup.landing_times.size()) target = std::min(target, setup.landing_times[next_landing]);
    const double remaining = target - current.t;
    const bool lands = k >= remaining || remaining - k <= 1e-9 * k;
    if (lands) k = remaining;
    bound.chosen_k = k;

    StepResult step = composed_step(current, k, setup.physics, setup.stage, setup.slopes, setup.boundary);
    out.implicit_residual = step.implicit_residual;
    if (step.status == StepStatus::IterationFailure) {
      out.status = RunStatus::IterationFailure;
      out.t = current.t + k;
      out.final_state = std::move(step.state);
      return out;
    }
    const bool exploded =
        step.status == StepStatus::BlowUp || !step.state.all_finite() || depth_norm(step.state) > limit;
    if (exploded) {
      out.status = RunStatus::BlowUp;
      out.t = current.t + k;
      out.final_state = std::move(step.state);
      return out;
    }
    if (lands) step.state.t = target;
    current = std::move(step.state);
    ++out.steps;
    governor.observe(current);
    if (on_level) on_level(out.steps, current, &bound);
  }
  out.t = current.t;
  out.final_state = std::move(current);
  return out;
}

}  // namespace swe
