#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "swe/physics.hpp"
#include "swe/stability.hpp"
#include "swe/stepper.hpp"

namespace swe {

enum class RunStatus { Completed, BlowUp, IterationFailure };

std::string_view to_string(RunStatus status);

/// Everything a time march needs besides the initial state and governor.
struct MarchSetup {
  PhysParams physics;
  StageConfig stage;
  BedSlopes slopes;
  BoundaryProvider boundary;
  double t_end = 0.0;
  long max_steps = 50'000'000;
  /// ||h|| exceeding this multiple of its initial value counts as blow-up.
  double blowup_factor = 1e6;
  /// Times the march must land on exactly (ascending); steps are shortened.
  std::vector<double> landing_times;
};

struct MarchOutcome {
  RunStatus status = RunStatus::Completed;
  long steps = 0;      // completed steps
  double t = 0.0;      // time of the last accepted level (or of the failed step)
  FlowState final_state;
  double implicit_residual = 0.0;
};

/// Called for level 0 (bound is null) and after every accepted step.
using LevelCallback = std::function<void(long n, const FlowState& state, const StepBound* bound)>;

/// Advances `initial` to setup.t_end with steps from `governor`, shortening
/// steps to land on t_end and on every landing time exactly. Stops at the first level that is
/// non-finite or whose interior depth norm explodes, or when the implicit
/// solve fails.
MarchOutcome march(const FlowState& initial, const MarchSetup& setup, Governor& governor,
                   const LevelCallback& on_level = {});

}  // namespace swe
