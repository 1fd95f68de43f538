#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "swe/driver.hpp"
#include "swe/grid.hpp"
#include "swe/stability.hpp"
#include "swe/stepper.hpp"

namespace swe {

/// Parameters of the paraboloid-basin benchmarks.
struct ThackerParams {
  double l = 4.0;    // domain edge
  double h0 = 0.1;   // depth at the basin centre
  double d = 1.0;    // radius where the bed crosses zero
  double g = 10.0;
  double r0 = 0.8;   // initial shoreline radius (radially symmetric case)
  double eta = 0.5;  // surface tilt amplitude (planar case)

  /// Throws std::invalid_argument unless all values are positive and r0 < d.
  void validate() const;
};

/// Which closed-form oscillation is used.
enum class ThackerCase {
  Radial = 1,  // radially symmetric breathing paraboloid
  Planar = 2,  // tilted planar surface rotating in the basin
};

struct ExactValue {
  double h = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// Bed elevation h0 (r^2/d^2 - 1) measured from the basin centre (l/2, l/2).
double paraboloid_z(double x, double y, const ThackerParams& p);

/// Radially symmetric solution; h is clamped at zero in the dry region,
/// u and v follow the closed form everywhere.
ExactValue thacker1_exact(double x, double y, double t, const ThackerParams& p);

/// Planar-surface solution; h clamped at zero, spatially uniform velocity.
ExactValue thacker2_exact(double x, double y, double t, const ThackerParams& p);

ExactValue thacker_exact(ThackerCase which, double x, double y, double t, const ThackerParams& p);

/// Angular frequency: sqrt(8 g h0)/d (radial) or sqrt(2 g h0)/d (planar).
double thacker_omega(ThackerCase which, const ThackerParams& p);

/// Three oscillation periods, 6 pi / omega.
double thacker_horizon(ThackerCase which, const ThackerParams& p);

/// Discrete norm sqrt(dx dy sum w^2) over interior nodes 2..mx-2, 2..my-2.
double l2_norm(const Field& field, const Grid& grid);

/// Maximum of a series of per-level norms. Throws on an empty series.
double linf_time_norm(const std::vector<double>& series);

/// log(e_coarse / e_fine) / log(ratio). Throws for non-positive errors or ratio <= 1.
double convergence_order(double e_coarse, double e_fine, double refinement_ratio = 3.0);

/// Exact state sampled at every node.
FlowState thacker_state(ThackerCase which, const Grid& grid, double t, const ThackerParams& p);

/// Boundary provider returning the exact solution.
BoundaryProvider thacker_boundary(ThackerCase which, const ThackerParams& p, const Grid& grid);

/// Slopes -grad z of the paraboloid bed.
BedSlopes thacker_slopes(const Grid& grid, const ThackerParams& p);

/// Grid covering [0, l]^2 with spacing close to `spacing` (mx = round(l / spacing)).
Grid thacker_grid(const ThackerParams& p, double spacing);

/// Largest per-level norms of the exact solution sampled `samples` times over [0, t_end].
NormCache thacker_norm_envelope(ThackerCase which, const Grid& grid, const ThackerParams& p, double t_end,
                                double h_eps, int samples = 256);

struct ErrorReport {
  double dx = 0.0;
  double dy = 0.0;
  double k = 0.0;  // nominal step (fixed k, or the first governor step)
  double e_h = 0.0;
  double e_u = 0.0;
  double e_v = 0.0;
  std::optional<double> order_h;
  std::optional<double> order_u;
  std::optional<double> order_v;
  RunStatus status = RunStatus::Completed;
  long steps = 0;
  double t_reached = 0.0;
  /// Largest interior depth norm seen along the run.
  double h_norm_max = 0.0;
};

/// Options for one verification run against a Thacker solution.
struct ThackerRun {
  ThackerCase which = ThackerCase::Radial;
  ThackerParams params;
  double spacing = 1.0 / 9.0;
  std::optional<double> fixed_k;  // unset: governor
  double gamma = 18.0;
  bool clamp_to_cfl = true;
  std::optional<double> t_end;  // unset: three periods
  /// Frictionless; g is taken from params. The dry threshold is 1% of the
  /// basin depth: thinner films at the shoreline carry meaningless velocities.
  PhysParams physics{10.0, 0.0, 40.0, 1e-3};
  StageConfig stage;
};

/// Marches the numerical solution from the exact initial state and
/// accumulates L-infinity-in-time L2 errors over every level.
/// u and v are compared only where the exact depth is at least h_eps.
ErrorReport run_thacker(const ThackerRun& run);

enum class RefinementMode {
  Spatial,   // refine dx, keep k
  Temporal,  // refine k, keep dx
};

struct LadderRung {
  double spacing = 0.0;
  std::optional<double> k;
};

/// Runs every rung and fills pairwise orders (ratio 3) between consecutive
/// completed rungs. A rung that fails keeps its status in the report and
/// leaves the orders touching it empty.
std::vector<ErrorReport> run_convergence_study(const ThackerRun& base, const std::vector<LadderRung>& ladder);

/// Writes the table with header dx,dy,k,e_h,order_h,e_u,order_u,e_v,order_v.
/// Divergent rungs print their errors as "nan" or blank orders.
void write_convergence_csv(std::ostream& out, const std::vector<ErrorReport>& table);

}  // namespace swe
