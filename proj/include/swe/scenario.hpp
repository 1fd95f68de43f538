#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swe/driver.hpp"
#include "swe/grid.hpp"
#include "swe/physics.hpp"
#include "swe/stability.hpp"
#include "swe/stepper.hpp"
#include "swe/verification.hpp"

namespace swe {

/// Configuration problem; line is 0 when the issue concerns the whole document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  int mx = 0;
  int my = 0;
  // Either the extents or the spacings are given.
  std::optional<double> lx, ly;
  std::optional<double> dx, dy;

  Grid build() const;
};

enum class TopographyKind { Paraboloid, Constant, Tabulated };

/// Sign convention for paraboloid slopes.
enum class SlopeOrientation {
  Downhill,  // S0 = -grad z (water accelerates down the bed)
  Gradient,  // S0 = +grad z, the literal dz/dx, dz/dy form
};

struct TopographySpec {
  TopographyKind kind = TopographyKind::Constant;
  double h0 = 0.1;  // paraboloid depth scale
  double d = 1.0;   // paraboloid radius scale
  double xc = 0.0;
  double yc = 0.0;
  SlopeOrientation orientation = SlopeOrientation::Downhill;
  double s0x = 0.0;  // constant slopes
  double s0y = 0.0;
  std::string file;  // tabulated: columns x,y,s0x,s0y in node order
};

enum class InitialKind { Thacker1, Thacker2, UniformDischarge, Tabulated };

struct InitialSpec {
  InitialKind kind = InitialKind::UniformDischarge;
  double depth = 0.0;               // depth of the discharge-carrying region
  double discharge_x = 0.0;         // unit discharges; u0 = qx / depth
  double discharge_y = 0.0;
  std::optional<double> dam_y;      // nodes with y < dam_y start at rest with upstream_depth
  double upstream_depth = 0.0;
  std::string file;                 // tabulated: snapshot CSV x,y,h,u,v
};

enum class BoundaryKind {
  ExactSolution,  // Thacker closed form at the current time
  FixedValues,    // boundary layers keep their initial values
};

struct TimeSpec {
  double t_end = 0.0;
  GovernorConfig governor;
};

enum class SnapshotFormat { Csv, Float64 };

struct OutputPlan {
  long cadence = 1;  // series row every `cadence` steps
  std::vector<double> snapshot_times;
  std::filesystem::path directory = ".";
  SnapshotFormat format = SnapshotFormat::Csv;
};

struct Scenario {
  GridSpec grid;
  PhysParams physics;
  TopographySpec topography;
  InitialSpec initial;
  BoundaryKind boundary = BoundaryKind::FixedValues;
  ThackerParams thacker;
  TimeSpec time;
  StageConfig solver;
  OutputPlan output;

  /// Throws ConfigError (line 0) when cross-field constraints fail.
  void validate() const;
};

/// Parses a `key = value` document with `[section]` headers and `#` comments.
/// Sections: grid, physics, topography, initial, boundary, thacker, time,
/// solver, output. Throws ConfigError naming the line of the offending entry,
/// or listing every missing required key.
Scenario load_scenario(std::string_view text);

/// Reads the file and parses it; I/O failures become ConfigError with the path.
Scenario load_scenario_file(const std::filesystem::path& path);

enum class LogoneBed { Wet, Dry };
enum class LogoneDischarge { Min, Avg, Max };

/// Numeric table of the Logone flood setup (abstract length unit for the grid,
/// time in months).
struct LogonePreset {
  LogoneBed bed = LogoneBed::Wet;
  LogoneDischarge discharge = LogoneDischarge::Min;

  double h0_down = 0.0;     // downstream initial depth
  double q = 0.0;           // qx = qy
  double h_up = 0.1;        // upstream depth behind the dam
  double length_x = 80.0;   // domain extents
  double length_y = 1000.0;
  double dx = 8.89;
  double dy = 12.36;
  double k = 0.33;
  double t_end = 3.0;
  double c0 = 40.0;
  double n_manning = 0.025;
  double g = 10.0;
  double slope_h0 = 0.1;    // S0x = 2 h0 (x - 40), S0y = 2 h0 (y - 500)
  double slope_xc = 40.0;
  double slope_yc = 500.0;
  double dam_y = 500.0;

  double u0() const { return q / h0_down; }
  double v0() const { return q / h0_down; }
  int mx() const;
  int my() const;

  static LogonePreset make(LogoneBed bed, LogoneDischarge discharge);
};

Scenario logone_scenario(const LogonePreset& preset);

/// Parses "logone:<wet|dry>:<min|avg|max>". Throws ConfigError.
LogonePreset parse_logone_name(std::string_view name);

struct RunRecord {
  long n = 0;
  double t = 0.0;
  double k = 0.0;  // step that produced this level (0 for level 0)
  double h_norm = 0.0;
  double u_norm = 0.0;
  double v_norm = 0.0;
  double h_max = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  std::string source;  // governor source of k; empty for level 0
};

struct GovernorLogRow {
  long n = 0;  // index of the level the step starts from
  double t = 0.0;
  StepBound bound;
};

struct Snapshot {
  double requested_t = 0.0;
  FlowState state;
};

struct RunOutput {
  RunStatus status = RunStatus::Completed;
  long n = 0;      // last completed level, or the offending level on failure
  double t = 0.0;  // its time
  std::vector<RunRecord> records;
  std::vector<GovernorLogRow> governor_log;
  std::vector<Snapshot> snapshots;
  double h_eps = 1e-6;
};

FlowState build_initial_state(const Scenario& s);
BedSlopes build_slopes(const Scenario& s, const Grid& grid);
BoundaryProvider build_boundary(const Scenario& s, const FlowState& initial);

/// Time-marches the scenario, collecting cadenced records, the per-step bound
/// log and snapshots at the requested times (steps are shortened to land on them).
RunOutput run_scenario(const Scenario& s);

RunRecord make_record(long n, const FlowState& state, double k, std::string source, double h_eps);

/// Writes series.csv, governor.csv and one snapshot file per snapshot into
/// plan.directory (created if absent). Throws std::runtime_error naming the path.
void write_outputs(const RunOutput& out, const OutputPlan& plan);

/// "snapshot_t<time>.csv" or ".f64".
std::string snapshot_file_name(double t, SnapshotFormat format);

void write_series_csv(std::ostream& os, const std::vector<RunRecord>& records);
void write_governor_csv(std::ostream& os, const std::vector<GovernorLogRow>& rows);
void write_snapshot_csv(std::ostream& os, const FlowState& state, double h_eps);
/// Header "SWE0", u32 nx, u32 ny, u32 field count (3), f64 t; then the h, u
/// and v blocks in node order, all little-endian.
void write_snapshot_f64(std::ostream& os, const FlowState& state, double h_eps);

/// Reads series.csv back.
std::vector<RunRecord> read_series_csv(std::istream& is);

struct SnapshotTable {
  std::vector<double> x, y, h, u, v;
};

/// Reads a snapshot CSV (header x,y,h,u,v).
SnapshotTable read_snapshot_csv(std::istream& is);

/// Splits one CSV line per RFC 4180 (quoted fields, doubled quotes).
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& text);

}  // namespace swe
