#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "swe/scenario.hpp"
#include "swe/text_format.hpp"

using namespace swe;
namespace fs = std::filesystem;

namespace {

const char* kThackerDoc = R"(
# radially symmetric basin
[grid]
lx = 4
ly = 4
mx = 36
my = 36

[initial]
kind = thacker1

[time]
k = 0.0013717421124828531
gamma = 18
)";

std::string error_of(const std::string& text) {
  try {
    load_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("swe_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kLakeDoc = R"(
[grid]
lx = 10
ly = 10
mx = 20
my = 20
[topography]
kind = constant
[initial]
kind = uniform-depth-with-discharge
depth = 1.5
[time]
t_end = 0.5
k = 0.05
[output]
cadence = 2
snapshot_times = 0.25
)";

}  // namespace

TEST_CASE("minimal basin document") {
  const Scenario s = load_scenario(kThackerDoc);
  const Grid g = s.grid.build();
  CHECK(g.mx == 36);
  CHECK(g.dx == doctest::Approx(1.0 / 9.0));
  CHECK(s.initial.kind == InitialKind::Thacker1);
  CHECK(s.boundary == BoundaryKind::ExactSolution);
  CHECK(s.topography.kind == TopographyKind::Paraboloid);
  CHECK(s.topography.xc == 2.0);
  CHECK(s.thacker.l == 4.0);
  CHECK(s.thacker.h0 == 0.1);
  CHECK(s.thacker.d == 1.0);
  CHECK(s.thacker.r0 == 0.8);
  CHECK(s.physics.g == 10.0);
  CHECK(s.physics.n_manning == 0.0);
  CHECK(s.time.governor.policy == StepPolicy::Fixed);
  CHECK(s.time.governor.fixed_k == doctest::Approx(std::pow(3.0, -6)));
  CHECK(s.time.t_end == doctest::Approx(thacker_horizon(ThackerCase::Radial, s.thacker)));
}

TEST_CASE("missing keys are listed together") {
  const std::string e = error_of("");
  for (const char* key : {"grid.mx", "grid.my", "grid.lx", "grid.ly", "initial.kind", "time.t_end"}) {
    CHECK(e.find(key) != std::string::npos);
  }
}

TEST_CASE("line numbers point at the offending entry") {
  std::string doc = kThackerDoc;
  doc += "[thacker]\nh0 = -0.1\n";
  const std::string e = error_of(doc);
  CHECK(e.rfind("line 16:", 0) == 0);
  CHECK(e.find("h0") != std::string::npos);

  CHECK(error_of("[grid]\nmx = 5\ncolour = red\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("[grid]\nmx = 5\nmx = 6\n").find("duplicate") != std::string::npos);
  CHECK(error_of("[weather]\n").find("unknown section") != std::string::npos);
  CHECK(error_of("mx = 5\n").find("outside") != std::string::npos);
  std::string word = kLakeDoc;
  word.replace(word.find("mx = 20"), 7, "mx = five");
  CHECK(error_of(word).rfind("line 5:", 0) == 0);
  CHECK(error_of("[grid]\nmx =\n").find("empty") != std::string::npos);
}

TEST_CASE("enumerated values list the alternatives") {
  std::string doc = kThackerDoc;
  doc += "[solver]\nlinearization = newton\n";
  const std::string e = error_of(doc);
  CHECK(e.find("picard") != std::string::npos);
  CHECK(e.find("frozen-jacobian") != std::string::npos);
}

TEST_CASE("cross-field checks") {
  std::string doc = kLakeDoc;
  doc += "[boundary]\nkind = exact-solution\n";
  CHECK(error_of(doc).find("exact-solution") != std::string::npos);
  std::string late = kLakeDoc;
  late.replace(late.find("snapshot_times = 0.25"), 21, "snapshot_times = 2.0");
  CHECK_FALSE(error_of(late).empty());
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.ini"), ConfigError);
}

TEST_CASE("flood presets reproduce the published table") {
  struct Row {
    LogoneBed bed;
    LogoneDischarge q;
    double h0;
    double discharge;
  };
  for (const Row& r : {Row{LogoneBed::Wet, LogoneDischarge::Min, 0.176, 16.0},
                       Row{LogoneBed::Wet, LogoneDischarge::Avg, 0.176, 492.0},
                       Row{LogoneBed::Wet, LogoneDischarge::Max, 0.176, 2420.0},
                       Row{LogoneBed::Dry, LogoneDischarge::Min, 0.0014, 16.0},
                       Row{LogoneBed::Dry, LogoneDischarge::Avg, 0.0014, 492.0},
                       Row{LogoneBed::Dry, LogoneDischarge::Max, 0.0014, 2420.0}}) {
    const LogonePreset p = LogonePreset::make(r.bed, r.q);
    CHECK(p.h0_down == r.h0);
    CHECK(p.q == r.discharge);
    CHECK(p.h_up == 0.1);
    CHECK(p.n_manning == 0.025);
    CHECK(p.c0 == 40.0);
    CHECK(p.g == 10.0);
    CHECK(p.dx == 8.89);
    CHECK(p.dy == 12.36);
    CHECK(p.k == 0.33);
    CHECK(p.t_end == 3.0);
    CHECK(p.u0() == r.discharge / r.h0);
  }
  const LogonePreset wet = LogonePreset::make(LogoneBed::Wet, LogoneDischarge::Min);
  CHECK(wet.u0() == doctest::Approx(90.91).epsilon(1e-4));
  CHECK(wet.u0() == 90.90909090909092);
  CHECK(LogonePreset::make(LogoneBed::Dry, LogoneDischarge::Min).v0() == 11428.57142857143);
  CHECK(LogonePreset::make(LogoneBed::Wet, LogoneDischarge::Max).u0() == 13750.0);
  CHECK(wet.mx() == 9);
  CHECK(wet.my() == 81);

  const Scenario s = logone_scenario(wet);
  CHECK(s.time.governor.fixed_k == 0.33);
  CHECK(s.time.t_end == 3.0);
  CHECK(s.boundary == BoundaryKind::FixedValues);
  const FlowState init = build_initial_state(s);
  const Grid& g = init.grid;
  CHECK(init.h[g.index(4, 10)] == 0.1);
  CHECK(init.hu[g.index(4, 10)] == 0.0);
  CHECK(init.h[g.index(4, 60)] == 0.176);
  CHECK(init.hv[g.index(4, 60)] == doctest::Approx(16.0));
  const BedSlopes sl = build_slopes(s, g);
  CHECK(sl.s0x[g.index(0, 0)] == doctest::Approx(2 * 0.1 * (0.0 - 40.0)));
  CHECK(sl.s0y[g.index(0, 81)] == doctest::Approx(2 * 0.1 * (81 * 12.36 - 500.0)));
}

TEST_CASE("preset names") {
  const LogonePreset p = parse_logone_name("logone:dry:avg");
  CHECK(p.bed == LogoneBed::Dry);
  CHECK(p.discharge == LogoneDischarge::Avg);
  CHECK_THROWS_AS(parse_logone_name("logone:damp:min"), ConfigError);
  CHECK_THROWS_AS(parse_logone_name("thames:wet:min"), ConfigError);
  CHECK_THROWS_AS(parse_logone_name("logone:wet"), ConfigError);
}

TEST_CASE("empty record stream gives a header-only series") {
  std::ostringstream os;
  write_series_csv(os, {});
  CHECK(os.str() == "n,t,k,h_norm,u_norm,v_norm,h_max,u_max,v_max,source\r\n");
}

TEST_CASE("snapshot has one row per node") {
  const Grid g = build_grid(0, 0, 1, 1, 5, 5);
  FlowState s = FlowState::zeros(g);
  for (double& h : s.h) h = 0.5;
  std::ostringstream os;
  write_snapshot_csv(os, s, 1e-6);
  std::istringstream is(os.str());
  const SnapshotTable t = read_snapshot_csv(is);
  CHECK(t.x.size() == 36);
  CHECK(t.h[17] == 0.5);
  CHECK(t.x[1] == doctest::Approx(0.2));
  CHECK(t.y[6] == doctest::Approx(0.2));
}

TEST_CASE("binary snapshot layout") {
  const Grid g = build_grid(0, 0, 1, 1, 5, 6);
  FlowState s = FlowState::zeros(g);
  s.t = 0.25;
  s.h[3] = 2.0;
  s.hu[3] = 1.0;
  std::ostringstream os;
  write_snapshot_f64(os, s, 1e-6);
  const std::string b = os.str();
  REQUIRE(b.size() == 24 + 3 * 8 * g.size());
  CHECK(b.substr(0, 4) == "SWE0");
  const auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
    return v;
  };
  CHECK(u32(4) == 6u);
  CHECK(u32(8) == 7u);
  CHECK(u32(12) == 3u);
  const auto f64 = [&](std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  };
  CHECK(f64(16) == 0.25);
  CHECK(f64(24 + 3 * 8) == 2.0);
  CHECK(f64(24 + 8 * g.size() + 3 * 8) == 0.5);
  CHECK(snapshot_file_name(0.25, SnapshotFormat::Float64) == "snapshot_t0.25.f64");
  CHECK(snapshot_file_name(1.0, SnapshotFormat::Csv) == "snapshot_t1.csv");
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto cells = split_csv_line("1,\"a,b\",\"x\"\"y\",");
  REQUIRE(cells.size() == 4);
  CHECK(cells[1] == "a,b");
  CHECK(cells[2] == "x\"y");
  CHECK(cells[3].empty());
}

TEST_CASE("series round-trips bit for bit") {
  const Scenario s = load_scenario(kLakeDoc);
  const RunOutput out = run_scenario(s);
  REQUIRE(out.status == RunStatus::Completed);
  std::vector<RunRecord> rec = out.records;
  rec[1].source = "odd, \"quoted\" source";
  rec[2].t = 0.1 + 0.2;
  std::ostringstream os;
  write_series_csv(os, rec);
  std::istringstream is(os.str());
  const std::vector<RunRecord> back = read_series_csv(is);
  REQUIRE(back.size() == rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(back[i].n == rec[i].n);
    CHECK(std::memcmp(&back[i].t, &rec[i].t, sizeof(double)) == 0);
    CHECK(back[i].k == rec[i].k);
    CHECK(back[i].h_norm == rec[i].h_norm);
    CHECK(back[i].v_max == rec[i].v_max);
    CHECK(back[i].source == rec[i].source);
  }
}

TEST_CASE("scenario run records, snapshots and files") {
  Scenario s = load_scenario(kLakeDoc);
  s.output.directory = scratch_dir("lake");
  const RunOutput out = run_scenario(s);
  REQUIRE(out.status == RunStatus::Completed);
  CHECK(out.n == 10);
  CHECK(out.t == doctest::Approx(0.5));
  // Levels 0, 2, 4, 6, 8, 10.
  REQUIRE(out.records.size() == 6);
  for (std::size_t i = 1; i < out.records.size(); ++i) CHECK(out.records[i].t > out.records[i - 1].t);
  CHECK(out.records[0].source.empty());
  CHECK(out.records[1].source == "UserOverride");
  CHECK(out.governor_log.size() == 10);
  REQUIRE(out.snapshots.size() == 1);
  CHECK(out.snapshots[0].state.t == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out.records.back().h_max == 1.5);

  write_outputs(out, s.output);
  CHECK(fs::exists(s.output.directory / "series.csv"));
  CHECK(fs::exists(s.output.directory / "governor.csv"));
  CHECK(fs::exists(s.output.directory / "snapshot_t0.25.csv"));
  CHECK(slurp(s.output.directory / "governor.csv").rfind("n,t,k_cfl,k_thm1,gamma,chosen_k,source", 0) == 0);

  Scenario blocked = s;
  blocked.output.directory = "/proc/swe_cannot_write_here";
  CHECK_THROWS_AS(write_outputs(out, blocked.output), std::runtime_error);
}

TEST_CASE("identical documents give identical series") {
  const auto once = [] {
    std::ostringstream os;
    write_series_csv(os, run_scenario(load_scenario(kLakeDoc)).records);
    return os.str();
  };
  CHECK(once() == once());
}

TEST_CASE("snapshot landing shortens the governor step") {
  std::string doc = kThackerDoc;
  doc.replace(doc.find("k = 0.0013717421124828531\n"), 26, "");
  doc += "[output]\nsnapshot_times = 0.05\n";
  doc.replace(doc.find("[time]\n"), 7, "[time]\nt_end = 0.1\n");
  Scenario s = load_scenario(doc);
  s.grid.mx = s.grid.my = 108;
  const RunOutput out = run_scenario(s);
  REQUIRE(out.status == RunStatus::Completed);
  REQUIRE(out.snapshots.size() == 1);
  CHECK(out.snapshots[0].state.t == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(out.t == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("tabulated inputs reproduce the built-in state") {
  const fs::path dir = scratch_dir("tabulated");
  const Scenario base = load_scenario(kLakeDoc);
  FlowState init = build_initial_state(base);
  init.h[init.grid.index(5, 7)] = 1.75;
  {
    std::ofstream f(dir / "init.csv");
    write_snapshot_csv(f, init, 1e-6);
    std::ofstream t(dir / "bed.csv");
    t << "x,y,s0x,s0y\n";
    for (int p = 0; p <= init.grid.my; ++p) {
      for (int l = 0; l <= init.grid.mx; ++l) {
        t << format_double(init.grid.x(l)) << ',' << format_double(init.grid.y(p)) << ",0.01,-0.02\n";
      }
    }
  }
  std::string doc = kLakeDoc;
  doc.replace(doc.find("kind = constant"), 15, "kind = tabulated\nfile = " + (dir / "bed.csv").string());
  const std::string uniform = "kind = uniform-depth-with-discharge\ndepth = 1.5";
  doc.replace(doc.find(uniform), uniform.size(),
              "kind = tabulated\nfile = " + (dir / "init.csv").string());
  const Scenario s = load_scenario(doc);
  const FlowState read = build_initial_state(s);
  CHECK(read.h == init.h);
  const BedSlopes sl = build_slopes(s, read.grid);
  CHECK(sl.s0x[10] == 0.01);
  CHECK(sl.s0y[10] == -0.02);

  {
    std::ofstream t(dir / "bed.csv");
    t << "x,y,s0x,s0y\n0,0,0,0\n";
  }
  CHECK_THROWS_AS(build_slopes(s, read.grid), ConfigError);
}

TEST_CASE("dry flood preset diverges before the horizon") {
  const RunOutput out = run_scenario(logone_scenario(LogonePreset::make(LogoneBed::Dry, LogoneDischarge::Min)));
  CHECK(out.status == RunStatus::BlowUp);
  CHECK(out.t < 3.0);
}

// Completes only with much smaller steps on this coarse grid; tracked here.
TEST_CASE("basin scenario with the governor completes one period accurately" * doctest::may_fail()) {
  const double period = 2.221441469079183;
  std::string doc = kThackerDoc;
  doc.replace(doc.find("k = 0.0013717421124828531\n"), 26, "");
  doc.replace(doc.find("[time]\n"), 7, "[time]\nt_end = 2.221441469079183\n");
  doc += "[output]\nsnapshot_times = 2.221441469079183\n";
  const Scenario s = load_scenario(doc);
  const RunOutput out = run_scenario(s);
  REQUIRE(out.status == RunStatus::Completed);
  REQUIRE(out.snapshots.size() == 1);
  const FlowState& end = out.snapshots[0].state;
  const FlowState exact = thacker_state(ThackerCase::Radial, end.grid, period, s.thacker);
  double worst = 0.0;
  for (std::size_t i = 0; i < end.h.size(); ++i) worst = std::max(worst, std::abs(end.h[i] - exact.h[i]));
  CHECK(worst < 1e-2);
}
