#include "swe/scenario.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "swe/text_format.hpp"

namespace swe {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

Grid GridSpec::build() const {
  if (lx && ly) return build_grid(x0, y0, *lx, *ly, mx, my);
  if (dx && dy) {
    if (!(*dx > 0.0) || !(*dy > 0.0)) throw std::invalid_argument("grid spacings must be positive");
    return build_grid_from_spacing(x0, y0, *dx, *dy, mx, my);
  }
  throw std::invalid_argument("grid needs either lx/ly or dx/dy");
}

namespace {

bool is_thacker(InitialKind k) { return k == InitialKind::Thacker1 || k == InitialKind::Thacker2; }

ThackerCase thacker_case(InitialKind k) {
  return k == InitialKind::Thacker1 ? ThackerCase::Radial : ThackerCase::Planar;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"x0", "y0", "lx", "ly", "dx", "dy", "mx", "my"}},
      {"physics", {"g", "n_manning", "c0", "h_eps"}},
      {"topography", {"kind", "h0", "d", "xc", "yc", "orientation", "s0x", "s0y", "file"}},
      {"initial", {"kind", "depth", "discharge_x", "discharge_y", "dam_y", "upstream_depth", "file"}},
      {"boundary", {"kind"}},
      {"thacker", {"l", "h0", "d", "g", "r0", "eta"}},
      {"time", {"t_end", "policy", "k", "gamma", "clamp", "k_max"}},
      {"solver", {"picard_max_iters", "picard_tol", "linearization", "damping", "jacobian"}},
      {"output", {"cadence", "snapshot_times", "directory", "snapshot_format"}},
  };
  return keys;
}

/// Parsed document with typed accessors that report the entry's line.
class Document {
 public:
  explicit Document(std::string_view text) {
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view raw = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      const auto hash = raw.find('#');
      if (hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string line = trim(raw);
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(line_no, "malformed section header '" + line + "'");
        section = trim(std::string_view(line).substr(1, line.size() - 2));
        if (!known_keys().count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      } else {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (section.empty()) throw ConfigError(line_no, "key '" + key + "' outside any section");
        if (!known_keys().at(section).count(key)) {
          throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
        }
        if (value.empty()) throw ConfigError(line_no, "empty value for " + section + "." + key);
        auto& sec = entries_[section];
        if (sec.count(key)) throw ConfigError(line_no, "duplicate key " + section + "." + key);
        sec[key] = Entry{value, line_no};
      }
      if (end == text.size()) break;
    }
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    return parse_number(*e, section + "." + key);
  }

  std::optional<double> maybe_number(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return parse_number(*e, section + "." + key);
  }

  /// Number that must be strictly positive (lengths, depths, times, constants).
  double positive(const std::string& section, const std::string& key, double fallback) const {
    const double v = number(section, key, fallback);
    if (!(v > 0.0)) throw ConfigError(line(section, key), section + "." + key + " must be positive");
    return v;
  }

  double non_negative(const std::string& section, const std::string& key, double fallback) const {
    const double v = number(section, key, fallback);
    if (!(v >= 0.0)) throw ConfigError(line(section, key), section + "." + key + " must be non-negative");
    return v;
  }

  long integer(const std::string& section, const std::string& key, long fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    long v = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      throw ConfigError(e->line, section + "." + key + ": expected an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    throw ConfigError(e->line, section + "." + key + ": expected true or false");
  }

  template <typename Enum>
  Enum choice(const std::string& section, const std::string& key, const std::map<std::string, Enum>& options,
              Enum fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const auto it = options.find(e->value);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : ", ") + name;
      throw ConfigError(e->line, section + "." + key + ": '" + e->value + "' is not one of " + allowed);
    }
    return it->second;
  }

  std::vector<double> number_list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    const Entry* e = find(section, key);
    if (!e) return out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      out.push_back(parse_number(Entry{t, e->line}, section + "." + key));
    }
    return out;
  }

  int line(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    return e ? e->line : 0;
  }

 private:
  static double parse_number(const Entry& e, const std::string& name) {
    try {
      const double v = parse_double(e.value);
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
      return v;
    } catch (const std::invalid_argument&) {
      throw ConfigError(e.line, name + ": expected a finite number, got '" + e.value + "'");
    }
  }

  std::map<std::string, std::map<std::string, Entry>> entries_;
};

std::vector<std::string> read_lines(std::istream& is) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

void Scenario::validate() const {
  try {
    grid.build();
    physics.validate();
    solver.validate();
    time.governor.validate();
    if (is_thacker(initial.kind)) thacker.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  if (!(time.t_end > 0.0)) throw ConfigError(0, "time.t_end must be positive");
  if (output.cadence < 1) throw ConfigError(0, "output.cadence must be >= 1");
  if (boundary == BoundaryKind::ExactSolution && !is_thacker(initial.kind)) {
    throw ConfigError(0, "boundary kind exact-solution needs a thacker1 or thacker2 initial state");
  }
  if (initial.kind == InitialKind::UniformDischarge) {
    if (!(initial.depth > 0.0)) throw ConfigError(0, "initial.depth must be positive");
    if (initial.dam_y && !(initial.upstream_depth >= 0.0)) {
      throw ConfigError(0, "initial.upstream_depth must be non-negative");
    }
  }
  if ((initial.kind == InitialKind::Tabulated && initial.file.empty()) ||
      (topography.kind == TopographyKind::Tabulated && topography.file.empty())) {
    throw ConfigError(0, "tabulated input needs a file");
  }
}

Scenario load_scenario(std::string_view text) {
  const Document doc(text);

  std::vector<std::string> missing;
  if (!doc.has("grid", "mx")) missing.push_back("grid.mx");
  if (!doc.has("grid", "my")) missing.push_back("grid.my");
  if (!doc.has("grid", "lx") && !doc.has("grid", "dx")) missing.push_back("grid.lx (or grid.dx)");
  if (!doc.has("grid", "ly") && !doc.has("grid", "dy")) missing.push_back("grid.ly (or grid.dy)");
  if (!doc.has("initial", "kind")) missing.push_back("initial.kind");
  const std::string init_kind = doc.text("initial", "kind", "");
  const bool thacker_init = init_kind == "thacker1" || init_kind == "thacker2";
  if (!doc.has("time", "t_end") && !thacker_init) missing.push_back("time.t_end");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError(0, "missing required keys: " + list);
  }

  Scenario s;
  // Grid.
  s.grid.x0 = doc.number("grid", "x0", 0.0);
  s.grid.y0 = doc.number("grid", "y0", 0.0);
  s.grid.mx = static_cast<int>(doc.integer("grid", "mx", 0));
  s.grid.my = static_cast<int>(doc.integer("grid", "my", 0));
  if (s.grid.mx < 5) throw ConfigError(doc.line("grid", "mx"), "grid.mx must be >= 5");
  if (s.grid.my < 5) throw ConfigError(doc.line("grid", "my"), "grid.my must be >= 5");
  if (doc.has("grid", "lx")) s.grid.lx = doc.positive("grid", "lx", 0.0);
  if (doc.has("grid", "ly")) s.grid.ly = doc.positive("grid", "ly", 0.0);
  if (doc.has("grid", "dx")) s.grid.dx = doc.positive("grid", "dx", 0.0);
  if (doc.has("grid", "dy")) s.grid.dy = doc.positive("grid", "dy", 0.0);
  if (s.grid.lx.has_value() != s.grid.ly.has_value()) {
    throw ConfigError(doc.line("grid", s.grid.lx ? "lx" : "ly"), "grid.lx and grid.ly go together");
  }
  if (!s.grid.lx && !(s.grid.dx && s.grid.dy)) {
    throw ConfigError(doc.line("grid", s.grid.dx ? "dx" : "dy"), "grid.dx and grid.dy go together");
  }
  if (s.grid.lx && s.grid.dx) throw ConfigError(doc.line("grid", "dx"), "give either lx/ly or dx/dy, not both");

  // Thacker parameters (also the defaults for a paraboloid bed).
  s.thacker.l = doc.positive("thacker", "l", s.thacker.l);
  s.thacker.h0 = doc.positive("thacker", "h0", s.thacker.h0);
  s.thacker.d = doc.positive("thacker", "d", s.thacker.d);
  s.thacker.g = doc.positive("thacker", "g", s.thacker.g);
  s.thacker.r0 = doc.positive("thacker", "r0", s.thacker.r0);
  s.thacker.eta = doc.positive("thacker", "eta", s.thacker.eta);
  if (!(s.thacker.r0 < s.thacker.d)) throw ConfigError(doc.line("thacker", "r0"), "thacker.r0 must be below thacker.d");

  // Initial state.
  s.initial.kind = doc.choice<InitialKind>("initial", "kind",
                                           {{"thacker1", InitialKind::Thacker1},
                                            {"thacker2", InitialKind::Thacker2},
                                            {"uniform-depth-with-discharge", InitialKind::UniformDischarge},
                                            {"tabulated", InitialKind::Tabulated}},
                                           InitialKind::UniformDischarge);
  if (s.initial.kind == InitialKind::UniformDischarge) {
    if (!doc.has("initial", "depth")) throw ConfigError(doc.line("initial", "kind"), "initial.depth is required");
    s.initial.depth = doc.positive("initial", "depth", 0.0);
    s.initial.discharge_x = doc.number("initial", "discharge_x", 0.0);
    s.initial.discharge_y = doc.number("initial", "discharge_y", 0.0);
    s.initial.dam_y = doc.maybe_number("initial", "dam_y");
    s.initial.upstream_depth = doc.non_negative("initial", "upstream_depth", 0.0);
  } else if (s.initial.kind == InitialKind::Tabulated) {
    if (!doc.has("initial", "file")) throw ConfigError(doc.line("initial", "kind"), "initial.file is required");
    s.initial.file = doc.text("initial", "file", "");
  }

  // Physics. Basin runs share the verification harness's dry threshold.
  const double default_h_eps = thacker_init ? ThackerRun{}.physics.h_eps : s.physics.h_eps;
  s.physics.g = doc.positive("physics", "g", thacker_init ? s.thacker.g : s.physics.g);
  s.physics.n_manning = doc.non_negative("physics", "n_manning", s.physics.n_manning);
  s.physics.c0 = doc.positive("physics", "c0", s.physics.c0);
  s.physics.h_eps = doc.positive("physics", "h_eps", default_h_eps);

  // Topography.
  const TopographyKind default_topo = thacker_init ? TopographyKind::Paraboloid : TopographyKind::Constant;
  s.topography.kind = doc.choice<TopographyKind>("topography", "kind",
                                                 {{"paraboloid", TopographyKind::Paraboloid},
                                                  {"constant", TopographyKind::Constant},
                                                  {"tabulated", TopographyKind::Tabulated}},
                                                 default_topo);
  if (s.topography.kind == TopographyKind::Paraboloid) {
    s.topography.h0 = doc.positive("topography", "h0", s.thacker.h0);
    s.topography.d = doc.positive("topography", "d", s.thacker.d);
    const double cx = thacker_init ? 0.5 * s.thacker.l : 0.0;
    s.topography.xc = doc.number("topography", "xc", cx);
    s.topography.yc = doc.number("topography", "yc", cx);
    s.topography.orientation = doc.choice<SlopeOrientation>(
        "topography", "orientation",
        {{"downhill", SlopeOrientation::Downhill}, {"gradient", SlopeOrientation::Gradient}},
        SlopeOrientation::Downhill);
  } else if (s.topography.kind == TopographyKind::Constant) {
    s.topography.s0x = doc.number("topography", "s0x", 0.0);
    s.topography.s0y = doc.number("topography", "s0y", 0.0);
  } else {
    if (!doc.has("topography", "file")) {
      throw ConfigError(doc.line("topography", "kind"), "topography.file is required");
    }
    s.topography.file = doc.text("topography", "file", "");
  }

  // Boundary.
  s.boundary = doc.choice<BoundaryKind>(
      "boundary", "kind",
      {{"exact-solution", BoundaryKind::ExactSolution}, {"fixed-values", BoundaryKind::FixedValues}},
      thacker_init ? BoundaryKind::ExactSolution : BoundaryKind::FixedValues);
  if (s.boundary == BoundaryKind::ExactSolution && !thacker_init) {
    throw ConfigError(doc.line("boundary", "kind"), "exact-solution boundaries need a thacker initial state");
  }

  // Time.
  const double horizon = thacker_init ? thacker_horizon(thacker_case(s.initial.kind), s.thacker) : 0.0;
  s.time.t_end = doc.positive("time", "t_end", horizon);
  GovernorConfig& gov = s.time.governor;
  gov.policy = doc.choice<StepPolicy>("time", "policy",
                                      {{"fixed", StepPolicy::Fixed}, {"governor", StepPolicy::Governor}},
                                      doc.has("time", "k") ? StepPolicy::Fixed : StepPolicy::Governor);
  if (gov.policy == StepPolicy::Fixed) {
    if (!doc.has("time", "k")) throw ConfigError(doc.line("time", "policy"), "fixed policy needs time.k");
    gov.fixed_k = doc.positive("time", "k", 0.0);
  }
  gov.gamma = doc.positive("time", "gamma", gov.gamma);
  if (gov.gamma > 18.0) throw ConfigError(doc.line("time", "gamma"), "time.gamma must lie in (0, 18]");
  gov.clamp_to_cfl = doc.boolean("time", "clamp", gov.clamp_to_cfl);
  if (doc.has("time", "k_max")) gov.k_max = doc.positive("time", "k_max", 0.0);

  // Solver.
  StageConfig& st = s.solver;
  st.picard_max_iters = static_cast<int>(doc.integer("solver", "picard_max_iters", st.picard_max_iters));
  if (st.picard_max_iters < 1) {
    throw ConfigError(doc.line("solver", "picard_max_iters"), "solver.picard_max_iters must be >= 1");
  }
  st.picard_tol = doc.positive("solver", "picard_tol", st.picard_tol);
  st.linearization = doc.choice<Linearization>(
      "solver", "linearization",
      {{"picard", Linearization::PicardOnly},
       {"frozen-jacobian", Linearization::FrozenJacobian}},
      st.linearization);
  st.damping = doc.positive("solver", "damping", st.damping);
  if (st.damping > 1.0) throw ConfigError(doc.line("solver", "damping"), "solver.damping must lie in (0, 1]");
  st.jacobian = doc.choice<JacobianForm>(
      "solver", "jacobian", {{"as-printed", JacobianForm::AsPrinted}, {"conservative", JacobianForm::Conservative}},
      st.jacobian);

  // Output.
  s.output.cadence = doc.integer("output", "cadence", 1);
  if (s.output.cadence < 1) throw ConfigError(doc.line("output", "cadence"), "output.cadence must be >= 1");
  s.output.snapshot_times = doc.number_list("output", "snapshot_times");
  for (double t : s.output.snapshot_times) {
    if (t < 0.0 || t > s.time.t_end) {
      throw ConfigError(doc.line("output", "snapshot_times"), "snapshot time " + format_double(t) + " outside [0, t_end]");
    }
  }
  std::sort(s.output.snapshot_times.begin(), s.output.snapshot_times.end());
  s.output.directory = doc.text("output", "directory", ".");
  s.output.format = doc.choice<SnapshotFormat>("output", "snapshot_format",
                                               {{"csv", SnapshotFormat::Csv}, {"f64", SnapshotFormat::Float64}},
                                               SnapshotFormat::Csv);

  s.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

int LogonePreset::mx() const { return static_cast<int>(std::lround(length_x / dx)); }
int LogonePreset::my() const { return static_cast<int>(std::lround(length_y / dy)); }

LogonePreset LogonePreset::make(LogoneBed bed, LogoneDischarge discharge) {
  LogonePreset p;
  p.bed = bed;
  p.discharge = discharge;
  p.h0_down = bed == LogoneBed::Wet ? 0.176 : 0.0014;
  switch (discharge) {
    case LogoneDischarge::Min: p.q = 16.0; break;
    case LogoneDischarge::Avg: p.q = 492.0; break;
    case LogoneDischarge::Max: p.q = 2420.0; break;
  }
  return p;
}

Scenario logone_scenario(const LogonePreset& p) {
  Scenario s;
  s.grid.mx = p.mx();
  s.grid.my = p.my();
  s.grid.dx = p.dx;
  s.grid.dy = p.dy;
  s.physics.g = p.g;
  s.physics.c0 = p.c0;
  s.physics.n_manning = p.n_manning;
  s.topography.kind = TopographyKind::Paraboloid;
  s.topography.h0 = p.slope_h0;
  s.topography.d = 1.0;
  s.topography.xc = p.slope_xc;
  s.topography.yc = p.slope_yc;
  s.topography.orientation = SlopeOrientation::Gradient;
  s.initial.kind = InitialKind::UniformDischarge;
  s.initial.depth = p.h0_down;
  s.initial.discharge_x = p.q;
  s.initial.discharge_y = p.q;
  s.initial.dam_y = p.dam_y;
  s.initial.upstream_depth = p.h_up;
  s.boundary = BoundaryKind::FixedValues;
  s.time.t_end = p.t_end;
  s.time.governor.policy = StepPolicy::Fixed;
  s.time.governor.fixed_k = p.k;
  s.validate();
  return s;
}

LogonePreset parse_logone_name(std::string_view name) {
  const auto fail = [&]() {
    return ConfigError(0, "preset '" + std::string(name) + "' is not logone:<wet|dry>:<min|avg|max>");
  };
  if (name.substr(0, 7) != "logone:") throw fail();
  const std::string_view rest = name.substr(7);
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) throw fail();
  const std::string_view bed = rest.substr(0, colon);
  const std::string_view q = rest.substr(colon + 1);
  LogoneBed b;
  if (bed == "wet") b = LogoneBed::Wet;
  else if (bed == "dry") b = LogoneBed::Dry;
  else throw fail();
  LogoneDischarge d;
  if (q == "min") d = LogoneDischarge::Min;
  else if (q == "avg") d = LogoneDischarge::Avg;
  else if (q == "max") d = LogoneDischarge::Max;
  else throw fail();
  return LogonePreset::make(b, d);
}

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& header) {
  std::ifstream in = open_input(path);
  const std::vector<std::string> lines = read_lines(in);
  if (lines.empty() || split_csv_line(lines.front()) != header) {
    std::string expect;
    for (const auto& h : header) expect += (expect.empty() ? "" : ",") + h;
    throw ConfigError(1, "'" + path.string() + "' must start with header " + expect);
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != header.size()) {
      throw ConfigError(static_cast<int>(i + 1), "'" + path.string() + "': wrong number of columns");
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        row.push_back(parse_double(trim(f)));
      } catch (const std::invalid_argument&) {
        throw ConfigError(static_cast<int>(i + 1), "'" + path.string() + "': bad number '" + f + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_node_table(const std::vector<std::vector<double>>& rows, const Grid& grid,
                      const std::filesystem::path& path) {
  if (rows.size() != grid.size()) {
    throw ConfigError(0, "'" + path.string() + "' has " + std::to_string(rows.size()) + " rows, grid has " +
                             std::to_string(grid.size()) + " nodes");
  }
  const double tol = 1e-9 * std::max({1.0, std::abs(grid.x0) + grid.lx, std::abs(grid.y0) + grid.ly});
  for (int p = 0; p <= grid.my; ++p) {
    for (int l = 0; l <= grid.mx; ++l) {
      const auto& row = rows[grid.index(l, p)];
      if (std::abs(row[0] - grid.x(l)) > tol || std::abs(row[1] - grid.y(p)) > tol) {
        throw ConfigError(static_cast<int>(grid.index(l, p) + 2),
                          "'" + path.string() + "': coordinates do not match node (" + std::to_string(l) + ", " +
                              std::to_string(p) + ")");
      }
    }
  }
}

}  // namespace

FlowState build_initial_state(const Scenario& s) {
  const Grid grid = s.grid.build();
  switch (s.initial.kind) {
    case InitialKind::Thacker1:
    case InitialKind::Thacker2:
      return thacker_state(thacker_case(s.initial.kind), grid, 0.0, s.thacker);
    case InitialKind::UniformDischarge: {
      FlowState st = FlowState::zeros(grid);
      const double u0 = s.initial.discharge_x / s.initial.depth;
      const double v0 = s.initial.discharge_y / s.initial.depth;
      for (int p = 0; p <= grid.my; ++p) {
        const bool upstream = s.initial.dam_y && grid.y(p) < *s.initial.dam_y;
        for (int l = 0; l <= grid.mx; ++l) {
          const std::size_t i = grid.index(l, p);
          if (upstream) {
            st.h[i] = s.initial.upstream_depth;
          } else {
            st.h[i] = s.initial.depth;
            st.hu[i] = s.initial.depth * u0;
            st.hv[i] = s.initial.depth * v0;
          }
        }
      }
      return st;
    }
    case InitialKind::Tabulated: {
      const auto rows = read_numeric_csv(s.initial.file, {"x", "y", "h", "u", "v"});
      check_node_table(rows, grid, s.initial.file);
      FlowState st = FlowState::zeros(grid);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][2] < 0.0) throw ConfigError(static_cast<int>(i + 2), "negative depth in initial table");
        st.h[i] = rows[i][2];
        st.hu[i] = rows[i][2] * rows[i][3];
        st.hv[i] = rows[i][2] * rows[i][4];
      }
      return st;
    }
  }
  throw ConfigError(0, "unsupported initial state");
}

BedSlopes build_slopes(const Scenario& s, const Grid& grid) {
  switch (s.topography.kind) {
    case TopographyKind::Paraboloid: {
      BedSlopes b = paraboloid_slopes(grid, s.topography.h0, s.topography.d, s.topography.xc, s.topography.yc);
      return s.topography.orientation == SlopeOrientation::Downhill ? b.negated() : b;
    }
    case TopographyKind::Constant:
      return BedSlopes::constant(grid, s.topography.s0x, s.topography.s0y);
    case TopographyKind::Tabulated: {
      const auto rows = read_numeric_csv(s.topography.file, {"x", "y", "s0x", "s0y"});
      check_node_table(rows, grid, s.topography.file);
      BedSlopes b = BedSlopes::flat(grid);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        b.s0x[i] = rows[i][2];
        b.s0y[i] = rows[i][3];
      }
      return b;
    }
  }
  throw ConfigError(0, "unsupported topography");
}

BoundaryProvider build_boundary(const Scenario& s, const FlowState& initial) {
  if (s.boundary == BoundaryKind::ExactSolution) {
    return thacker_boundary(thacker_case(s.initial.kind), s.thacker, initial.grid);
  }
  const Grid grid = initial.grid;
  const Velocities vel = primitive_velocities(initial, s.physics.h_eps);
  auto h = std::make_shared<Field>(initial.h);
  auto u = std::make_shared<Field>(vel.u);
  auto v = std::make_shared<Field>(vel.v);
  return [grid, h, u, v](int l, int p, double) {
    const std::size_t i = grid.index(l, p);
    return BoundaryValue{(*h)[i], (*u)[i], (*v)[i]};
  };
}

RunRecord make_record(long n, const FlowState& state, double k, std::string source, double h_eps) {
  RunRecord r;
  r.n = n;
  r.t = state.t;
  r.k = k;
  const Velocities vel = primitive_velocities(state, h_eps);
  r.h_norm = l2_norm(state.h, state.grid);
  r.u_norm = l2_norm(vel.u, state.grid);
  r.v_norm = l2_norm(vel.v, state.grid);
  const FieldMaxima m = field_maxima(state, h_eps);
  r.h_max = m.h_max;
  r.u_max = m.u_max;
  r.v_max = m.v_max;
  r.source = std::move(source);
  return r;
}

RunOutput run_scenario(const Scenario& s) {
  s.validate();
  const FlowState initial = build_initial_state(s);
  const Grid& grid = initial.grid;

  MarchSetup setup;
  setup.physics = s.physics;
  setup.stage = s.solver;
  setup.slopes = build_slopes(s, grid);
  setup.boundary = build_boundary(s, initial);
  setup.t_end = s.time.t_end;
  for (double t : s.output.snapshot_times) {
    if (t > 0.0 && t < s.time.t_end) setup.landing_times.push_back(t);
  }

  Governor governor(s.time.governor, initial, s.physics.g, s.physics.h_eps);
  if (is_thacker(s.initial.kind)) {
    governor.seed(thacker_norm_envelope(thacker_case(s.initial.kind), grid, s.thacker, s.time.t_end, s.physics.h_eps));
  }

  RunOutput out;
  out.h_eps = s.physics.h_eps;
  std::size_t next_snapshot = 0;
  double prev_t = initial.t;
  long last_recorded = -1;
  const auto take_snapshots = [&](const FlowState& st) {
    while (next_snapshot < s.output.snapshot_times.size()) {
      const double want = s.output.snapshot_times[next_snapshot];
      if (std::abs(st.t - want) > 1e-12 * std::max(1.0, std::abs(want))) break;
      out.snapshots.push_back(Snapshot{want, st});
      ++next_snapshot;
    }
  };
  RunRecord pending;
  const auto on_level = [&](long n, const FlowState& st, const StepBound* bound) {
    if (bound) {
      out.governor_log.push_back(GovernorLogRow{n - 1, prev_t, *bound});
      prev_t = st.t;
    }
    const double k = bound ? bound->chosen_k : 0.0;
    const std::string source = bound ? std::string(to_string(bound->source)) : std::string();
    pending = make_record(n, st, k, source, s.physics.h_eps);
    if (n % s.output.cadence == 0) {
      out.records.push_back(pending);
      last_recorded = n;
    }
    take_snapshots(st);
  };

  const MarchOutcome outcome = march(initial, setup, governor, on_level);
  out.status = outcome.status;
  if (outcome.status == RunStatus::Completed) {
    out.n = outcome.steps;
    out.t = outcome.t;
    if (last_recorded != outcome.steps) out.records.push_back(pending);
  } else {
    out.n = outcome.steps + 1;
    out.t = outcome.t;
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string q = "\"";
  for (char c : text) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

void write_series_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "n,t,k,h_norm,u_norm,v_norm,h_max,u_max,v_max,source\r\n";
  for (const RunRecord& r : records) {
    os << r.n << ',' << format_double(r.t) << ',' << format_double(r.k) << ',' << format_double(r.h_norm) << ','
       << format_double(r.u_norm) << ',' << format_double(r.v_norm) << ',' << format_double(r.h_max) << ','
       << format_double(r.u_max) << ',' << format_double(r.v_max) << ',' << csv_field(r.source) << "\r\n";
  }
}

void write_governor_csv(std::ostream& os, const std::vector<GovernorLogRow>& rows) {
  os << "n,t,k_cfl,k_thm1,gamma,chosen_k,source\r\n";
  for (const GovernorLogRow& r : rows) {
    os << r.n << ',' << format_double(r.t) << ',' << format_double(r.bound.k_cfl) << ','
       << format_double(r.bound.k_thm1) << ',' << format_double(r.bound.gamma) << ','
       << format_double(r.bound.chosen_k) << ',' << csv_field(std::string(to_string(r.bound.source))) << "\r\n";
  }
}

void write_snapshot_csv(std::ostream& os, const FlowState& state, double h_eps) {
  const Grid& g = state.grid;
  const Velocities vel = primitive_velocities(state, h_eps);
  os << "x,y,h,u,v\r\n";
  for (int p = 0; p <= g.my; ++p) {
    for (int l = 0; l <= g.mx; ++l) {
      const std::size_t i = g.index(l, p);
      os << format_double(g.x(l)) << ',' << format_double(g.y(p)) << ',' << format_double(state.h[i]) << ','
         << format_double(vel.u[i]) << ',' << format_double(vel.v[i]) << "\r\n";
    }
  }
}

namespace {

void put_le(std::ostream& os, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  unsigned char buf[8];
  for (std::size_t i = 0; i < n; ++i) {
    buf[i] = bytes[std::endian::native == std::endian::little ? i : n - 1 - i];
  }
  os.write(reinterpret_cast<const char*>(buf), static_cast<std::streamsize>(n));
}

}  // namespace

void write_snapshot_f64(std::ostream& os, const FlowState& state, double h_eps) {
  const Grid& g = state.grid;
  os.write("SWE0", 4);
  const std::uint32_t nx = static_cast<std::uint32_t>(g.nx());
  const std::uint32_t ny = static_cast<std::uint32_t>(g.ny());
  const std::uint32_t fields = 3;
  put_le(os, &nx, 4);
  put_le(os, &ny, 4);
  put_le(os, &fields, 4);
  put_le(os, &state.t, 8);
  const Velocities vel = primitive_velocities(state, h_eps);
  for (const Field* f : {&state.h, &vel.u, &vel.v}) {
    for (double x : *f) put_le(os, &x, 8);
  }
}

std::string snapshot_file_name(double t, SnapshotFormat format) {
  return "snapshot_t" + format_double(t) + (format == SnapshotFormat::Csv ? ".csv" : ".f64");
}

void write_outputs(const RunOutput& out, const OutputPlan& plan) {
  std::error_code ec;
  std::filesystem::create_directories(plan.directory, ec);
  if (ec) throw std::runtime_error("cannot create '" + plan.directory.string() + "': " + ec.message());

  const auto write_file = [](const std::filesystem::path& path, bool binary,
                             const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out | std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
  };
  write_file(plan.directory / "series.csv", false, [&](std::ostream& os) { write_series_csv(os, out.records); });
  write_file(plan.directory / "governor.csv", false,
             [&](std::ostream& os) { write_governor_csv(os, out.governor_log); });
  for (const Snapshot& snap : out.snapshots) {
    const auto path = plan.directory / snapshot_file_name(snap.requested_t, plan.format);
    write_file(path, plan.format == SnapshotFormat::Float64, [&](std::ostream& os) {
      if (plan.format == SnapshotFormat::Csv) {
        write_snapshot_csv(os, snap.state, out.h_eps);
      } else {
        write_snapshot_f64(os, snap.state, out.h_eps);
      }
    });
  }
}

std::vector<RunRecord> read_series_csv(std::istream& is) {
  const std::vector<std::string> lines = read_lines(is);
  const std::vector<std::string> header = {"n", "t", "k", "h_norm", "u_norm", "v_norm",
                                           "h_max", "u_max", "v_max", "source"};
  if (lines.empty() || split_csv_line(lines.front()) != header) throw std::runtime_error("not a series.csv header");
  std::vector<RunRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != header.size()) throw std::runtime_error("series.csv line " + std::to_string(i + 1) + ": bad row");
    RunRecord r;
    r.n = std::stol(f[0]);
    r.t = parse_double(f[1]);
    r.k = parse_double(f[2]);
    r.h_norm = parse_double(f[3]);
    r.u_norm = parse_double(f[4]);
    r.v_norm = parse_double(f[5]);
    r.h_max = parse_double(f[6]);
    r.u_max = parse_double(f[7]);
    r.v_max = parse_double(f[8]);
    r.source = f[9];
    out.push_back(std::move(r));
  }
  return out;
}

SnapshotTable read_snapshot_csv(std::istream& is) {
  const std::vector<std::string> lines = read_lines(is);
  if (lines.empty() || split_csv_line(lines.front()) != std::vector<std::string>{"x", "y", "h", "u", "v"}) {
    throw std::runtime_error("not a snapshot header");
  }
  SnapshotTable t;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv_line(lines[i]);
    if (f.size() != 5) throw std::runtime_error("snapshot line " + std::to_string(i + 1) + ": bad row");
    t.x.push_back(parse_double(f[0]));
    t.y.push_back(parse_double(f[1]));
    t.h.push_back(parse_double(f[2]));
    t.u.push_back(parse_double(f[3]));
    t.v.push_back(parse_double(f[4]));
  }
  return t;
}

}  // namespace swe
