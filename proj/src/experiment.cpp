#include "gpbt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "gpbt/backlund.hpp"
#include "gpbt/error.hpp"
#include "gpbt/identities.hpp"

namespace gpbt {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite real, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

template <class F>
Setter real(F&& pick) {
  return [pick](ExperimentConfig& c, const std::string& k, const std::string& v) {
    pick(c) = parse_real(k, v);
  };
}

template <class F>
Setter text(F&& pick) {
  return [pick](ExperimentConfig& c, const std::string&, const std::string& v) { pick(c) = v; };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"params.n",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long n = parse_integer(k, v);
         if (n < 1 || n > 64) throw ConfigError(k + ": must be an integer in [1, 64]");
         c.params.n = static_cast<int>(n);
       }},
      {"params.eta", real([](ExperimentConfig& c) -> double& { return c.params.eta; })},
      {"params.b", real([](ExperimentConfig& c) -> double& { return c.params.b; })},
      {"params.c", real([](ExperimentConfig& c) -> double& { return c.params.c; })},
      {"params.v", real([](ExperimentConfig& c) -> double& { return c.params.v; })},
      {"params.mu", real([](ExperimentConfig& c) -> double& { return c.params.mu; })},
      {"params.theta0", real([](ExperimentConfig& c) -> double& { return c.params.theta0; })},
      {"grid.x_min", real([](ExperimentConfig& c) -> double& { return c.grid.x_min; })},
      {"grid.x_max", real([](ExperimentConfig& c) -> double& { return c.grid.x_max; })},
      {"grid.points",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long n = parse_integer(k, v);
         if (n < 0) throw ConfigError(k + ": must be non-negative");
         c.grid.points = static_cast<std::size_t>(n);
       }},
      {"K_schedule",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         try {
           c.k_schedule = parse_real_list(v);
         } catch (const ConfigError& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"seed.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (v == "closed_form") {
           c.seed.kind = SeedKind::ClosedForm;
         } else if (v == "integrate") {
           c.seed.kind = SeedKind::Integrate;
         } else {
           throw ConfigError(k + ": expected closed_form or integrate, got '" + v + "'");
         }
       }},
      {"seed.x0", real([](ExperimentConfig& c) -> double& { return c.seed.x0; })},
      {"seed.r0", real([](ExperimentConfig& c) -> double& { return c.seed.r0; })},
      {"seed.rp0", real([](ExperimentConfig& c) -> double& { return c.seed.rp0; })},
      {"tolerances.ode_abs", real([](ExperimentConfig& c) -> double& { return c.tolerances.ode_abs; })},
      {"tolerances.ode_rel", real([](ExperimentConfig& c) -> double& { return c.tolerances.ode_rel; })},
      {"tolerances.ode_max_step",
       real([](ExperimentConfig& c) -> double& { return c.tolerances.ode_max_step; })},
      {"tolerances.residual_pass",
       real([](ExperimentConfig& c) -> double& { return c.tolerances.residual_pass; })},
      {"tolerances.fixed_point",
       real([](ExperimentConfig& c) -> double& { return c.tolerances.fixed_point; })},
      {"outputs.solution_csv",
       text([](ExperimentConfig& c) -> std::string& { return c.outputs.solution_csv; })},
      {"outputs.wave_csv", text([](ExperimentConfig& c) -> std::string& { return c.outputs.wave_csv; })},
      {"outputs.report_json",
       text([](ExperimentConfig& c) -> std::string& { return c.outputs.report_json; })},
      {"phase.x_ref", real([](ExperimentConfig& c) -> double& { return c.x_ref; })},
      {"wavefunction.t_samples",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         try {
           c.t_samples = parse_real_list(v);
         } catch (const ConfigError& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"verify.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const long long s = parse_integer(k, v);
         if (s < 0) throw ConfigError(k + ": must be non-negative");
         c.verify_seed = static_cast<std::uint64_t>(s);
       }},
  };
  return table;
}

json config_echo(const ExperimentConfig& c) {
  json j;
  j["params"] = {{"n", c.params.n},   {"eta", c.params.eta}, {"b", c.params.b},
                 {"c", c.params.c},   {"v", c.params.v},     {"mu", c.params.mu},
                 {"theta0", c.params.theta0}};
  j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"points", c.grid.points}};
  j["K_schedule"] = c.k_schedule;
  j["seed"] = {{"kind", c.seed.kind == SeedKind::ClosedForm ? "closed_form" : "integrate"},
               {"x0", c.seed.x0},
               {"r0", c.seed.r0},
               {"rp0", c.seed.rp0}};
  j["tolerances"] = {{"ode_abs", c.tolerances.ode_abs},
                     {"ode_rel", c.tolerances.ode_rel},
                     {"ode_max_step", c.tolerances.ode_max_step},
                     {"residual_pass", c.tolerances.residual_pass},
                     {"fixed_point", c.tolerances.fixed_point}};
  j["phase"] = {{"x_ref", c.x_ref}};
  j["wavefunction"] = {{"t_samples", c.t_samples}};
  j["verify"] = {{"seed", c.verify_seed}};
  return j;
}

json check_json(const CheckResult& r) {
  return {{"name", r.name},
          {"deviation", r.deviation},
          {"tolerance", r.tolerance},
          {"pass", r.pass},
          {"status", r.status}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

fs::path output_path(const fs::path& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return out_dir / name;
}

template <class F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), stage + ": " + e.detail());
  }
}

// Interval of x the seed has to cover: the grid, the initial point and the
// images f(x_min), f(x_max) under every partial sum of the K schedule.
Interval seed_span(const ExperimentConfig& cfg) {
  Interval span{std::min(cfg.grid.x_min, cfg.seed.x0), std::max(cfg.grid.x_max, cfg.seed.x0)};
  const PolyG g = cfg.params.g();
  double total = 0.0;
  for (double k : cfg.k_schedule) {
    total += k;
    const ShiftMap m(g, total);
    for (double x : {cfg.grid.x_min, cfg.grid.x_max}) {
      if (!(x > m.valid_domain().lo)) continue;
      const double target = g.value(x) + total;
      if (!(target > 0.0) || !(1.0 + 4.0 * g.eta * target > 0.0)) continue;
      const double fx = solve_f(m, x).f;
      span.lo = std::min(span.lo, fx);
      span.hi = std::max(span.hi, fx);
    }
  }
  return span;
}

Amplitude make_seed(const ExperimentConfig& cfg, std::string& note) {
  if (cfg.seed.kind == SeedKind::ClosedForm) {
    if (auto warning = constraint_warning(cfg.params)) note = *warning;
    return closed_form_amplitude(cfg.params);
  }
  const Interval span = seed_span(cfg);
  const ToleranceSpec tol{cfg.tolerances.ode_abs, cfg.tolerances.ode_rel};
  IntegratorOptions opts;
  if (cfg.tolerances.ode_max_step > 0.0) opts.max_step = cfg.tolerances.ode_max_step;
  return in_stage("seed integration", [&] {
    return Amplitude::from_dense(integrate_span(gp_rhs(cfg.params), cfg.seed.x0, cfg.seed.r0,
                                                cfg.seed.rp0, span.lo, span.hi, tol, opts));
  });
}

std::string orbit_file_name(const std::string& base, std::size_t j) {
  const fs::path p(base);
  return p.stem().string() + "_k" + std::to_string(j) + p.extension().string();
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real("list entry", trim(item)));
  return out;
}

void ExperimentConfig::validate() const {
  if (!(grid.x_min > 0.0 && grid.x_min < grid.x_max)) {
    throw ConfigError("grid: need 0 < x_min < x_max");
  }
  if (grid.points < 7) {
    throw ConfigError("grid too small: grid.points = " + std::to_string(grid.points) +
                      ", need at least 7");
  }
  for (double t : {tolerances.ode_abs, tolerances.ode_rel, tolerances.residual_pass,
                   tolerances.fixed_point}) {
    if (!(t > 0.0)) throw ConfigError("tolerances must be strictly positive");
  }
  try {
    params.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (seed.kind == SeedKind::Integrate) {
    if (!(seed.x0 > 0.0)) throw ConfigError("seed.x0 must be > 0");
    if (!(seed.r0 > 0.0)) throw ConfigError("seed.r0 must be > 0");
  }
  if (tolerances.ode_max_step < 0.0) throw ConfigError("tolerances.ode_max_step must be >= 0");
  if (x_ref < 0.0) throw ConfigError("phase.x_ref must be >= 0");
  if (outputs.solution_csv.empty() || outputs.wave_csv.empty() || outputs.report_json.empty()) {
    throw ConfigError("output file names must not be empty");
  }
}

std::vector<double> ExperimentConfig::abscissae() const {
  return linspace(grid.x_min, grid.x_max, grid.points);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (seen.count(key)) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    seen[key] = lineno;
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in);
}

void write_solution_csv(const fs::path& path, const SolutionGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << "x,r,r_prime\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_real(grid.xs[i]) << ',' << format_real(grid.rs[i]) << ','
        << format_real(grid.rps[i]) << '\n';
  }
}

SolutionGrid read_solution_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,r,r_prime") {
    throw ConfigError(path.string() + ": missing header x,r,r_prime");
  }
  SolutionGrid grid;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<double> row = parse_real_list(line);
    if (row.size() != 3) throw ConfigError(path.string() + ": expected 3 columns");
    grid.xs.push_back(row[0]);
    grid.rs.push_back(row[1]);
    grid.rps.push_back(row[2]);
  }
  return grid;
}

CommandResult cmd_solve(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  CommandResult res;
  std::string note;
  const Amplitude seed = make_seed(cfg, note);
  const std::vector<double> xs = cfg.abscissae();
  SolutionGrid grid = in_stage("sampling", [&] { return sample(seed, xs); });
  const ResidualReport rep = in_stage("residual", [&] { return residual(gp_rhs(cfg.params), grid); });

  const fs::path csv = output_path(out_dir, cfg.outputs.solution_csv);
  write_solution_csv(csv, grid);
  const CheckResult check{"solution_residual", rep.max_interior, cfg.tolerances.residual_pass,
                          rep.max_interior < cfg.tolerances.residual_pass,
                          rep.max_interior < cfg.tolerances.residual_pass ? "pass" : "fail"};
  json report;
  report["command"] = "solve";
  report["checks"] = json::array({check_json(check)});
  report["grid"] = {{"x_min", xs.front()}, {"x_max", xs.back()}, {"points", xs.size()}};
  report["provenance"] = to_string(seed.provenance);
  if (!note.empty()) report["warning"] = note;
  report["params"] = config_echo(cfg);
  const fs::path js = output_path(out_dir, cfg.outputs.report_json);
  write_json(js, report);

  res.written = {csv, js};
  std::ostringstream os;
  os.precision(6);
  os << "solve: x in [" << xs.front() << ", " << xs.back() << "], " << xs.size()
     << " points, residual max " << rep.max_interior;
  if (!note.empty()) os << "\nwarning: " << note;
  res.summary = os.str();
  return res;
}

CommandResult cmd_transform(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.k_schedule.empty()) throw ConfigError("K_schedule must not be empty for transform");
  CommandResult res;
  std::string note;
  const Amplitude seed = make_seed(cfg, note);
  const std::vector<double> xs = cfg.abscissae();
  const std::vector<SolutionGrid> grids =
      in_stage("transform", [&] { return orbit(cfg.params.g(), cfg.k_schedule, seed, xs); });
  const SecondOrderODE ode = gp_rhs(cfg.params);

  json report;
  report["command"] = "transform";
  json checks = json::array();
  json elements = json::array();
  std::ostringstream os;
  os.precision(6);
  double total = 0.0;
  for (std::size_t j = 0; j < grids.size(); ++j) {
    total += cfg.k_schedule[j];
    const std::string tag = "orbit element " + std::to_string(j + 1);
    const SolutionGrid& grid = grids[j];
    const ResidualReport rep = in_stage(tag + " residual", [&] { return residual(ode, grid); });
    const FixedPointReport fp = in_stage(tag + " fixed point", [&] {
      const BacklundMap map(ShiftMap(cfg.params.g(), total), seed.domain);
      return is_fixed_point(map, seed, grid.xs, cfg.tolerances.fixed_point);
    });
    const fs::path csv = output_path(out_dir, orbit_file_name(cfg.outputs.solution_csv, j + 1));
    write_solution_csv(csv, grid);
    res.written.push_back(csv);

    const bool ok = rep.max_interior < cfg.tolerances.residual_pass;
    checks.push_back(check_json({"orbit_k" + std::to_string(j + 1) + "_residual", rep.max_interior,
                                 cfg.tolerances.residual_pass, ok, ok ? "pass" : "fail"}));
    json e{{"index", j + 1},
           {"K", total},
           {"file", csv.filename().string()},
           {"points", grid.size()},
           {"residual_max", rep.max_interior},
           {"residual_pass", ok},
           {"fixed_point", fp.fixed},
           {"fixed_point_deviation", fp.deviation}};
    if (grid.meta.trimmed) {
      e["trimmed"] = {grid.meta.trimmed->lo, grid.meta.trimmed->hi};
    }
    elements.push_back(e);
    os << "K=" << total << ": " << grid.size() << " points, residual max " << rep.max_interior
       << ", fixed point " << (fp.fixed ? "yes" : "no") << " (deviation " << fp.deviation << ")\n";
  }
  report["checks"] = checks;
  report["orbit"] = elements;
  if (!note.empty()) report["warning"] = note;
  report["params"] = config_echo(cfg);
  const fs::path js = output_path(out_dir, cfg.outputs.report_json);
  write_json(js, report);
  res.written.push_back(js);
  res.summary = os.str();
  if (!note.empty()) res.summary += "warning: " + note;
  return res;
}

CommandResult cmd_verify(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const std::vector<double> xs = cfg.abscissae();
  const std::vector<double> ks =
      cfg.k_schedule.empty() ? std::vector<double>{0.25, 0.5, 1.0} : cfg.k_schedule;
  const GPParams& p = cfg.params;
  const PolyG g = p.g();

  using Check = std::pair<std::string, std::function<CheckResult()>>;
  const std::vector<Check> suite = {
      {"schwarzian_mobius_kernel", [&] { return check_mobius_kernel(cfg.verify_seed, 100, 10); }},
      {"schwarzian_composition_law", [&] { return check_composition_law(cfg.verify_seed, 100); }},
      {"translation_property", [&] { return check_translation(g, ks, xs); }},
      {"translation_semigroup", [&] { return check_semigroup(g, ks, xs); }},
      {"q_identity", [&] { return check_q_identity(g, ks, xs); }},
      {"linear_coefficient_identity", [&] { return check_linear_coefficient(p, xs); }},
      {"closed_form_residual", [&] { return check_closed_form_residual(p, xs); }},
      {"constraint_activity", [&] { return check_constraint_activity(p, xs); }},
      {"fixed_point_closed_form",
       [&] { return check_fixed_point(p, ks, xs, cfg.tolerances.fixed_point); }},
  };

  json report;
  report["command"] = "verify";
  json checks = json::array();
  CommandResult res;
  std::ostringstream os;
  os.precision(3);
  bool all = true;
  for (const auto& [name, run] : suite) {
    try {
      const CheckResult r = run();
      checks.push_back(check_json(r));
      all = all && r.pass;
      os << (r.pass ? "PASS " : "FAIL ") << r.name << " deviation=" << r.deviation
         << " tolerance=" << r.tolerance << " [" << r.status << "]\n";
    } catch (const Error& e) {
      report["checks"] = checks;
      report["error"] = {{"stage", name}, {"kind", to_string(e.kind())}, {"message", e.what()}};
      report["params"] = config_echo(cfg);
      const fs::path js = output_path(out_dir, cfg.outputs.report_json);
      write_json(js, report);
      res.exit_code = 3;
      res.written = {js};
      os << "ERROR " << name << ": " << e.what() << '\n';
      res.summary = os.str();
      return res;
    }
  }
  report["checks"] = checks;
  report["params"] = config_echo(cfg);
  const fs::path js = output_path(out_dir, cfg.outputs.report_json);
  write_json(js, report);
  res.written = {js};
  res.exit_code = all ? 0 : 1;
  res.summary = os.str();
  return res;
}

CommandResult cmd_wavefunction(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.t_samples.empty()) throw ConfigError("wavefunction needs at least one t sample");
  CommandResult res;
  std::string note;
  const Amplitude seed = make_seed(cfg, note);
  PhaseOptions opts;
  opts.x_ref = cfg.x_ref;
  if (seed.provenance != Provenance::ClosedForm && !(opts.x_ref > 0.0)) opts.x_ref = cfg.seed.x0;
  const std::vector<double> xs = cfg.abscissae();

  const fs::path csv = output_path(out_dir, cfg.outputs.wave_csv);
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + csv.string() + " for writing");
  out << "x,t,re,im,modulus\n";
  in_stage("wavefunction", [&] {
    for (double x : xs) {
      for (double t : cfg.t_samples) {
        const WaveSample w = wavefunction(cfg.params, seed, x, t, opts);
        out << format_real(w.x) << ',' << format_real(w.t) << ',' << format_real(w.re) << ','
            << format_real(w.im) << ',' << format_real(w.modulus()) << '\n';
      }
    }
    return 0;
  });
  res.written = {csv};
  std::ostringstream os;
  os << "wavefunction: " << xs.size() << " x " << cfg.t_samples.size() << " samples";
  if (!note.empty()) os << "\nwarning: " << note;
  res.summary = os.str();
  return res;
}

}  // namespace gpbt
