#include "muskat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "muskat/errors.hpp"

namespace muskat {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& v) {
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("expected a number, got '{}'", v));
  }
  if (used != v.size()) throw ValidationError(fmt::format("expected a number, got '{}'", v));
  return x;
}

int to_int(const std::string& v) {
  const double x = to_double(v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ValidationError(fmt::format("expected an integer, got '{}'", v));
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ValidationError(fmt::format("expected a boolean, got '{}'", v));
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  for (const std::string& item : split(v, ',')) out.push_back(to_double(item));
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{:.17g}", v[i]);
  return s;
}

std::string wall_name(WallKind k) {
  switch (k) {
    case WallKind::flat:
      return "flat";
    case WallKind::infinite:
      return "infinite";
    case WallKind::vacuum:
      return "vacuum";
  }
  return "?";
}

WallKind to_wall(const std::string& v) {
  if (v == "flat") return WallKind::flat;
  if (v == "infinite") return WallKind::infinite;
  if (v == "vacuum") return WallKind::vacuum;
  throw ValidationError(fmt::format("expected flat, infinite or vacuum, got '{}'", v));
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f2) {
  double acc = 0.0;
  for (size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (f2[i] + f2[i - 1]);
  return std::sqrt(acc);
}

}  // namespace

Interface InitialCondition::build(const PeriodicGrid& grid) const {
  std::vector<SpectralField::Complex> c(static_cast<size_t>(grid.n_modes()));
  for (const Term& t : terms) {
    if (t.k < 1 || t.k >= grid.n_modes() - 1)
      throw ValidationError(fmt::format("initial: mode {} not resolved on {} points", t.k, grid.size()));
    c[static_cast<size_t>(t.k)] += t.sine ? SpectralField::Complex(0.0, -0.5 * t.amplitude)
                                          : SpectralField::Complex(0.5 * t.amplitude, 0.0);
  }
  return Interface{SpectralField::from_coefficients(grid, std::move(c)), regularity};
}

std::string InitialCondition::describe() const {
  std::string s;
  for (size_t i = 0; i < terms.size(); ++i)
    s += fmt::format("{}{}:{}:{:g}", i ? "," : "", terms[i].sine ? "sin" : "cos", terms[i].k, terms[i].amplitude);
  return s.empty() ? "flat" : s;
}

InitialCondition InitialCondition::from_preset(const std::string& name) {
  InitialCondition ic;
  ic.preset = name;
  if (name == "headline") {
    ic.terms = {{false, 1, 0.1}, {false, 3, 0.02}};
  } else if (name == "single") {
    ic.terms = {{false, 1, 0.1}};
  } else if (name != "flat") {
    throw ValidationError(fmt::format("unknown initial preset '{}'", name));
  }
  return ic;
}

InitialCondition InitialCondition::parse(const std::string& text) {
  const std::string t = trim(text);
  if (t == "headline" || t == "single" || t == "flat") return from_preset(t);
  InitialCondition ic;
  ic.preset = "custom";
  for (const std::string& item : split(t, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3 || (parts[0] != "cos" && parts[0] != "sin"))
      throw ValidationError(fmt::format("initial term '{}' is not cos:K:AMP or sin:K:AMP", item));
    ic.terms.push_back({parts[0] == "sin", to_int(parts[1]), to_double(parts[2])});
  }
  return ic;
}

void RunConfig::validate() const {
  fluid.validate(domain);
  if (two_phase == fluid.one_phase())
    throw ValidationError(two_phase ? "scenario.kind = two_phase requires fluid.mu_plus > 0"
                                    : "scenario.kind = one_phase requires fluid.mu_plus = 0");
  if (n_points < 8 || n_points % 2 != 0) throw ValidationError("grid.n_points must be even and >= 8");
  if (!(length > 0.0)) throw ValidationError("grid.length must be positive");
  elliptic.validate();
  resolved_sim().validate();
  if (!(tolerance_factor > 0.0)) throw ValidationError("time.tolerance_factor must be positive");
  for (size_t i = 0; i < sweep.size(); ++i) {
    if (!(sweep[i] > 0.0)) throw ValidationError("sweep.surface_tension values must be positive");
    if (i > 0 && !(sweep[i] < sweep[i - 1]))
      throw ValidationError("sweep.surface_tension must be strictly decreasing");
  }
  const Interface eta = initial.build(grid());
  require_separation(eta, domain);
}

SimConfig RunConfig::resolved_sim() const {
  SimConfig s = sim;
  if (tolerance_from_sweep && !sweep.empty()) s.tolerance = tolerance_factor * sweep.back();
  return s;
}

std::map<std::string, std::string> RunConfig::echo() const {
  const SimConfig s = resolved_sim();
  return {
      {"scenario.kind", two_phase ? "two_phase" : "one_phase"},
      {"scenario.initial", initial.describe()},
      {"scenario.regularity", fmt::format("{:g}", initial.regularity)},
      {"fluid.mu_minus", fmt::format("{:.17g}", fluid.mu_minus)},
      {"fluid.mu_plus", fmt::format("{:.17g}", fluid.mu_plus)},
      {"fluid.rho_minus", fmt::format("{:.17g}", fluid.rho_minus)},
      {"fluid.rho_plus", fmt::format("{:.17g}", fluid.rho_plus)},
      {"fluid.g", fmt::format("{:.17g}", fluid.g)},
      {"fluid.surface_tension", fmt::format("{:.17g}", fluid.surface_tension)},
      {"domain.bottom", wall_name(domain.bottom.kind)},
      {"domain.bottom_depth", fmt::format("{:.17g}", domain.bottom.distance)},
      {"domain.top", wall_name(domain.top.kind)},
      {"domain.top_height", fmt::format("{:.17g}", domain.top.distance)},
      {"domain.separation", fmt::format("{:.17g}", domain.separation)},
      {"grid.n_points", std::to_string(n_points)},
      {"grid.length", fmt::format("{:.17g}", length)},
      {"elliptic.n_z", std::to_string(elliptic.n_z)},
      {"elliptic.tolerance", fmt::format("{:.17g}", elliptic.tolerance)},
      {"time.t_end", fmt::format("{:.17g}", s.t_end)},
      {"time.tolerance", fmt::format("{:.17g}", s.tolerance)},
      {"time.dt_max", fmt::format("{:.17g}", s.dt_max)},
      {"time.adaptive", s.adaptive ? "true" : "false"},
      {"time.linear_only", s.linear_only ? "true" : "false"},
      {"sweep.surface_tension", fmt_list(sweep)},
  };
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"scenario.kind",
       [&](const std::string& v) {
         if (v == "one_phase") cfg.two_phase = false;
         else if (v == "two_phase") cfg.two_phase = true;
         else throw ValidationError(fmt::format("expected one_phase or two_phase, got '{}'", v));
       }},
      {"scenario.initial",
       [&](const std::string& v) {
         const double r = cfg.initial.regularity;
         cfg.initial = InitialCondition::parse(v);
         cfg.initial.regularity = r;
       }},
      {"scenario.regularity", [&](const std::string& v) { cfg.initial.regularity = to_double(v); }},
      {"fluid.mu_minus", [&](const std::string& v) { cfg.fluid.mu_minus = to_double(v); }},
      {"fluid.mu_plus", [&](const std::string& v) { cfg.fluid.mu_plus = to_double(v); }},
      {"fluid.rho_minus", [&](const std::string& v) { cfg.fluid.rho_minus = to_double(v); }},
      {"fluid.rho_plus", [&](const std::string& v) { cfg.fluid.rho_plus = to_double(v); }},
      {"fluid.g", [&](const std::string& v) { cfg.fluid.g = to_double(v); }},
      {"fluid.surface_tension", [&](const std::string& v) { cfg.fluid.surface_tension = to_double(v); }},
      {"domain.bottom", [&](const std::string& v) { cfg.domain.bottom.kind = to_wall(v); }},
      {"domain.bottom_depth", [&](const std::string& v) { cfg.domain.bottom.distance = to_double(v); }},
      {"domain.top", [&](const std::string& v) { cfg.domain.top.kind = to_wall(v); }},
      {"domain.top_height", [&](const std::string& v) { cfg.domain.top.distance = to_double(v); }},
      {"domain.separation", [&](const std::string& v) { cfg.domain.separation = to_double(v); }},
      {"domain.artificial_depth_factor",
       [&](const std::string& v) { cfg.domain.artificial_depth_factor = to_double(v); }},
      {"grid.n_points", [&](const std::string& v) { cfg.n_points = to_int(v); }},
      {"grid.length", [&](const std::string& v) { cfg.length = to_double(v); }},
      {"elliptic.n_z", [&](const std::string& v) { cfg.elliptic.n_z = to_int(v); }},
      {"elliptic.tolerance", [&](const std::string& v) { cfg.elliptic.tolerance = to_double(v); }},
      {"elliptic.max_iterations", [&](const std::string& v) { cfg.elliptic.max_iterations = to_int(v); }},
      {"elliptic.flat_preconditioner", [&](const std::string& v) { cfg.elliptic.flat_preconditioner = to_bool(v); }},
      {"elliptic.surface_scale", [&](const std::string& v) { cfg.elliptic.surface_scale = to_double(v); }},
      {"time.dt_init", [&](const std::string& v) { cfg.sim.dt_init = to_double(v); }},
      {"time.dt_min", [&](const std::string& v) { cfg.sim.dt_min = to_double(v); }},
      {"time.dt_max", [&](const std::string& v) { cfg.sim.dt_max = to_double(v); }},
      {"time.t_end", [&](const std::string& v) { cfg.sim.t_end = to_double(v); }},
      {"time.tolerance",
       [&](const std::string& v) {
         if (v == "auto") {
           cfg.tolerance_from_sweep = true;
         } else {
           cfg.sim.tolerance = to_double(v);
           cfg.tolerance_from_sweep = false;
         }
       }},
      {"time.tolerance_factor", [&](const std::string& v) { cfg.tolerance_factor = to_double(v); }},
      {"time.adaptive", [&](const std::string& v) { cfg.sim.adaptive = to_bool(v); }},
      {"time.rt_min", [&](const std::string& v) { cfg.sim.rt_min = to_double(v); }},
      {"time.separation_min", [&](const std::string& v) { cfg.sim.separation_min = to_double(v); }},
      {"time.linear_only", [&](const std::string& v) { cfg.sim.linear_only = to_bool(v); }},
      {"time.output_times", [&](const std::string& v) { cfg.sim.output_times = to_list(v); }},
      {"time.tracked_norms", [&](const std::string& v) { cfg.sim.tracked_norms = to_list(v); }},
      {"sweep.surface_tension", [&](const std::string& v) { cfg.sweep = to_list(v); }},
      {"output.dir", [&](const std::string& v) { cfg.output_dir = v; }},
      {"output.snapshots", [&](const std::string& v) { cfg.write_snapshots = to_bool(v); }},
  };

  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto where = [&](const std::string& msg) {
      return ValidationError(fmt::format("{}:{}: {}", origin, line_no, msg));
    };
    std::string line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw where("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"scenario", "fluid", "domain", "grid", "elliptic", "time", "sweep", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        throw where(fmt::format("unknown section [{}]", section));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw where("expected key = value");
    if (section.empty()) throw where("key outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw where(fmt::format("unknown key '{}'", key));
    if (seen.count(key)) throw where(fmt::format("duplicate key '{}' (first on line {})", key, seen[key]));
    seen[key] = line_no;
    try {
      it->second(value);
    } catch (const ValidationError& e) {
      throw where(fmt::format("{}: {}", key, e.what()));
    }
  }
  for (const char* req : {"scenario.kind", "fluid.mu_minus", "fluid.rho_minus", "fluid.g"})
    if (!seen.count(req)) throw ValidationError(fmt::format("{}: missing required key '{}'", origin, req));
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", origin, e.what()));
  } catch (const PreconditionError& e) {
    throw ValidationError(fmt::format("{}: initial data: {}", origin, e.what()));
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ConvergenceReport run_convergence_sweep(const RunConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.sweep.empty()) throw ValidationError("sweep.surface_tension is empty");
  const PeriodicGrid grid = cfg.grid();
  const Interface eta0 = cfg.initial.build(grid);
  const double s = eta0.regularity;

  SimConfig sim = cfg.resolved_sim();
  const double t_end = sim.t_end;
  for (double q : {0.25, 0.5, 0.75, 1.0}) sim.output_times.push_back(q * t_end);

  FluidParams ref_params = cfg.fluid;
  ref_params.surface_tension = 0.0;
  const TimeSeries ref = Evolution(grid, ref_params, cfg.domain, cfg.elliptic, sim).integrate(eta0);
  if (ref.status == Termination::monitor_breach)
    throw MonitorBreach("reference run (surface tension 0): " + ref.message);
  if (ref.status == Termination::numerical_failure)
    throw NumericalFailure("reference run (surface tension 0): " + ref.message);

  std::vector<double> times;
  for (const SimState& st : ref.states)
    if (st.t > 0.0) times.push_back(st.t);
  SimConfig run_sim = sim;
  run_sim.output_times = times;

  ConvergenceReport report;
  report.reference_steps = static_cast<int>(ref.states.size()) - 1;
  report.regularity = s;
  report.config = cfg.echo();
  report.rows.resize(cfg.sweep.size());

  auto run_one = [&](size_t idx) {
    SweepRow& row = report.rows[idx];
    row.s_coeff = cfg.sweep[idx];
    FluidParams p = cfg.fluid;
    p.surface_tension = row.s_coeff;
    TimeSeries ts;
    try {
      ts = Evolution(grid, p, cfg.domain, cfg.elliptic, run_sim).integrate(eta0);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
      return;
    }
    row.status = to_string(ts.status);
    if (!ts.message.empty()) row.status += ": " + ts.message;

    std::vector<double> tt, d1, d12, d2, d32, d32sup;
    size_t j = 0;
    for (const SimState& r : ref.states) {
      while (j < ts.states.size() && ts.states[j].t < r.t - 1e-12 * std::max(1.0, r.t)) ++j;
      if (j == ts.states.size() || std::abs(ts.states[j].t - r.t) > 1e-12 * std::max(1.0, r.t)) break;
      const SpectralField diff = ts.states[j].eta.height - r.eta.height;
      tt.push_back(r.t);
      d1.push_back(sobolev_norm(diff, s - 1.0));
      d12.push_back(std::pow(sobolev_norm(diff, s - 0.5), 2));
      d2.push_back(sobolev_norm(diff, s - 2.0));
      d32.push_back(std::pow(sobolev_norm(diff, s - 1.5), 2));
      d32sup.push_back(sobolev_norm(diff, s - 1.5));
    }
    const auto sup = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    row.sup_Hsm1 = sup(d1);
    row.sup_Hsm2 = sup(d2);
    row.sup_Hsm3half = sup(d32sup);
    row.l2t_Hsmhalf = trapezoid(tt, d12);
    row.l2t_Hsm3half = trapezoid(tt, d32);
    row.completed = ts.status == Termination::completed && tt.size() == ref.states.size();

    std::vector<double> ot, on;
    for (const SimState& st : ts.states) {
      ot.push_back(st.t);
      on.push_back(std::pow(sobolev_norm(st.eta.height, s + 1.5), 2));
    }
    row.uniform_proxy = std::sqrt(row.s_coeff) * trapezoid(ot, on);
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cfg.sweep.size())));
  if (workers == 1) {
    for (size_t i = 0; i < cfg.sweep.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i = next++; i < cfg.sweep.size(); i = next++) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  const auto fit_column = [&](double SweepRow::*col) {
    std::vector<std::pair<double, double>> pairs;
    for (const SweepRow& r : report.rows)
      if (r.completed) pairs.emplace_back(r.s_coeff, r.*col);
    return fit_rate(pairs);
  };
  report.fits["sup_Hsm1"] = fit_column(&SweepRow::sup_Hsm1);
  report.fits["l2t_Hsmhalf"] = fit_column(&SweepRow::l2t_Hsmhalf);
  report.fits["sup_Hsm2"] = fit_column(&SweepRow::sup_Hsm2);
  report.fits["l2t_Hsm3half"] = fit_column(&SweepRow::l2t_Hsm3half);
  report.fits["sup_Hsm3half"] = fit_column(&SweepRow::sup_Hsm3half);
  report.fits["uniform_proxy"] = fit_column(&SweepRow::uniform_proxy);

  // rows are ordered by decreasing s
  if (report.rows.empty()) return report;
  size_t knee = report.rows.size() - 1;
  while (knee > 0 && report.rows[knee - 1].completed && report.rows[knee - 1].sup_Hsm2 >= report.rows[knee].sup_Hsm2)
    --knee;
  report.knee = report.rows[knee].s_coeff;
  return report;
}

void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "sweep.csv");
    if (!out) throw std::runtime_error("cannot write " + (dir / "sweep.csv").string());
    out << kSweepHeader << '\n';
    for (const SweepRow& r : report.rows)
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.s_coeff, r.sup_Hsm1, r.l2t_Hsmhalf,
                         r.sup_Hsm2, r.l2t_Hsm3half, r.completed ? 1 : 0);
  }
  nlohmann::json j;
  for (const auto& [name, f] : report.fits) {
    nlohmann::json jf = {{"order", f.slope},       {"intercept", f.intercept}, {"ci95_low", f.slope_low},
                         {"ci95_high", f.slope_high}, {"stderr", f.slope_stderr}, {"points", f.points},
                         {"degenerate", f.degenerate}};
    if (f.degenerate) jf["reason"] = f.reason;
    j["fits"][name] = jf;
  }
  double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
  for (const SweepRow& r : report.rows) {
    j["rows"].push_back({{"s_coeff", r.s_coeff},
                         {"sup_Hsm3half", r.sup_Hsm3half},
                         {"uniform_proxy", r.uniform_proxy},
                         {"completed", r.completed},
                         {"status", r.status}});
    if (r.completed) {
      pmin = std::min(pmin, r.uniform_proxy);
      pmax = std::max(pmax, r.uniform_proxy);
    }
  }
  j["uniform_proxy_ratio"] = pmax > 0.0 ? pmax / pmin : 0.0;
  j["knee"] = report.knee;
  j["reference_steps"] = report.reference_steps;
  j["regularity"] = report.regularity;
  j["config"] = report.config;
  std::ofstream out(dir / "fit.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "fit.json").string());
  out << j.dump(2) << '\n';
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSweepHeader)
    throw ValidationError(path.string() + ": unexpected header");
  std::vector<SweepRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) throw ValidationError(fmt::format("{}:{}: expected 6 columns", path.string(), line_no));
    SweepRow r;
    r.s_coeff = to_double(cols[0]);
    r.sup_Hsm1 = to_double(cols[1]);
    r.l2t_Hsmhalf = to_double(cols[2]);
    r.sup_Hsm2 = to_double(cols[3]);
    r.l2t_Hsm3half = to_double(cols[4]);
    r.completed = to_bool(cols[5]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace muskat
