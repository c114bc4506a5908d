#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "muskat/errors.hpp"
#include "muskat/harness.hpp"
#include "muskat/paracalc.hpp"
#include "muskat/suites.hpp"

namespace fs = std::filesystem;
using namespace muskat;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kValidation = 2, kBreach = 3, kNumerical = 4 };

int report_checks(const std::vector<CheckResult>& checks) {
  bool ok = true;
  for (const CheckResult& c : checks) {
    std::cout << format_check(c) << '\n';
    ok = ok && c.passed;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_run(const fs::path& config, const fs::path& out_opt) {
  const RunConfig cfg = parse_config(config);
  const fs::path out = out_opt.empty() ? cfg.output_dir : out_opt;
  fs::create_directories(out);
  const Interface eta0 = cfg.initial.build(cfg.grid());
  const TimeSeries ts = Evolution(cfg.grid(), cfg.fluid, cfg.domain, cfg.elliptic, cfg.resolved_sim()).integrate(eta0);
  write_time_series_csv(ts, out / "series.csv");
  if (cfg.write_snapshots) {
    const SimConfig sim = cfg.resolved_sim();
    for (const SimState& st : ts.states) {
      bool forced = st.t == sim.t_end || st.t == 0.0;
      for (double t : sim.output_times) forced = forced || st.t == t;
      if (forced) write_snapshot(st, out / fmt::format("snapshot_t{:.6f}.bin", st.t));
    }
  }
  fmt::print("{} after {} accepted steps ({} rejected), t = {:.6g}\n", to_string(ts.status),
             ts.states.empty() ? 0 : ts.states.size() - 1, ts.rejected_steps, ts.states.empty() ? 0.0 : ts.states.back().t);
  if (!ts.message.empty()) fmt::print("{}\n", ts.message);
  switch (ts.status) {
    case Termination::completed:
      return kOk;
    case Termination::monitor_breach:
      return kBreach;
    case Termination::numerical_failure:
      return kNumerical;
  }
  return kNumerical;
}

int cmd_sweep(const fs::path& config, const fs::path& out_opt, int threads) {
  const RunConfig cfg = parse_config(config);
  const fs::path out = out_opt.empty() ? cfg.output_dir : out_opt;
  const ConvergenceReport rep = run_convergence_sweep(cfg, threads);
  emit_report(rep, out);
  for (const SweepRow& r : rep.rows)
    fmt::print("s = {:<12.6g} sup H^(s-1) {:.4e}  sup H^(s-2) {:.4e}  {}\n", r.s_coeff, r.sup_Hsm1, r.sup_Hsm2, r.status);
  for (const auto& [name, f] : rep.fits)
    fmt::print("order {:<14} {:8.4f}  95% [{:.4f}, {:.4f}]{}\n", name, f.slope, f.slope_low, f.slope_high,
               f.degenerate ? " (" + f.reason + ")" : "");
  fmt::print("knee at s = {:g}; wrote {}\n", rep.knee, (out / "sweep.csv").string());
  return kOk;
}

int cmd_para(std::uint64_t seed, const fs::path& out) {
  const int code = report_checks(paracalc_suite(seed));
  if (!out.empty()) {
    fs::create_directories(out);
    const PeriodicGrid grid(256);
    EllipticSolveConfig cfg;
    cfg.n_z = 128;
    const Interface eta{SpectralField::from_function(grid, [](double x) { return 0.1 * std::cos(x); })};
    const DNOperator op(eta, Side::lower, DomainSpec{}, cfg);
    const auto probes = default_probes();
    const ParalinResult res = paralin_residual_dn(op, SpectralField::from_function(grid, [](double x) { return std::cos(16 * x); }), probes);
    write_residual_csv(res.fit, out / "paralin_dn.csv");
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"muskat: pseudospectral Muskat simulator and operator laboratory"};
  app.require_subcommand(1);
  fs::path config, out;
  int threads = 1;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "single simulation");
  run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (default: output.dir)");

  auto* sweep = app.add_subcommand("sweep", "convergence study in the surface tension");
  sweep->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "output directory (default: output.dir)");
  sweep->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));

  auto* dn = app.add_subcommand("dn-test", "elliptic operator suite");
  dn->add_option("--seed", seed, "random seed");
  auto* para = app.add_subcommand("para-test", "paradifferential calculus suite");
  para->add_option("--seed", seed, "random seed");
  para->add_option("--out", out, "directory for paralin_dn.csv");
  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*sweep) return cmd_sweep(config, out, threads);
    if (*dn) return report_checks(dn_suite(seed));
    if (*para) return cmd_para(seed, out);
    std::cout << "muskat " << MUSKAT_VERSION << '\n';
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const MonitorBreach& e) {
    std::cerr << "monitor breach: " << e.what() << '\n';
    return kBreach;
  } catch (const PreconditionError& e) {
    std::cerr << "monitor breach: " << e.what() << '\n';
    return kBreach;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
