#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "muskat/integrator.hpp"
#include "muskat/stats.hpp"

namespace muskat {

/// Initial interface: sum of amp * cos(k x) and amp * sin(k x) terms.
struct InitialCondition {
  struct Term {
    bool sine = false;
    int k = 1;
    double amplitude = 0.0;
  };
  std::string preset;  // informational
  std::vector<Term> terms;
  double regularity = 3.0;

  Interface build(const PeriodicGrid& grid) const;
  std::string describe() const;
  /// "headline" (0.1 cos x + 0.02 cos 3x), "single" (0.1 cos x), "flat".
  static InitialCondition from_preset(const std::string& name);
  /// Comma-separated list of cos:K:AMP / sin:K:AMP.
  static InitialCondition parse(const std::string& text);
};

struct RunConfig {
  bool two_phase = false;
  FluidParams fluid;
  DomainSpec domain;
  int n_points = 256;
  double length = 2.0 * 3.14159265358979323846;
  EllipticSolveConfig elliptic;
  SimConfig sim;
  /// Sim tolerance is tolerance_factor * min(sweep) when set from the sweep.
  bool tolerance_from_sweep = true;
  double tolerance_factor = 1e-3;
  InitialCondition initial = InitialCondition::from_preset("headline");
  /// Strictly decreasing positive surface tensions; the s = 0 reference is implicit.
  std::vector<double> sweep;
  std::filesystem::path output_dir = "out";
  bool write_snapshots = false;

  void validate() const;
  PeriodicGrid grid() const { return PeriodicGrid(n_points, length); }
  /// Simulation settings actually used for runs (tolerance resolved).
  SimConfig resolved_sim() const;
  std::map<std::string, std::string> echo() const;
};

/// INI-style text: [section] headers, key = value lines, '#' or ';' comments.
/// Unknown sections or keys, missing required keys (scenario.kind,
/// fluid.mu_minus, fluid.rho_minus, fluid.g) and invalid values raise
/// ValidationError with the line number.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::filesystem::path& path);

struct SweepRow {
  double s_coeff = 0.0;
  double sup_Hsm1 = 0.0;
  double l2t_Hsmhalf = 0.0;
  double sup_Hsm2 = 0.0;
  double l2t_Hsm3half = 0.0;
  bool completed = false;
  /// sup in time of the H^{s-3/2} difference (between the two endpoint norms).
  double sup_Hsm3half = 0.0;
  /// sqrt(s) * ||eta_s||_{L^2_t H^{s+3/2}}.
  double uniform_proxy = 0.0;
  std::string status;
};

struct ConvergenceReport {
  std::vector<SweepRow> rows;
  std::map<std::string, LinearFit> fits;
  /// Largest s below which sup_Hsm2 is nonincreasing as s decreases.
  double knee = 0.0;
  int reference_steps = 0;
  double regularity = 3.0;
  std::map<std::string, std::string> config;
};

/// Runs the s = 0 reference then every sweep value (in a pool of `threads`
/// workers) and compares them at the reference's accepted times.
/// Throws MonitorBreach / NumericalFailure when the reference run fails.
ConvergenceReport run_convergence_sweep(const RunConfig& cfg, int threads = 1);

/// Writes sweep.csv and fit.json into dir (created if needed).
void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir);
/// Header of sweep.csv.
inline constexpr const char* kSweepHeader = "s_coeff,sup_Hsm1,l2t_Hsmhalf,sup_Hsm2,l2t_Hsm3half,completed";
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

}  // namespace muskat
