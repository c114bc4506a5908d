#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "muskat/dynamics.hpp"

namespace muskat {

struct SimConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-10;
  double dt_max = 2e-2;
  double t_end = 0.05;
  /// Local error tolerance (L^2 norm of the step-doubling estimate).
  double tolerance = 1e-6;
  /// false: fixed steps of dt_init without error control.
  bool adaptive = true;
  /// Stop when inf RT <= rt_min (the a_min monitor).
  double rt_min = 0.05;
  /// Stop when the distance to a rigid wall drops to separation_min.
  double separation_min = 0.0;
  /// Sobolev indices monitored at each step; empty means s, s-1, s-2.
  std::vector<double> tracked_norms;
  /// Times the integrator must land on exactly (t_end is always included).
  std::vector<double> output_times;
  /// Drop the nonlinear remainder: only the flat linear flow is integrated.
  bool linear_only = false;

  void validate() const;
};

struct Monitors {
  double inf_rt = 1.0;
  double separation = 0.0;
  double energy = 0.0;
  std::vector<double> norms;
};

struct SimState {
  double t = 0.0;
  Interface eta;
  Monitors monitors;
};

enum class Termination { completed, monitor_breach, numerical_failure };
const char* to_string(Termination t);

struct TimeSeries {
  std::vector<SimState> states;
  /// dt[i] is the step that produced states[i] (0 for the initial state).
  std::vector<double> dt;
  std::vector<double> norm_indices;
  Termination status = Termination::completed;
  std::string message;
  int rejected_steps = 0;
};

/// Integrating-factor Heun scheme with the flat linear symbol
///   sigma(k) = L_0(k) (g + s kappa^2) / (mu^+ + mu^-)
/// integrated exactly and the remainder N(eta) = rhs(eta) + sigma eta
/// treated explicitly:
///   a = E (u + dt N(u)),  u' = E u + dt/2 (E N(u) + N(a)),  E = exp(-sigma dt).
class Evolution {
 public:
  Evolution(const PeriodicGrid& grid, const FluidParams& params, const DomainSpec& dom,
            const EllipticSolveConfig& ecfg, const SimConfig& cfg);

  double linear_rate(int k) const;
  const FluidParams& params() const { return params_; }
  const SimConfig& config() const { return cfg_; }

  /// N(eta); zero when linear_only.
  SpectralField remainder(const Interface& eta) const;
  SpectralField remainder(const InterfaceOperators& ops) const;
  /// One step; `n0` is N(eta) if already known.
  Interface step(const Interface& eta, double dt, const SpectralField* n0 = nullptr) const;

  Monitors monitors(const Interface& eta) const;
  double energy(const Interface& eta) const;
  std::vector<double> norm_indices(double regularity) const;

  TimeSeries integrate(const Interface& eta0) const;

 private:
  Monitors monitors(const InterfaceOperators& ops) const;
  Interface truncate(const Interface& eta) const;

  PeriodicGrid grid_;
  FluidParams params_;
  DomainSpec dom_;
  EllipticSolveConfig ecfg_;
  SimConfig cfg_;
  std::vector<double> sigma_;
};

SimState imex_step(const SimState& state, double dt, const FluidParams& params, const DomainSpec& dom,
                   const EllipticSolveConfig& ecfg, const SimConfig& cfg);

TimeSeries integrate(const Interface& eta0, const FluidParams& params, const DomainSpec& dom,
                     const EllipticSolveConfig& ecfg, const SimConfig& cfg);

/// One CSV row per state: t, dt, inf_RT, separation, energy, norm_H<sigma>...
void write_time_series_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Binary snapshot: int64 n_points, float64 length, float64 t, then n/2+1
/// (re, im) float64 pairs, all little-endian.
void write_snapshot(const SimState& state, const std::filesystem::path& path);
SimState read_snapshot(const std::filesystem::path& path);

}  // namespace muskat
