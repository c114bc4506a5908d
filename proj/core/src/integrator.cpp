#include "muskat/integrator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <fmt/format.h>

#include "muskat/errors.hpp"

namespace muskat {

void SimConfig::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(dt_init) || !pos(dt_min) || !pos(dt_max)) throw ValidationError("sim: time steps must be positive");
  if (!(dt_min <= dt_init && dt_init <= dt_max)) throw ValidationError("sim: need dt_min <= dt_init <= dt_max");
  if (!pos(t_end)) throw ValidationError("sim: t_end must be positive");
  if (!pos(tolerance)) throw ValidationError("sim: tolerance must be positive");
  if (!pos(rt_min)) throw ValidationError("sim: rt_min must be positive");
  if (separation_min < 0.0) throw ValidationError("sim: separation_min must be nonnegative");
  for (double t : output_times)
    if (!(t > 0.0 && t <= t_end)) throw ValidationError("sim: output times must lie in (0, t_end]");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed:
      return "completed";
    case Termination::monitor_breach:
      return "monitor_breach";
    case Termination::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

Evolution::Evolution(const PeriodicGrid& grid, const FluidParams& params, const DomainSpec& dom,
                     const EllipticSolveConfig& ecfg, const SimConfig& cfg)
    : grid_(grid), params_(params), dom_(dom), ecfg_(ecfg), cfg_(cfg) {
  params.validate(dom);
  ecfg.validate();
  cfg.validate();
  const InterfaceOperators flat(Interface{SpectralField::zeros(grid)}, params, dom, ecfg);
  sigma_.resize(static_cast<size_t>(grid.n_modes()));
  for (int k = 0; k < grid.n_modes(); ++k) {
    const double kappa = grid.wavenumber(k);
    sigma_[static_cast<size_t>(k)] = flat.flat_L_symbol(k) *
                                     (params.reduced_gravity() + params.surface_tension * kappa * kappa) /
                                     params.mu_sum();
  }
}

double Evolution::linear_rate(int k) const { return sigma_.at(static_cast<size_t>(std::abs(k))); }

namespace {

SpectralField scale_modes(const SpectralField& f, const std::vector<double>& m) {
  std::vector<std::complex<double>> c(f.coefficients().begin(), f.coefficients().end());
  for (size_t k = 0; k < c.size(); ++k) c[k] *= m[k];
  return SpectralField::from_coefficients(f.grid(), std::move(c));
}

bool finite(const SpectralField& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

SpectralField Evolution::remainder(const InterfaceOperators& ops) const {
  const Interface& eta = ops.interface();
  if (cfg_.linear_only) return SpectralField::zeros(eta.grid());
  return evolution_rhs(ops) + scale_modes(eta.height, sigma_);
}

SpectralField Evolution::remainder(const Interface& eta) const {
  if (cfg_.linear_only) return SpectralField::zeros(eta.grid());
  return remainder(InterfaceOperators(eta, params_, dom_, ecfg_));
}

Interface Evolution::truncate(const Interface& eta) const {
  return Interface{eta.height.truncated(grid_.dealias_cutoff()), eta.regularity};
}

Interface Evolution::step(const Interface& eta, double dt, const SpectralField* n0) const {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  std::vector<double> e(sigma_.size());
  for (size_t k = 0; k < e.size(); ++k) e[k] = std::exp(-sigma_[k] * dt);
  const SpectralField& u = eta.height;
  if (cfg_.linear_only) return truncate(Interface{scale_modes(u, e), eta.regularity});
  const SpectralField n_u = n0 != nullptr ? *n0 : remainder(eta);
  const Interface a = truncate(Interface{scale_modes(u + dt * n_u, e), eta.regularity});
  const SpectralField n_a = remainder(a);
  const SpectralField next = scale_modes(u, e) + (0.5 * dt) * (scale_modes(n_u, e) + n_a);
  return truncate(Interface{next, eta.regularity});
}

double Evolution::energy(const Interface& eta) const {
  double e = 0.5 * params_.reduced_gravity() * std::pow(l2_norm(eta.height), 2);
  if (params_.surface_tension > 0.0) {
    const SpectralField arc = dealiased_map([](double s) { return japanese_bracket(s) - 1.0; }, eta.height.derivative());
    e += params_.surface_tension * arc.mean() * grid_.length();
  }
  return e;
}

std::vector<double> Evolution::norm_indices(double regularity) const {
  if (!cfg_.tracked_norms.empty()) return cfg_.tracked_norms;
  return {regularity, regularity - 1.0, regularity - 2.0};
}

Monitors Evolution::monitors(const InterfaceOperators& ops) const {
  const Interface& eta = ops.interface();
  Monitors m;
  m.inf_rt = rayleigh_taylor(ops).infimum;
  m.separation = separation(eta, dom_);
  m.energy = energy(eta);
  for (double s : norm_indices(eta.regularity)) m.norms.push_back(sobolev_norm(eta.height, s));
  return m;
}

Monitors Evolution::monitors(const Interface& eta) const {
  return monitors(InterfaceOperators(eta, params_, dom_, ecfg_));
}

TimeSeries Evolution::integrate(const Interface& eta0_in) const {
  TimeSeries ts;
  const Interface eta0 = truncate(eta0_in);
  ts.norm_indices = norm_indices(eta0.regularity);

  std::vector<double> targets = cfg_.output_times;
  targets.push_back(cfg_.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  auto breach = [&](const Monitors& m) -> std::string {
    if (!(m.inf_rt > cfg_.rt_min))
      return fmt::format("inf RT = {:.6g} <= rt_min = {:.6g}", m.inf_rt, cfg_.rt_min);
    if (!(m.separation > cfg_.separation_min))
      return fmt::format("separation = {:.6g} <= separation_min = {:.6g}", m.separation, cfg_.separation_min);
    return {};
  };

  std::unique_ptr<InterfaceOperators> ops;
  try {
    ops = std::make_unique<InterfaceOperators>(eta0, params_, dom_, ecfg_);
  } catch (const PreconditionError& e) {
    ts.status = Termination::monitor_breach;
    ts.message = e.what();
    return ts;
  }
  SimState state{0.0, eta0, monitors(*ops)};
  if (std::string why = breach(state.monitors); !why.empty()) {
    ts.status = Termination::monitor_breach;
    ts.message = "initial data: " + why;
    return ts;
  }
  ts.states.push_back(state);
  ts.dt.push_back(0.0);

  double dt = cfg_.dt_init;
  size_t next_target = 0;
  while (next_target < targets.size()) {
    const double target = targets[next_target];
    const double t = state.t;
    const double proposal = std::min(dt, cfg_.dt_max);
    double h = proposal;
    bool hits = false;
    if (t + h >= target - 1e-12 * std::max(1.0, target)) {
      h = target - t;
      hits = true;
    }

    double err = 0.0;
    Interface next{SpectralField::zeros(grid_), eta0.regularity};
    try {
      const SpectralField n0 = remainder(*ops);
      const Interface full = step(state.eta, h, &n0);
      if (cfg_.adaptive) {
        const Interface half = step(state.eta, 0.5 * h, &n0);
        const Interface two = step(half, 0.5 * h);
        const SpectralField diff = two.height - full.height;
        err = l2_norm(diff) / 3.0;
        next = truncate(Interface{two.height + (1.0 / 3.0) * diff, eta0.regularity});
      } else {
        next = full;
      }
      if (!finite(next.height) || !std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    } catch (const SolverError&) {
      err = std::numeric_limits<double>::infinity();
    } catch (const PreconditionError&) {
      err = std::numeric_limits<double>::infinity();
    }

    if (cfg_.adaptive && !(err <= cfg_.tolerance)) {
      ++ts.rejected_steps;
      const double factor = std::isfinite(err) ? std::clamp(0.9 * std::cbrt(cfg_.tolerance / err), 0.2, 1.0) : 0.25;
      dt = h * factor;
      if (dt < cfg_.dt_min) {
        ts.status = Termination::numerical_failure;
        ts.message = fmt::format("time step underflow at t = {:.6g}: dt = {:.3e} < dt_min = {:.3e} (error estimate {:.3e})",
                                 t, dt, cfg_.dt_min, err);
        return ts;
      }
      continue;
    }
    if (!std::isfinite(err)) {
      ts.status = Termination::numerical_failure;
      ts.message = fmt::format("non-finite state or failed elliptic solve at t = {:.6g} with fixed dt = {:.3e}", t, h);
      return ts;
    }

    SimState candidate{hits ? target : t + h, next, {}};
    try {
      ops = std::make_unique<InterfaceOperators>(candidate.eta, params_, dom_, ecfg_);
      candidate.monitors = monitors(*ops);
    } catch (const PreconditionError& e) {
      ts.status = Termination::monitor_breach;
      ts.message = fmt::format("t = {:.6g}: {}", candidate.t, e.what());
      return ts;
    } catch (const SolverError& e) {
      ts.status = Termination::numerical_failure;
      ts.message = fmt::format("t = {:.6g}: {}", candidate.t, e.what());
      return ts;
    }
    if (std::string why = breach(candidate.monitors); !why.empty()) {
      ts.status = Termination::monitor_breach;
      ts.message = fmt::format("t = {:.6g}: {}", candidate.t, why);
      return ts;
    }
    state = std::move(candidate);
    ts.states.push_back(state);
    ts.dt.push_back(h);
    if (hits) ++next_target;
    if (cfg_.adaptive) {
      const double factor = err > 0.0 ? std::clamp(0.9 * std::cbrt(cfg_.tolerance / err), 0.2, 2.0) : 2.0;
      dt = std::min(cfg_.dt_max, std::max(h, hits ? proposal : h) * factor);
    }
  }
  ts.status = Termination::completed;
  return ts;
}

SimState imex_step(const SimState& state, double dt, const FluidParams& params, const DomainSpec& dom,
                   const EllipticSolveConfig& ecfg, const SimConfig& cfg) {
  const Evolution ev(state.eta.grid(), params, dom, ecfg, cfg);
  SimState out{state.t + dt, ev.step(state.eta, dt), {}};
  out.monitors = ev.monitors(out.eta);
  if (!(out.monitors.inf_rt > cfg.rt_min) || !(out.monitors.separation > cfg.separation_min))
    throw MonitorBreach(fmt::format("step rejected: inf RT = {:.6g}, separation = {:.6g}", out.monitors.inf_rt,
                                    out.monitors.separation));
  return out;
}

TimeSeries integrate(const Interface& eta0, const FluidParams& params, const DomainSpec& dom,
                     const EllipticSolveConfig& ecfg, const SimConfig& cfg) {
  return Evolution(eta0.grid(), params, dom, ecfg, cfg).integrate(eta0);
}

void write_time_series_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t,dt,inf_RT,separation,energy";
  for (double s : series.norm_indices) out << fmt::format(",norm_H{:g}", s);
  out << '\n';
  for (size_t i = 0; i < series.states.size(); ++i) {
    const SimState& st = series.states[i];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", st.t, series.dt[i], st.monitors.inf_rt,
                       st.monitors.separation, st.monitors.energy);
    for (double v : st.monitors.norms) out << fmt::format(",{:.17g}", v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), 8);
  if (!in) throw ValidationError("snapshot: truncated file");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_snapshot(const SimState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const PeriodicGrid& g = state.eta.grid();
  put_le<std::int64_t>(out, g.size());
  put_le<double>(out, g.length());
  put_le<double>(out, state.t);
  for (const auto& c : state.eta.height.coefficients()) {
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SimState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  const auto n = get_le<std::int64_t>(in);
  const double length = get_le<double>(in);
  const double t = get_le<double>(in);
  if (n < 8 || n % 2 != 0 || n > (1 << 24)) throw ValidationError("snapshot: bad n_points");
  const PeriodicGrid grid(static_cast<int>(n), length);
  std::vector<std::complex<double>> c(static_cast<size_t>(grid.n_modes()));
  for (auto& x : c) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    x = {re, im};
  }
  return SimState{t, Interface{SpectralField::from_coefficients(grid, std::move(c))}, {}};
}

}  // namespace muskat
