#include "muskat/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "muskat/errors.hpp"
#include "muskat/integrator.hpp"
#include "muskat/paracalc.hpp"

namespace muskat {

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

/// Random real trigonometric polynomial, modes 1..kmax, coefficients ~ k^-decay.
SpectralField random_field(const PeriodicGrid& grid, std::mt19937_64& rng, int kmax, double decay) {
  std::normal_distribution<double> normal;
  std::vector<SpectralField::Complex> c(static_cast<size_t>(grid.n_modes()));
  for (int k = 1; k <= kmax; ++k) c[static_cast<size_t>(k)] = {normal(rng) * std::pow(k, -decay), normal(rng) * std::pow(k, -decay)};
  return SpectralField::from_coefficients(grid, std::move(c));
}

SpectralField scaled_to_sup(const SpectralField& f, double sup) { return (sup / f.max_abs()) * f; }

}  // namespace

std::string format_check(const CheckResult& r) {
  return fmt::format("{} {}: measured={:.6g} threshold={:.6g} time={:.2f}s{}{}", r.passed ? "PASS" : "FAIL", r.name,
                     r.measured, r.threshold, r.seconds, r.detail.empty() ? "" : " ", r.detail);
}

CheckResult check_flat_dn_exactness() {
  return timed("flat_dn_exactness", [](CheckResult& r) {
    const PeriodicGrid grid(256);
    DomainSpec dom;
    dom.bottom = Wall::flat(1.0);
    EllipticSolveConfig cfg;
    cfg.n_z = 128;
    const Interface eta{SpectralField::zeros(grid)};
    const DNOperator op(eta, Side::lower, dom, cfg);
    double worst = 0.0;
    int worst_k = 0;
    for (int k = 1; k <= 8; ++k) {
      const SpectralField f = SpectralField::from_function(grid, [k](double x) { return std::cos(k * x); });
      const SpectralField g = dn_apply(op, f);
      const double exact = k * std::tanh(k);
      const double rel = l2_norm(g - exact * f) / (exact * l2_norm(f));
      if (rel > worst) {
        worst = rel;
        worst_k = k;
      }
    }
    r.measured = worst;
    r.threshold = 2.5e-4;
    r.passed = worst <= r.threshold;
    r.detail = fmt::format("worst relative error at k = {}", worst_k);
  });
}

CheckResult check_operator_structure(std::uint64_t seed, int pairs) {
  return timed("operator_structure", [&](CheckResult& r) {
    const PeriodicGrid grid(128);
    EllipticSolveConfig cfg;
    cfg.n_z = 64;
    const double tol = cfg.tolerance;
    FluidParams two;
    two.mu_minus = 1.0;
    two.mu_plus = 0.5;
    two.rho_minus = 1.0;
    two.rho_plus = 0.5;
    DomainSpec dom;
    dom.bottom = Wall::flat(2.0);
    dom.top = Wall::flat(1.5);
    dom.separation = 0.1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.02, 0.2);

    auto h_half = [](const SpectralField& f) { return sobolev_norm(f, 0.5); };
    double worst = 0.0;  // in units of tol
    std::string where;
    auto record = [&](double defect, const char* what, int i) {
      if (defect / tol > worst) {
        worst = defect / tol;
        where = fmt::format("{} (pair {})", what, i);
      }
    };
    for (int i = 0; i < pairs; ++i) {
      const Interface eta{scaled_to_sup(random_field(grid, rng, 6, 1.0), amp(rng))};
      SpectralField f = random_field(grid, rng, 12, 1.5);
      SpectralField g = random_field(grid, rng, 12, 1.5);
      const double nf = h_half(f), ng = h_half(g);
      const InterfaceOperators ops(eta, two, dom, cfg);
      const DNOperator& gm = ops.lower();
      const DNOperator& gp = *ops.upper();
      const SpectralField gmf = gm.apply(f), gmg = gm.apply(g);
      const SpectralField gpf = gp.apply(f), gpg = gp.apply(g);
      const SpectralField lf = ops.L(f), lg = ops.L(g);
      record(std::abs(inner_product(gmf, g) - inner_product(f, gmg)) / (nf * ng), "G- symmetry", i);
      record(std::abs(inner_product(gpf, g) - inner_product(f, gpg)) / (nf * ng), "G+ symmetry", i);
      record(std::abs(inner_product(lf, g) - inner_product(f, lg)) / (nf * ng), "L symmetry", i);
      record(std::max(0.0, -inner_product(gmf, f)) / (nf * nf), "G- positivity", i);
      record(std::max(0.0, inner_product(gpf, f)) / (nf * nf), "-G+ positivity", i);
      record(std::max(0.0, -inner_product(lf, f)) / (nf * nf), "L positivity", i);
      const double root_len = std::sqrt(grid.length());
      record(std::abs(gmf.mean()) * root_len / nf, "G- zero mean", i);
      record(std::abs(gpf.mean()) * root_len / nf, "G+ zero mean", i);
      record(std::abs(lf.mean()) * root_len / nf, "L zero mean", i);
      const SpectralField one = SpectralField::zeros(grid) + 1.0;
      record(l2_norm(gm.apply(one)) / root_len, "G- constants", i);
      record(l2_norm(gp.apply(one)) / root_len, "G+ constants", i);
    }
    r.measured = worst;
    r.threshold = 10.0;
    r.passed = worst <= r.threshold;
    r.detail = fmt::format("worst defect / solver tolerance over {} pairs: {}", pairs, where);
  });
}

CheckResult check_two_phase_identity() {
  return timed("two_phase_identity", [](CheckResult& r) {
    const PeriodicGrid grid(128);
    EllipticSolveConfig cfg;
    cfg.n_z = 64;
    DomainSpec dom;
    dom.bottom = Wall::infinite();
    dom.top = Wall::infinite();
    const Interface eta{SpectralField::zeros(grid)};
    const SpectralField v = SpectralField::from_function(grid, [](double x) {
      double s = 0.0;
      for (int k = 1; k <= 8; ++k) s += std::cos(k * x + 0.3 * k) / k;
      return s;
    });
    double jump = 0.0, formula = 0.0;
    for (auto [mm, mp] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
      FluidParams p;
      p.mu_minus = mm;
      p.mu_plus = mp;
      p.rho_minus = 1.0;
      p.rho_plus = 0.5;
      const auto [fm, fp] = solve_two_phase(eta, v, p, dom, cfg);
      jump = std::max(jump, (fm - fp - v).max_abs());
      formula = std::max(formula, l2_norm(fm - (mm / (mm + mp)) * v) / l2_norm(v));
    }
    r.measured = formula;
    r.threshold = cfg.tolerance;
    r.passed = jump <= 1e-12 && formula <= cfg.tolerance;
    r.detail = fmt::format("max |f- - f+ - v| = {:.3g} (needs <= 1e-12); relative formula error shown", jump);
  });
}

CheckResult check_flattening_invariant(std::uint64_t seed, int count) {
  return timed("flattening_invariant", [&](CheckResult& r) {
    const PeriodicGrid grid(128);
    std::mt19937_64 rng(seed);
    // fixed reference walls: as tau -> 0, d(rho)/dz -> depth - 2|z| eta, so the
    // admissible family keeps sup|eta| <= (depth - h/6) / 2
    std::uniform_real_distribution<double> amp(0.05, 0.45);
    std::uniform_int_distribution<int> top_mode(1, 20);
    std::uniform_real_distribution<double> decay(0.0, 2.0);
    DomainSpec dom;
    dom.bottom = Wall::flat(1.0);
    dom.top = Wall::flat(1.0);
    dom.separation = 0.2;
    DomainSpec deep;
    deep.bottom = Wall::infinite();
    deep.top = Wall::infinite();
    deep.separation = 0.2;
    double worst = std::numeric_limits<double>::infinity();
    int retries = 0;
    for (int i = 0; i < count; ++i) {
      const Interface eta{scaled_to_sup(random_field(grid, rng, top_mode(rng), decay(rng)), amp(rng))};
      const DomainSpec& d = i % 2 == 0 ? dom : deep;
      for (Side side : {Side::lower, Side::upper}) {
        const FlatteningMap map = build_flattening(eta, d, initial_tau(eta, d.separation), side);
        retries = std::max(retries, map.retries());
        for (const auto* levels : {&map.nodes(), &map.midpoints()})
          for (const FlatteningMap::Level& l : *levels) worst = std::min(worst, l.rho_z.min() / d.separation);
      }
    }
    r.measured = worst;
    r.threshold = 1.0 / 12.0;
    r.passed = worst >= r.threshold;
    r.detail = fmt::format("min d(rho)/dz / h over {} interfaces, both sides; max tau halvings {}", count, retries);
  });
}

CheckResult check_dynamics_invariants() {
  return timed("dynamics_invariants", [](CheckResult& r) {
    const PeriodicGrid grid(256);
    FluidParams p;
    p.surface_tension = 0.01;
    DomainSpec dom;
    dom.bottom = Wall::flat(2.0);
    SimConfig sim;
    sim.t_end = 0.2;
    const Interface eta0{SpectralField::from_function(grid, [](double x) { return 0.1 * std::cos(x); })};
    const TimeSeries ts = integrate(eta0, p, dom, EllipticSolveConfig{}, sim);
    double drift = 0.0;
    int energy_violations = 0;
    bool monitors_ok = true;
    for (size_t i = 0; i < ts.states.size(); ++i) {
      const SimState& st = ts.states[i];
      drift = std::max(drift, std::abs(st.eta.height.mean() - ts.states[0].eta.height.mean()));
      if (i > 0 && st.monitors.energy > ts.states[i - 1].monitors.energy * (1.0 + 1e-9)) ++energy_violations;
      if (!std::isfinite(st.monitors.inf_rt) || std::isnan(st.monitors.separation)) monitors_ok = false;
    }
    r.measured = drift;
    r.threshold = 1e-8;
    r.passed = ts.status == Termination::completed && drift <= 1e-8 && energy_violations == 0 && monitors_ok;
    r.detail = fmt::format("status {}, {} steps, energy increases {}, monitors {} ", to_string(ts.status),
                           ts.states.size() - 1, energy_violations, monitors_ok ? "reported" : "missing");
    if (!ts.states.empty())
      r.detail += fmt::format("(final inf RT {:.4g}, separation {:.4g})", ts.states.back().monitors.inf_rt,
                              ts.states.back().monitors.separation);
  });
}

std::vector<CheckResult> dn_suite(std::uint64_t seed) {
  return {check_flat_dn_exactness(), check_operator_structure(seed), check_two_phase_identity(),
          check_flattening_invariant(seed)};
}

std::vector<CheckResult> paracalc_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const PeriodicGrid grid(256);
  const CutoffPair cut;
  const std::vector<int> probes = default_probes();

  out.push_back(timed("T_1 = Psi(D)", [&](CheckResult& r) {
    const ParaOperator t1(ParaSymbol::from_function(grid, 0.0, 2.0, [](double, double) { return Complex(1.0); }), cut);
    double worst = 0.0;
    for (int xi = -grid.size() / 2 + 1; xi <= grid.size() / 2; ++xi)
      for (int eta = -grid.size() / 2 + 1; eta <= grid.size() / 2; ++eta) {
        const double expect = xi == eta ? cut.psi(std::abs(grid.wavenumber(xi))) : 0.0;
        worst = std::max(worst, std::abs(t1.entry(xi, eta) - expect));
      }
    r.measured = worst;
    r.threshold = 1e-13;
    r.passed = worst <= r.threshold;
    r.detail = "max matrix entry deviation";
  }));

  const ParaSymbol a = ParaSymbol::from_function(
      grid, 1.0, 2.0, [](double x, double xi) { return Complex((1.0 + 0.3 * std::cos(x)) * std::abs(xi)); });
  const ParaSymbol b = ParaSymbol::from_function(
      grid, 1.0, 2.0, [](double x, double xi) { return Complex((1.0 + 0.3 * std::sin(x)) * std::abs(xi)); });

  out.push_back(timed("paradiff linearity", [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const SpectralField u = random_field(grid, rng, 80, 0.5), v = random_field(grid, rng, 80, 0.5);
      const double alpha = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
      const SpectralField lhs = paradiff_apply(a, alpha * u + v, cut);
      const SpectralField rhs = alpha * paradiff_apply(a, u, cut) + paradiff_apply(a, v, cut);
      worst = std::max(worst, l2_norm(lhs - rhs) / l2_norm(lhs));
    }
    r.measured = worst;
    r.threshold = 1e-12;
    r.passed = worst <= r.threshold;
  }));

  out.push_back(timed("low-frequency annihilation", [&](CheckResult& r) {
    const SpectralField u = SpectralField::zeros(grid) + 1.7;  // only |k| <= 1/5 content
    r.measured = paradiff_apply(a, u, cut).max_abs();
    r.threshold = 0.0;
    r.passed = r.measured == 0.0;
  }));

  out.push_back(timed("paradiff support", [&](CheckResult& r) {
    const ParaSymbol s = ParaSymbol::from_function(
        grid, 1.0, 2.0, [](double x, double xi) { return Complex((1.0 + 0.1 * std::cos(x)) * std::abs(xi)); });
    const int k = 60;
    const FullSpectrum out_spec = paradiff_apply(s, unit_mode(grid, k), cut);
    double inside = 0.0, outside = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      const int xi = i - grid.size() / 2 + 1;
      const double e = std::norm(out_spec[static_cast<size_t>(i)]);
      (std::abs(xi - k) <= cut.eps2 * k ? inside : outside) += e;
    }
    r.measured = std::sqrt(outside / (inside + outside));
    r.threshold = 1e-14;
    r.passed = r.measured <= r.threshold;
    r.detail = "energy fraction outside |xi - k| <= eps2 k for k = 60";
  }));

  out.push_back(timed("composition order T_aT_b - T_ab", [&](CheckResult& r) {
    const ParaOperator d = ParaOperator(a, cut).compose(ParaOperator(b, cut)) - ParaOperator(a.times(b), cut);
    const OrderFit f = operator_order_fit([&](const FullSpectrum& u) { return d.apply(u); }, grid, probes);
    const double delta = std::min(1.0, std::min(a.regularity(), b.regularity()));
    r.measured = f.order;
    r.threshold = a.order() + b.order() - delta + 0.15;
    r.passed = f.order <= r.threshold;
    r.detail = "a = (1+0.3cos x)|xi|, b = (1+0.3sin x)|xi|";
  }));

  out.push_back(timed("adjoint order T_a* - T_conj(a)", [&](CheckResult& r) {
    const ParaSymbol c = ParaSymbol::from_function(grid, 1.0, 2.0, [](double x, double xi) {
      return Complex((1.0 + 0.3 * std::cos(x)) * std::abs(xi), 0.2 * std::sin(x) * xi);
    });
    const ParaOperator d = ParaOperator(c, cut).adjoint() - ParaOperator(c.conjugate(), cut);
    const OrderFit f = operator_order_fit([&](const FullSpectrum& u) { return d.apply(u); }, grid, probes);
    r.measured = f.order;
    r.threshold = c.order() - std::min(1.0, c.regularity()) + 0.15;
    r.passed = f.order <= r.threshold;
    r.detail = "a = (1+0.3cos x)|xi| + 0.2i sin(x) xi";
  }));

  out.push_back(timed("DN paralinearization order", [&](CheckResult& r) {
    DomainSpec dom;
    EllipticSolveConfig cfg;
    cfg.n_z = 128;
    const Interface eta{SpectralField::from_function(grid, [](double x) { return 0.1 * std::cos(x); })};
    const DNOperator op(eta, Side::lower, dom, cfg);
    const SpectralField f = SpectralField::from_function(grid, [](double x) { return std::cos(16 * x); });
    const ParalinResult res = paralin_residual_dn(op, f, probes, cut);
    r.measured = res.fit.order;
    r.threshold = 0.6;
    r.passed = res.fit.order <= r.threshold;
    std::string norms;
    for (double v : res.fit.norms) norms += fmt::format(" {:.3g}", v);
    r.detail = fmt::format("eta = 0.1cos x, infinite depth, n_z = 128; residual norms{}", norms);
  }));

  out.push_back(timed("curvature paralinearization", [&](CheckResult& r) {
    const Interface eta{SpectralField::from_function(grid, [](double x) { return std::cos(x); })};
    const std::vector<double> amps{0.01, 0.02, 0.04, 0.08};
    const ParalinResult res = paralin_residual_curvature(eta, amps, cut);
    r.measured = res.fit.order;
    r.threshold = 1.9;
    r.passed = res.fit.order >= r.threshold;
    r.detail = "order in eps of ||H(eps cos x) - T_l eps cos x||";
  }));

  out.push_back(timed("Garding a = |xi|", [&](CheckResult& r) {
    const ParaSymbol s =
        ParaSymbol::from_function(grid, 1.0, 1.0, [](double, double xi) { return Complex(std::abs(xi)); });
    const GardingReport g = garding_check(s, 1.0, 1.0, 200, seed, cut);
    r.measured = g.constant;
    r.threshold = 1.1;
    r.passed = g.stable && std::abs(g.constant - 1.0) <= 0.1;
    r.detail = fmt::format("C over half the samples {:.6g}, stable {}", g.constant_half, g.stable);
  }));

  out.push_back(timed("Garding a = (1+0.2cos x)|xi|^3", [&](CheckResult& r) {
    const ParaSymbol s = ParaSymbol::from_function(grid, 3.0, 1.0, [](double x, double xi) {
      return Complex((1.0 + 0.2 * std::cos(x)) * std::pow(std::abs(xi), 3));
    });
    const GardingReport g = garding_check(s, 3.0, 0.8, 200, seed, cut);
    r.measured = g.constant;
    r.threshold = 1.1 * g.constant_half;
    r.passed = g.stable && std::isfinite(g.constant);
    r.detail = fmt::format("C over half the samples {:.6g}, stable {}", g.constant_half, g.stable);
  }));
  return out;
}

}  // namespace muskat
