#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "muskat/dynamics.hpp"
#include "muskat/stats.hpp"

using namespace muskat;

namespace {

SpectralField cosk(const PeriodicGrid& g, int k, double a = 1.0) {
  return SpectralField::from_function(g, [k, a](double x) { return a * std::cos(k * x); });
}

double rel(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b) / l2_norm(b); }

EllipticSolveConfig nz(int n) {
  EllipticSolveConfig c;
  c.n_z = n;
  c.tolerance = 1e-12;
  return c;
}

SpectralField random_trig(const PeriodicGrid& g, std::mt19937_64& rng, int kmax, double sup) {
  std::normal_distribution<double> n;
  std::vector<std::complex<double>> c(static_cast<size_t>(g.n_modes()));
  for (int k = 1; k <= kmax; ++k) c[static_cast<size_t>(k)] = {n(rng) / (k * k), n(rng) / (k * k)};
  const SpectralField f = SpectralField::from_coefficients(g, c);
  return (sup / f.max_abs()) * f;
}

// phi = exp(k y) cos(k x): trace, (d_y - eta_x d_x) phi, d_y phi, d_x phi on y = eta.
struct Harmonic {
  SpectralField f, dn, dy, dx;
};

Harmonic harmonic(const Interface& eta, int k) {
  const PeriodicGrid& g = eta.grid();
  const SpectralField ex = eta.height.derivative();
  std::vector<double> f(static_cast<size_t>(g.size())), dn(f.size()), dy(f.size()), dx(f.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j), e = std::exp(k * eta.height[j]);
    const size_t i = static_cast<size_t>(j);
    f[i] = e * std::cos(k * x);
    dy[i] = k * e * std::cos(k * x);
    dx[i] = -k * e * std::sin(k * x);
    dn[i] = dy[i] - ex[j] * dx[i];
  }
  return {SpectralField::from_values(g, f), SpectralField::from_values(g, dn), SpectralField::from_values(g, dy),
          SpectralField::from_values(g, dx)};
}

}  // namespace

TEST(OperatorB, FlatInterface) {
  const PeriodicGrid g(64);
  const Interface flat{SpectralField::zeros(g)};
  const FluidParams p;
  const InterfaceOperators ops(flat, p, DomainSpec{}, nz(128));
  const SpectralField f = cosk(g, 3) + cosk(g, 5, 0.2);
  EXPECT_LT((operator_B(ops, f, Side::lower) - ops.lower().apply(f)).max_abs(), 1e-13);
  EXPECT_LT(rel(operator_B(ops, cosk(g, 4), Side::lower), 4.0 * cosk(g, 4)), 2.5e-4);
  EXPECT_LT((operator_V(ops, f, Side::lower) - f.derivative()).max_abs(), 1e-13);
}

TEST(OperatorV, ConstantsGiveZero) {
  const PeriodicGrid g(64);
  const Interface eta{cosk(g, 1, 0.1)};
  const InterfaceOperators ops(eta, FluidParams{}, DomainSpec{}, nz(32));
  EXPECT_LT(operator_V(ops, SpectralField::zeros(g) + 2.5, Side::lower).max_abs(), 1e-10);
}

TEST(OperatorB, FormulaRecoversGradientOfHarmonicFunction) {
  const PeriodicGrid g(128);
  const Interface eta{cosk(g, 1, 0.1)};
  const Harmonic h = harmonic(eta, 2);
  const SpectralField b = operator_B(eta, h.f, h.dn);
  EXPECT_LT(rel(b, h.dy), 1e-12);
  EXPECT_LT(rel(operator_V(eta, h.f, b), h.dx), 1e-12);
}

TEST(OperatorB, ConsistencyWithInteriorSolveRichardson) {
  // traces of the interior solution at two z resolutions, extrapolated
  const PeriodicGrid g(128);
  const Interface eta{cosk(g, 1, 0.1)};
  const Harmonic h = harmonic(eta, 2);
  std::vector<SpectralField> b, v;
  for (int n : {128, 256}) {
    const InterfaceOperators ops(eta, FluidParams{}, DomainSpec{}, nz(n));
    b.push_back(operator_B(ops, h.f, Side::lower));
    v.push_back(operator_V(ops, h.f, Side::lower));
  }
  const SpectralField bx = (4.0 / 3.0) * b[1] - (1.0 / 3.0) * b[0];
  const SpectralField vx = (4.0 / 3.0) * v[1] - (1.0 / 3.0) * v[0];
  EXPECT_LT(rel(bx, h.dy), 1e-6);
  EXPECT_LT(rel(vx, h.dx), 1e-6);
}

TEST(RayleighTaylor, FlatIsOne) {
  const PeriodicGrid g(64);
  const RayleighTaylor rt = rayleigh_taylor(Interface{SpectralField::zeros(g)}, FluidParams{}, DomainSpec{});
  EXPECT_EQ(rt.infimum, 1.0);
  EXPECT_EQ((rt.field + (-1.0)).max_abs(), 0.0);
}

TEST(RayleighTaylor, OnePhaseUsesIdentitySplit) {
  const PeriodicGrid g(64);
  const Interface eta{cosk(g, 1, 0.1) + cosk(g, 2, 0.03)};
  const InterfaceOperators ops(eta, FluidParams{}, DomainSpec{}, nz(32));
  const SpectralField expect = (-operator_B(ops, eta.height, Side::lower)) + 1.0;
  EXPECT_LT((rayleigh_taylor(ops).field - expect).max_abs(), 1e-12);
}

TEST(RayleighTaylor, SmallAmplitudeExpansion) {
  // RT = 1 - B eta = 1 - eps cos x + O(eps^2): linear leading term, quadratic remainder
  const PeriodicGrid g(128);
  std::vector<std::pair<double, double>> remainder;
  for (double eps : {0.02, 0.04, 0.08}) {
    const RayleighTaylor rt = rayleigh_taylor(Interface{cosk(g, 1, eps)}, FluidParams{}, DomainSpec{}, nz(128));
    const double dev = std::abs(rt.infimum - 1.0);
    EXPECT_NEAR(dev / eps, 1.0, 3.0 * eps);
    remainder.emplace_back(eps, std::abs(rt.infimum - (1.0 - eps)));
  }
  // at the minimum x = pi the quadratic term of B eta vanishes as well
  const LinearFit fit = fit_rate(remainder);
  EXPECT_GE(fit.slope, 1.9);
}

TEST(EvolutionRhs, FlatIsSteady) {
  const PeriodicGrid g(64);
  FluidParams p;
  p.surface_tension = 0.3;
  EXPECT_EQ(evolution_rhs(Interface{SpectralField::zeros(g)}, p, DomainSpec{}).max_abs(), 0.0);
}

TEST(EvolutionRhs, Linearization) {
  const PeriodicGrid g(64);
  FluidParams p;
  p.mu_minus = 2.0;
  p.rho_minus = 1.5;
  p.g = 1.2;
  p.surface_tension = 0.05;
  const int k = 3;
  const InterfaceOperators flat(Interface{SpectralField::zeros(g)}, p, DomainSpec{}, nz(128));
  std::vector<double> dev_discrete;
  for (double eps : {1e-4, 1e-3}) {
    const SpectralField rhs = evolution_rhs(Interface{cosk(g, k, eps)}, p, DomainSpec{}, nz(128));
    const double factor = (p.g * p.rho_minus + p.surface_tension * k * k) / p.mu_minus;
    EXPECT_LT(rel(rhs, (-k * factor) * cosk(g, k, eps)), 5 * eps);
    dev_discrete.push_back(rel(rhs, (-flat.flat_L_symbol(k) * factor) * cosk(g, k, eps)));
  }
  // single mode: the quadratic interaction cancels, relative deviation is O(eps^2)
  EXPECT_NEAR(dev_discrete[1] / dev_discrete[0], 100.0, 10.0);
}

TEST(EvolutionRhs, MeanZeroEvenSymmetryDissipativity) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(17);
  FluidParams p;
  p.surface_tension = 0.1;
  DomainSpec dom;
  dom.bottom = Wall::flat(1.0);
  const EllipticSolveConfig cfg = nz(32);
  for (int i = 0; i < 5; ++i) {
    const Interface eta{random_trig(g, rng, 6, 0.2)};
    const InterfaceOperators ops(eta, p, dom, cfg);
    const SpectralField rhs = evolution_rhs(ops);
    EXPECT_LE(std::abs(rhs.mean()), 10 * cfg.tolerance * l2_norm(rhs));
    const SpectralField drive = driving_potential(eta, p);
    EXPECT_GE(inner_product(ops.L(drive), drive), -10 * cfg.tolerance * std::pow(sobolev_norm(drive, 0.5), 2));
  }
  const Interface even{cosk(g, 1, 0.15) + cosk(g, 3, 0.05)};
  const SpectralField rhs = evolution_rhs(even, p, dom, cfg);
  EXPECT_LT((rhs.reflected() - rhs).max_abs(), 1e-9 * rhs.max_abs());
}

TEST(EvolutionRhs, OnePhaseIsLimitOfTwoPhase) {
  const PeriodicGrid g(64);
  const Interface eta{cosk(g, 1, 0.1) + cosk(g, 2, 0.03)};
  FluidParams one;
  one.surface_tension = 0.02;
  FluidParams two = one;
  two.mu_plus = 1e-8;
  DomainSpec dom1, dom2;
  dom2.top = Wall::infinite();
  const SpectralField a = evolution_rhs(eta, one, dom1, nz(64));
  const SpectralField b = evolution_rhs(eta, two, dom2, nz(64));
  EXPECT_LT(rel(b, a), 1e-5);
}
