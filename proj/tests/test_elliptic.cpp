#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Sparse>
#include <gtest/gtest.h>

#include "muskat/elliptic.hpp"
#include "muskat/errors.hpp"

using namespace muskat;

namespace {

SpectralField cosk(const PeriodicGrid& g, int k) {
  return SpectralField::from_function(g, [k](double x) { return std::cos(k * x); });
}

SpectralField random_trig(const PeriodicGrid& g, std::mt19937_64& rng, int kmax, double decay) {
  std::normal_distribution<double> n;
  std::vector<std::complex<double>> c(static_cast<size_t>(g.n_modes()));
  for (int k = 1; k <= kmax; ++k) c[static_cast<size_t>(k)] = {n(rng) * std::pow(k, -decay), n(rng) * std::pow(k, -decay)};
  return SpectralField::from_coefficients(g, c);
}

double rel(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b) / l2_norm(b); }

EllipticSolveConfig with_nz(int nz, double tol = 1e-12) {
  EllipticSolveConfig c;
  c.n_z = nz;
  c.tolerance = tol;
  return c;
}

FluidParams two_phase(double mm, double mp) {
  FluidParams p;
  p.mu_minus = mm;
  p.mu_plus = mp;
  p.rho_minus = 1.0;
  p.rho_plus = 0.5;
  return p;
}

// Harmonic phi = exp(k y) cos(k x) below eta: trace and normal derivative
// (d_y - eta_x d_x) phi on y = eta.
struct HarmonicPair {
  SpectralField f;
  SpectralField dn;
};

HarmonicPair deep_lower(const Interface& eta, int k) {
  const SpectralField ex = eta.height.derivative();
  const PeriodicGrid& g = eta.grid();
  std::vector<double> f(static_cast<size_t>(g.size())), dn(f.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j), e = std::exp(k * eta.height[j]);
    f[static_cast<size_t>(j)] = e * std::cos(k * x);
    dn[static_cast<size_t>(j)] = k * e * (std::cos(k * x) + ex[j] * std::sin(k * x));
  }
  return {SpectralField::from_values(g, f), SpectralField::from_values(g, dn)};
}

// phi = cosh(k (y + d)) cos(k x): zero flux through the wall y = -d.
HarmonicPair finite_lower(const Interface& eta, int k, double d) {
  const SpectralField ex = eta.height.derivative();
  const PeriodicGrid& g = eta.grid();
  std::vector<double> f(static_cast<size_t>(g.size())), dn(f.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j), a = k * (eta.height[j] + d);
    f[static_cast<size_t>(j)] = std::cosh(a) * std::cos(k * x);
    dn[static_cast<size_t>(j)] = k * std::sinh(a) * std::cos(k * x) + ex[j] * k * std::cosh(a) * std::sin(k * x);
  }
  return {SpectralField::from_values(g, f), SpectralField::from_values(g, dn)};
}

// phi = exp(-k y) cos(k x) above eta.
HarmonicPair deep_upper(const Interface& eta, int k) {
  const SpectralField ex = eta.height.derivative();
  const PeriodicGrid& g = eta.grid();
  std::vector<double> f(static_cast<size_t>(g.size())), dn(f.size());
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j), e = std::exp(-k * eta.height[j]);
    f[static_cast<size_t>(j)] = e * std::cos(k * x);
    dn[static_cast<size_t>(j)] = k * e * (-std::cos(k * x) + ex[j] * std::sin(k * x));
  }
  return {SpectralField::from_values(g, f), SpectralField::from_values(g, dn)};
}

Interface wavy(const PeriodicGrid& g, double amp = 0.1) {
  return Interface{SpectralField::from_function(g, [amp](double x) { return amp * std::cos(x); })};
}

}  // namespace

TEST(DNFlat, FiniteDepthPerMode) {
  const PeriodicGrid g(256);
  DomainSpec dom;
  for (double depth : {1.0, 0.5}) {
    dom.bottom = Wall::flat(depth);
    for (int nz : {64, 128}) {
      const DNOperator op(Interface{SpectralField::zeros(g)}, Side::lower, dom, with_nz(nz));
      for (int k = 1; k <= g.size() / 4; k += (k < 8 ? 1 : 9)) {
        const double exact = k * std::tanh(depth * k);
        EXPECT_LT(rel(dn_apply(op, cosk(g, k)), exact * cosk(g, k)), nz == 64 ? 1e-3 : 2.5e-4) << "k=" << k << " nz=" << nz;
      }
    }
  }
}

TEST(DNFlat, InfiniteDepth) {
  const PeriodicGrid g(128);
  const DNOperator op(Interface{SpectralField::zeros(g)}, Side::lower, DomainSpec{}, with_nz(128));
  for (int k : {1, 2, 5, 20})
    EXPECT_LT(rel(op.apply(cosk(g, k)), k * cosk(g, k)), 2.5e-4) << k;
}

TEST(DNFlat, FlatSymbolIsTheDiscreteOperator) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.bottom = Wall::flat(1.0);
  const DNOperator op(Interface{SpectralField::zeros(g)}, Side::lower, dom, with_nz(32));
  for (int k = 1; k < 30; k += 3) EXPECT_LT(rel(op.apply(cosk(g, k)), op.flat_symbol(k) * cosk(g, k)), 1e-10);
}

TEST(DNFlat, UpperSideIsNegative) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.top = Wall::flat(0.7);
  const DNOperator op(Interface{SpectralField::zeros(g)}, Side::upper, dom, with_nz(128));
  for (int k : {1, 3, 6}) EXPECT_LT(rel(op.apply(cosk(g, k)), -k * std::tanh(0.7 * k) * cosk(g, k)), 2.5e-4);
}

TEST(DNCurved, ClosedFormDeepLower) {
  const PeriodicGrid g(128);
  const Interface eta = wavy(g);
  std::vector<double> err;
  for (int nz : {32, 64, 128}) {
    const DNOperator op(eta, Side::lower, DomainSpec{}, with_nz(nz));
    const HarmonicPair h = deep_lower(eta, 2);
    err.push_back(rel(op.apply(h.f), h.dn));
  }
  EXPECT_LT(err[2], 5e-4);
  EXPECT_NEAR(err[1] / err[2], 4.0, 1.0);
  EXPECT_NEAR(err[0] / err[1], 4.0, 1.0);
}

TEST(DNCurved, ClosedFormFiniteDepth) {
  const PeriodicGrid g(128);
  const Interface eta{SpectralField::from_function(g, [](double x) { return 0.15 * std::cos(x) + 0.05 * std::sin(2 * x); })};
  DomainSpec dom;
  dom.bottom = Wall::flat(1.0);
  for (int k : {1, 3}) {
    const HarmonicPair h = finite_lower(eta, k, 1.0);
    const DNOperator op(eta, Side::lower, dom, with_nz(128));
    EXPECT_LT(rel(op.apply(h.f), h.dn), 5e-4) << k;
  }
}

TEST(DNCurved, ClosedFormDeepUpper) {
  const PeriodicGrid g(128);
  const Interface eta = wavy(g);
  DomainSpec dom;
  dom.top = Wall::infinite();
  const HarmonicPair h = deep_upper(eta, 2);
  const DNOperator op(eta, Side::upper, dom, with_nz(128));
  EXPECT_LT(rel(op.apply(h.f), h.dn), 5e-4);
}

TEST(DNCurved, RichardsonSelfConvergence) {
  // eta = 0.1 cos x, f = cos 2x: second-order convergence under joint refinement
  std::vector<SpectralField> vals;
  for (int m : {1, 2, 4}) {
    const PeriodicGrid g(64 * m);
    EllipticSolveConfig cfg = with_nz(32 * m);
    cfg.surface_scale = 0.05;  // same grading at every level
    const DNOperator op(wavy(g), Side::lower, DomainSpec{}, cfg);
    const SpectralField v = op.apply(cosk(g, 2));
    std::vector<std::complex<double>> c(v.coefficients().begin(), v.coefficients().begin() + 17);
    c.resize(33);
    vals.push_back(SpectralField::from_coefficients(PeriodicGrid(64), c));
  }
  const double d1 = l2_norm(vals[1] - vals[0]), d2 = l2_norm(vals[2] - vals[1]);
  EXPECT_NEAR(d1 / d2, 4.0, 1.0);
  const SpectralField extrapolated = (4.0 / 3.0) * vals[2] - (1.0 / 3.0) * vals[1];
  EXPECT_LT(l2_norm(extrapolated - vals[2]), 1e-3 * l2_norm(vals[2]));
}

TEST(DNStructure, SymmetryPositivityMeanConstants) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(21);
  DomainSpec dom;
  dom.bottom = Wall::flat(1.5);
  dom.top = Wall::flat(1.5);
  const EllipticSolveConfig cfg = with_nz(32, 1e-10);
  const double tol = cfg.tolerance;
  for (int i = 0; i < 10; ++i) {
    const SpectralField e = random_trig(g, rng, 5, 1.0);
    const Interface eta{(0.2 / e.max_abs()) * e};
    const SpectralField f = random_trig(g, rng, 10, 1.5), h = random_trig(g, rng, 10, 1.5);
    const double nf = sobolev_norm(f, 0.5), nh = sobolev_norm(h, 0.5);
    for (Side side : {Side::lower, Side::upper}) {
      const DNOperator op(eta, side, dom, cfg);
      const SpectralField gf = op.apply(f), gh = op.apply(h);
      EXPECT_LE(std::abs(inner_product(gf, h) - inner_product(f, gh)), 10 * tol * nf * nh);
      const double sign = side == Side::lower ? 1.0 : -1.0;
      EXPECT_GE(sign * inner_product(gf, f), -10 * tol * nf * nf);
      EXPECT_LE(std::abs(gf.mean()), 10 * tol * l2_norm(f));
      EXPECT_LE(op.apply(SpectralField::zeros(g) + 1.0).max_abs(), 10 * tol);
    }
  }
}

TEST(DNOperator, SolveReportsIterations) {
  const PeriodicGrid g(64);
  const DNOperator op(wavy(g), Side::lower, DomainSpec{}, with_nz(32));
  const DNSolution s = op.solve(cosk(g, 3));
  EXPECT_GT(s.iterations, 0);
  EXPECT_LE(s.residual, 1e-12);
  ASSERT_EQ(static_cast<int>(s.levels.size()), 33);
  EXPECT_LT((s.levels.front() - cosk(g, 3)).max_abs(), 1e-12);
}

TEST(DNOperator, RejectsMissingFluidAndBadConfig) {
  const PeriodicGrid g(32);
  EXPECT_THROW(DNOperator(wavy(g), Side::upper, DomainSpec{}), PreconditionError);
  EllipticSolveConfig bad;
  bad.n_z = 2;
  EXPECT_THROW(DNOperator(wavy(g), Side::lower, DomainSpec{}, bad), ValidationError);
  DomainSpec shallow;
  shallow.bottom = Wall::flat(0.15);
  EXPECT_THROW(DNOperator(wavy(g), Side::lower, shallow), PreconditionError);
}

TEST(DNOperator, SolverErrorWhenIterationsExhausted) {
  const PeriodicGrid g(64);
  EllipticSolveConfig c = with_nz(32);
  c.max_iterations = 1;
  c.flat_preconditioner = false;
  const DNOperator op(wavy(g, 0.3), Side::lower, DomainSpec{}, c);
  EXPECT_THROW(op.apply(cosk(g, 5)), SolverError);
}

TEST(ThetaLift, TraceSupportAndZero) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(4);
  const Interface eta = wavy(g, 0.2);
  const SpectralField v = random_trig(g, rng, 8, 1.0);
  const double h = 0.3;
  const ThetaLift th = theta_lift(v, eta, h);
  const ThetaLift zero = theta_lift(SpectralField::zeros(g), eta, h);
  for (int j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    EXPECT_NEAR(th(x, eta.height[j]), -0.5 * v[j], 1e-12);
    EXPECT_EQ(th(x, eta.height[j] + 1.01 * h), 0.0);
    EXPECT_EQ(th(x, eta.height[j] - 1.5 * h), 0.0);
    EXPECT_EQ(zero(x, eta.height[j] + 0.1), 0.0);
    EXPECT_NEAR(th.at_node(j, 0.0), -0.5 * v[j], 1e-12);
  }
  EXPECT_EQ(ThetaLift::cutoff(0.4), 1.0);
  EXPECT_EQ(ThetaLift::cutoff(-1.0), 0.0);
  EXPECT_GT(ThetaLift::cutoff(0.75), 0.0);
  EXPECT_LT(ThetaLift::cutoff(0.75), 1.0);
}

TEST(TwoPhase, OnePhaseLimit) {
  const PeriodicGrid g(64);
  FluidParams p;
  const SpectralField v = cosk(g, 2) + 0.3;
  const auto [fm, fp] = solve_two_phase(wavy(g), v, p, DomainSpec{});
  EXPECT_EQ((fm - v).max_abs(), 0.0);
  EXPECT_EQ(fp.max_abs(), 0.0);
}

TEST(TwoPhase, FlatFourierFormula) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.top = Wall::infinite();
  for (auto [mm, mp] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{0.3, 3.0}}) {
    for (int k : {1, 4}) {
      const auto [fm, fp] = solve_two_phase(Interface{SpectralField::zeros(g)}, cosk(g, k), two_phase(mm, mp), dom, with_nz(32, 1e-10));
      EXPECT_LT(rel(fm, (mm / (mm + mp)) * cosk(g, k)), 1e-10);
      EXPECT_LT(rel(fp, (-mp / (mm + mp)) * cosk(g, k)), 1e-10);
    }
  }
}

TEST(TwoPhase, JumpIdentityAndTransmission) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(8);
  DomainSpec dom;
  dom.bottom = Wall::flat(1.0);
  dom.top = Wall::flat(1.2);
  const FluidParams p = two_phase(1.0, 0.4);
  const EllipticSolveConfig cfg = with_nz(32, 1e-11);
  for (int i = 0; i < 5; ++i) {
    const SpectralField e = random_trig(g, rng, 4, 1.0);
    const Interface eta{(0.25 / e.max_abs()) * e};
    const SpectralField v = random_trig(g, rng, 10, 1.0) + 0.7;
    const InterfaceOperators ops(eta, p, dom, cfg);
    const JumpSplit s = ops.split(v);
    EXPECT_LE((s.lower - s.upper - v).max_abs(), 1e-12);
    EXPECT_NEAR(s.lower.mean(), 0.7, 1e-14);
    // transmission through independent applications of G^-, G^+
    const SpectralField gm = ops.lower().apply(s.lower), gp = ops.upper()->apply(s.upper);
    EXPECT_LT(l2_norm(p.mu_plus * gm - p.mu_minus * gp), 1e-8 * l2_norm(gm));
    EXPECT_LT(l2_norm(gm - s.dn_lower), 1e-8 * l2_norm(gm));
    EXPECT_LT(l2_norm(gp - s.dn_upper), 1e-8 * l2_norm(gp));
  }
}

// Low-resolution oracle: the lifted transmission problem in its variational
// form, discretized by P1 elements on a mesh of the whole strip that conforms
// to the interface, with the jump carried by the cutoff lift theta:
//   int w grad r . grad phi = int w s grad theta . grad phi,
// w = 1/mu on each side, s = +1 below and -1 above, q^- = r - theta, q^+ = r + theta.
namespace {

SpectralField variational_lower_trace(const Interface& eta, const SpectralField& v, double mu_minus, double mu_plus,
                                      double d_minus, double d_plus, double h, int layers) {
  const PeriodicGrid& g = eta.grid();
  const int nx = g.size();
  const int ny = 2 * layers + 1;
  auto id = [&](int i, int j) { return ((i % nx + nx) % nx) * ny + (j + layers); };
  auto px = [&](int i) { return i * g.spacing(); };
  auto py = [&](int i, int j) {
    const double e = eta.height[((i % nx) + nx) % nx];
    const double s = static_cast<double>(j) / layers;
    return j <= 0 ? e + (e + d_minus) * s : e + (d_plus - e) * s;
  };
  const ThetaLift theta(v, eta, h);
  const int n = nx * ny;
  std::vector<Eigen::Triplet<double>> tk, ts;
  auto element = [&](std::array<std::pair<int, int>, 3> v3, double w, double s) {
    double x[3], y[3];
    int ids[3];
    for (int a = 0; a < 3; ++a) {
      x[a] = px(v3[a].first);
      y[a] = py(v3[a].first, v3[a].second);
      ids[a] = id(v3[a].first, v3[a].second);
    }
    const double area2 = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
    double b[3], c[3];
    for (int a = 0; a < 3; ++a) {
      const int p = (a + 1) % 3, q = (a + 2) % 3;
      b[a] = y[p] - y[q];
      c[a] = x[q] - x[p];
    }
    for (int a = 0; a < 3; ++a)
      for (int bb = 0; bb < 3; ++bb) {
        const double kab = (b[a] * b[bb] + c[a] * c[bb]) / (2.0 * std::abs(area2));
        tk.emplace_back(ids[a], ids[bb], w * kab);
        ts.emplace_back(ids[a], ids[bb], w * s * kab);
      }
  };
  for (int i = 0; i < nx; ++i)
    for (int j = -layers; j < layers; ++j) {
      const bool lower = j < 0;
      const double w = lower ? 1.0 / mu_minus : 1.0 / mu_plus;
      const double s = lower ? 1.0 : -1.0;
      element({{{i, j}, {i + 1, j}, {i + 1, j + 1}}}, w, s);
      element({{{i, j}, {i + 1, j + 1}, {i, j + 1}}}, w, s);
    }
  Eigen::SparseMatrix<double> K(n, n), Ks(n, n);
  K.setFromTriplets(tk.begin(), tk.end());
  Ks.setFromTriplets(ts.begin(), ts.end());
  Eigen::VectorXd th(n);
  for (int i = 0; i < nx; ++i)
    for (int j = -layers; j <= layers; ++j) th[id(i, j)] = theta.at_node(i, (py(i, j) - eta.height[i]) / h);
  Eigen::VectorXd rhs = Ks * th;
  // pin r at one wall node to remove the constant null space
  const int pin = id(0, -layers);
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      if (it.row() == pin || it.col() == pin) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
  rhs[pin] = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  const Eigen::VectorXd r = ldlt.solve(rhs);
  std::vector<double> f(static_cast<size_t>(nx));
  for (int i = 0; i < nx; ++i) f[static_cast<size_t>(i)] = r[id(i, 0)] - th[id(i, 0)];
  const SpectralField fm = SpectralField::from_values(g, f);
  return fm + (-fm.mean());
}

SpectralField restrict_to(const SpectralField& f, const PeriodicGrid& coarse) {
  std::vector<double> v(static_cast<size_t>(coarse.size()));
  const int stride = f.grid().size() / coarse.size();
  for (int i = 0; i < coarse.size(); ++i) v[static_cast<size_t>(i)] = f[i * stride];
  return SpectralField::from_values(coarse, v);
}

}  // namespace

TEST(TwoPhase, AgreesWithVariationalLiftOracle) {
  const double mm = 1.0, mp = 0.5, dm = 1.0, dp = 1.0, h = 0.4;
  auto eta_of = [](const PeriodicGrid& g) {
    return Interface{SpectralField::from_function(g, [](double x) { return 0.1 * std::cos(x) + 0.04 * std::sin(2 * x); })};
  };
  auto v_of = [](const PeriodicGrid& g) {
    return SpectralField::from_function(g, [](double x) { return std::cos(2 * x) + 0.5 * std::sin(x); });
  };
  const PeriodicGrid fine(128);
  DomainSpec dom;
  dom.bottom = Wall::flat(dm);
  dom.top = Wall::flat(dp);
  dom.separation = 0.5;
  const auto [ref_m, ref_p] = solve_two_phase(eta_of(fine), v_of(fine), two_phase(mm, mp), dom, with_nz(128, 1e-12));
  std::vector<double> err;
  for (int nx : {32, 64, 128}) {
    const PeriodicGrid g(nx);
    const SpectralField oracle = variational_lower_trace(eta_of(g), v_of(g), mm, mp, dm, dp, h, nx / 2);
    const SpectralField ref = restrict_to(ref_m, g);
    err.push_back(l2_norm(oracle - ref) / l2_norm(ref));
  }
  EXPECT_LT(err[2], 3e-3);
  EXPECT_GT(err[0] / err[1], 3.0);
  EXPECT_GT(err[1] / err[2], 3.0);
}

TEST(OperatorL, FlatInterfaceIsAbsD) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.top = Wall::infinite();
  for (auto [mm, mp] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}})
    for (int k : {1, 3, 7}) {
      const SpectralField l = operator_L(Interface{SpectralField::zeros(g)}, cosk(g, k), two_phase(mm, mp), dom, with_nz(128));
      EXPECT_LT(rel(l, k * cosk(g, k)), 2.5e-4);
    }
}

TEST(OperatorL, OnePhaseIsLowerDN) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.bottom = Wall::flat(0.8);
  const FluidParams p;
  for (int k : {1, 2, 5}) {
    const SpectralField l = operator_L(Interface{SpectralField::zeros(g)}, cosk(g, k), p, dom, with_nz(128));
    EXPECT_LT(rel(l, k * std::tanh(0.8 * k) * cosk(g, k)), 2.5e-4);
  }
}

TEST(OperatorL, TwoFormsAgree) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(31);
  DomainSpec dom;
  dom.bottom = Wall::flat(1.0);
  dom.top = Wall::infinite();
  const EllipticSolveConfig cfg = with_nz(32, 1e-10);
  const InterfaceOperators ops(wavy(g, 0.2), two_phase(1.0, 0.7), dom, cfg);
  for (int i = 0; i < 5; ++i) {
    const SpectralField f = random_trig(g, rng, 10, 1.0);
    const SpectralField a = ops.L(f), b = ops.L_lower_form(f);
    EXPECT_LE(l2_norm(a - b), 10 * cfg.tolerance * sobolev_norm(f, 1.0));
  }
}

TEST(OperatorL, FlatLSymbol) {
  const PeriodicGrid g(64);
  DomainSpec dom;
  dom.top = Wall::flat(2.0);
  dom.bottom = Wall::flat(1.0);
  const InterfaceOperators ops(Interface{SpectralField::zeros(g)}, two_phase(1.0, 2.0), dom, with_nz(32));
  for (int k : {1, 4, 9}) EXPECT_LT(rel(ops.L(cosk(g, k)), ops.flat_L_symbol(k) * cosk(g, k)), 1e-9);
}
