#include "muskat/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>

#include "muskat/errors.hpp"
#include "muskat/fft.hpp"

namespace muskat {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

void EllipticSolveConfig::validate() const {
  if (n_z < 8) throw ValidationError("elliptic: n_z must be >= 8");
  if (!(tolerance > 0.0) || tolerance > 1e-4) throw ValidationError("elliptic: tolerance must lie in (0, 1e-4]");
  if (max_iterations < 1) throw ValidationError("elliptic: max_iterations must be >= 1");
}

namespace {

// Quadrature weights of the x-mass term a11 phi_x^2 over one z cell: node
// trapezoid and midpoint average. The pair reproduces the flat-layer symbol
// to second order and keeps the discrete operator symmetric.
constexpr double kTrapezoidWeight = 0.5;
constexpr double kMidpointWeight = 0.5;

// Symmetric tridiagonal matrix with a prefactored Thomas solve.
struct Tridiagonal {
  std::vector<double> diag, off;  // off[i] couples i and i+1
  std::vector<double> inv_pivot, upper;

  void factor() {
    const size_t n = diag.size();
    inv_pivot.resize(n);
    upper.resize(n);
    double prev = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double sub = i > 0 ? off[i - 1] : 0.0;
      const double piv = diag[i] - sub * prev;
      inv_pivot[i] = 1.0 / piv;
      upper[i] = i + 1 < n ? off[i] * inv_pivot[i] : 0.0;
      prev = upper[i];
    }
  }

  // x <- A^{-1} x for a strided complex column.
  void solve(Complex* x, size_t stride) const {
    const size_t n = diag.size();
    Complex prev = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double sub = i > 0 ? off[i - 1] : 0.0;
      prev = (x[i * stride] - sub * prev) * inv_pivot[i];
      x[i * stride] = prev;
    }
    for (size_t i = n - 1; i-- > 0;) x[i * stride] -= upper[i] * x[(i + 1) * stride];
  }
};

// Per-mode matrix of the x-independent operator with node coefficients a11n
// and cell coefficients a11m, a22m, over all levels 0..N.
Tridiagonal mode_matrix(double kappa2, double dz, const std::vector<double>& a11n,
                        const std::vector<double>& a11m, const std::vector<double>& a22m) {
  const size_t cells = a11m.size();
  Tridiagonal t;
  t.diag.assign(cells + 1, 0.0);
  t.off.assign(cells, 0.0);
  for (size_t c = 0; c < cells; ++c) {
    const double mass_mid = dz * kMidpointWeight * a11m[c] * kappa2 / 4.0;
    const double stiff = a22m[c] / dz;
    t.diag[c] += dz * kTrapezoidWeight / 2.0 * a11n[c] * kappa2 + mass_mid + stiff;
    t.diag[c + 1] += dz * kTrapezoidWeight / 2.0 * a11n[c + 1] * kappa2 + mass_mid + stiff;
    t.off[c] += mass_mid - stiff;
  }
  return t;
}

// Schur complement of level 0 for the full-level tridiagonal matrix.
double interface_schur(const Tridiagonal& full) {
  Tridiagonal interior;
  interior.diag.assign(full.diag.begin() + 1, full.diag.end());
  interior.off.assign(full.off.begin() + 1, full.off.end());
  interior.factor();
  CVec e(interior.diag.size(), 0.0);
  e[0] = 1.0;
  interior.solve(e.data(), 1);
  return full.diag[0] - full.off[0] * full.off[0] * e[0].real();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

// Lower-layer operator on the strip. Vectors hold (N+1) levels of n/2+1
// coefficients; level 0 is the interface.
struct DNOperator::Impl {
  PeriodicGrid grid;
  FlatteningMap map;
  int n = 0, nm = 0, m = 0, mm = 0, levels = 0, cells = 0;
  double dz = 0.0;
  std::vector<double> kappa, weight;
  // Coefficients on the padded grid.
  std::vector<std::vector<double>> a11n, a11m, a12m, a22m;
  std::vector<Tridiagonal> precond;  // interior levels, one per mode k < n/2
  std::vector<double> flat;          // flat symbol per mode k <= n/2
  bool use_precond = true;
  double tolerance = 1e-10;
  int max_iterations = 2000;

  Impl(const PeriodicGrid& g, FlatteningMap fm, const EllipticSolveConfig& cfg)
      : grid(g), map(std::move(fm)) {
    n = grid.size();
    nm = grid.n_modes();
    m = grid.padded_size();
    mm = m / 2 + 1;
    cells = map.n_z();
    levels = cells + 1;
    dz = 1.0 / cells;
    use_precond = cfg.flat_preconditioner;
    tolerance = cfg.tolerance;
    max_iterations = cfg.max_iterations;
    kappa.resize(static_cast<size_t>(nm));
    weight.resize(static_cast<size_t>(nm));
    for (int k = 0; k < nm; ++k) {
      kappa[static_cast<size_t>(k)] = grid.wavenumber(k);
      weight[static_cast<size_t>(k)] = k == 0 ? 1.0 : (2 * k == n ? 0.0 : 2.0);
    }

    const StripGrading& sg = map.grading();
    auto zeta_node = [&](int j) { return -static_cast<double>(j) / cells; };
    auto zeta_mid = [&](int c) { return -(c + 0.5) / cells; };

    for (int j = 0; j < levels; ++j) {
      const auto& lv = map.nodes()[static_cast<size_t>(j)];
      std::vector<double> rz = padded_values(lv.rho_z);
      const double ds = sg.dz(zeta_node(j));
      for (double& v : rz) v *= ds;
      a11n.push_back(std::move(rz));
    }
    for (int c = 0; c < cells; ++c) {
      const auto& lv = map.midpoints()[static_cast<size_t>(c)];
      std::vector<double> yz = padded_values(lv.rho_z);
      const std::vector<double> yx = padded_values(lv.rho_x);
      const double ds = sg.dz(zeta_mid(c));
      std::vector<double> a11(static_cast<size_t>(m)), a12(static_cast<size_t>(m)), a22(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) {
        const double jz = yz[static_cast<size_t>(i)] * ds;
        const double jx = yx[static_cast<size_t>(i)];
        a11[static_cast<size_t>(i)] = jz;
        a12[static_cast<size_t>(i)] = -jx;
        a22[static_cast<size_t>(i)] = (1.0 + jx * jx) / jz;
      }
      a11m.push_back(std::move(a11));
      a12m.push_back(std::move(a12));
      a22m.push_back(std::move(a22));
    }

    // x-averaged coefficients for the preconditioner; flat-interface
    // coefficients for the reference symbol.
    std::vector<double> b11n(static_cast<size_t>(levels)), b11m(static_cast<size_t>(cells)),
        b22m(static_cast<size_t>(cells));
    std::vector<double> f11n(static_cast<size_t>(levels)), f11m(static_cast<size_t>(cells)),
        f22m(static_cast<size_t>(cells));
    const double depth = map.depth();
    for (int j = 0; j < levels; ++j) {
      b11n[static_cast<size_t>(j)] = mean_of(a11n[static_cast<size_t>(j)]);
      f11n[static_cast<size_t>(j)] = depth * sg.dz(zeta_node(j));
    }
    for (int c = 0; c < cells; ++c) {
      b11m[static_cast<size_t>(c)] = mean_of(a11m[static_cast<size_t>(c)]);
      b22m[static_cast<size_t>(c)] = mean_of(a22m[static_cast<size_t>(c)]);
      f11m[static_cast<size_t>(c)] = depth * sg.dz(zeta_mid(c));
      f22m[static_cast<size_t>(c)] = 1.0 / f11m[static_cast<size_t>(c)];
    }
    flat.assign(static_cast<size_t>(nm), 0.0);
    for (int k = 0; k < nm; ++k) {
      const double k2 = kappa[static_cast<size_t>(k)] * kappa[static_cast<size_t>(k)];
      if (k > 0) flat[static_cast<size_t>(k)] = interface_schur(mode_matrix(k2, dz, f11n, f11m, f22m));
      if (2 * k == n) continue;
      Tridiagonal full = mode_matrix(k2, dz, b11n, b11m, b22m);
      Tridiagonal in;
      in.diag.assign(full.diag.begin() + 1, full.diag.end());
      in.off.assign(full.off.begin() + 1, full.off.end());
      in.factor();
      precond.push_back(std::move(in));
    }
  }

  size_t at(int level, int k) const { return static_cast<size_t>(level) * static_cast<size_t>(nm) + static_cast<size_t>(k); }

  // out = K phi over all levels (phi given on all levels).
  void apply_K(const CVec& phi, CVec& out) const {
    const size_t M = static_cast<size_t>(m);
    std::vector<double> p(static_cast<size_t>(levels) * M), d(static_cast<size_t>(levels) * M);
    CVec buf(static_cast<size_t>(mm));
    for (int j = 0; j < levels; ++j) {
      std::fill(buf.begin(), buf.end(), Complex(0.0));
      for (int k = 0; k < n / 2; ++k) buf[static_cast<size_t>(k)] = phi[at(j, k)];
      fft::inverse(buf, std::span<double>(p.data() + j * M, M));
      for (int k = 0; k < n / 2; ++k) buf[static_cast<size_t>(k)] *= Complex(0.0, kappa[static_cast<size_t>(k)]);
      fft::inverse(buf, std::span<double>(d.data() + j * M, M));
    }
    std::vector<double> g(static_cast<size_t>(cells) * M), h(static_cast<size_t>(cells) * M);
    for (int c = 0; c < cells; ++c) {
      const double* p0 = p.data() + c * M;
      const double* p1 = p0 + M;
      const double* d0 = d.data() + c * M;
      const double* d1 = d0 + M;
      const auto& a11 = a11m[static_cast<size_t>(c)];
      const auto& a12 = a12m[static_cast<size_t>(c)];
      const auto& a22 = a22m[static_cast<size_t>(c)];
      double* gc = g.data() + c * M;
      double* hc = h.data() + c * M;
      for (size_t i = 0; i < M; ++i) {
        const double dbar = 0.5 * (d0[i] + d1[i]);
        const double delta = (p0[i] - p1[i]) / dz;
        gc[i] = kMidpointWeight * a11[i] * dbar + a12[i] * delta;
        hc[i] = a12[i] * dbar + a22[i] * delta;
      }
    }
    std::vector<double> A(M), B(M);
    CVec ah(static_cast<size_t>(mm)), bh(static_cast<size_t>(mm));
    for (int j = 0; j < levels; ++j) {
      const int adjacent = (j > 0 ? 1 : 0) + (j < cells ? 1 : 0);
      const double omega = dz * kTrapezoidWeight / 2.0 * adjacent;
      const auto& a11 = a11n[static_cast<size_t>(j)];
      const double* dj = d.data() + j * M;
      for (size_t i = 0; i < M; ++i) {
        double a = omega * a11[i] * dj[i];
        double b = 0.0;
        if (j > 0) {
          a += 0.5 * dz * g[(j - 1) * M + i];
          b -= h[(j - 1) * M + i];
        }
        if (j < cells) {
          a += 0.5 * dz * g[j * M + i];
          b += h[j * M + i];
        }
        A[i] = a;
        B[i] = b;
      }
      fft::forward(A, ah);
      fft::forward(B, bh);
      for (int k = 0; k < n / 2; ++k)
        out[at(j, k)] = Complex(0.0, -kappa[static_cast<size_t>(k)]) * ah[static_cast<size_t>(k)] + bh[static_cast<size_t>(k)];
      out[at(j, n / 2)] = 0.0;
    }
  }

  double dot_interior(const CVec& a, const CVec& b) const {
    double s = 0.0;
    for (int j = 1; j < levels; ++j)
      for (int k = 0; k < nm; ++k) s += weight[static_cast<size_t>(k)] * std::real(std::conj(a[at(j, k)]) * b[at(j, k)]);
    return s;
  }

  void precondition(CVec& r) const {
    for (int j = 0; j < nm; ++j) r[at(0, j)] = 0.0;
    if (!use_precond) return;
    for (int k = 0; k < n / 2; ++k) precond[static_cast<size_t>(k)].solve(&r[at(1, k)], static_cast<size_t>(nm));
  }

  DNSolution solve(const SpectralField& f) const {
    const size_t total = static_cast<size_t>(levels) * static_cast<size_t>(nm);
    CVec phi(total, 0.0);
    for (int k = 1; k < n / 2; ++k) phi[at(0, k)] = f.coefficients()[static_cast<size_t>(k)];

    CVec kphi(total), r(total), z(total), p(total), q(total);
    apply_K(phi, kphi);
    for (size_t i = 0; i < total; ++i) r[i] = -kphi[i];
    for (int k = 0; k < nm; ++k) r[at(0, k)] = 0.0;

    int iterations = 0;
    double residual = 0.0;
    z = r;
    precondition(z);
    double rz = dot_interior(r, z);
    const double rz0 = rz;
    if (rz0 > 0.0) {
      p = z;
      CVec x(total, 0.0);
      const double target = tolerance * tolerance * rz0;
      while (rz > target) {
        if (iterations >= max_iterations)
          throw SolverError(fmt::format("DN solve: PCG did not converge in {} iterations (relative residual {:.3e})",
                                        iterations, std::sqrt(rz / rz0)),
                            iterations, std::sqrt(rz / rz0));
        apply_K(p, q);
        for (int k = 0; k < nm; ++k) q[at(0, k)] = 0.0;
        const double pq = dot_interior(p, q);
        if (!(pq > 0.0))
          throw SolverError("DN solve: operator lost positivity (non-admissible flattening?)", iterations,
                            std::sqrt(rz / rz0));
        const double alpha = rz / pq;
        for (size_t i = 0; i < total; ++i) {
          x[i] += alpha * p[i];
          r[i] -= alpha * q[i];
        }
        z = r;
        precondition(z);
        const double rz_new = dot_interior(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < total; ++i) p[i] = z[i] + beta * p[i];
        ++iterations;
      }
      residual = std::sqrt(std::max(rz, 0.0) / rz0);
      for (size_t i = static_cast<size_t>(nm); i < total; ++i) phi[i] = x[i];
    }
    apply_K(phi, kphi);

    DNSolution sol{SpectralField::zeros(grid), {}, iterations, residual};
    CVec g(static_cast<size_t>(nm), 0.0);
    for (int k = 1; k < n / 2; ++k) g[static_cast<size_t>(k)] = kphi[at(0, k)];
    sol.dn = SpectralField::from_coefficients(grid, std::move(g));
    const double mean = f.mean();
    for (int j = 0; j < levels; ++j) {
      CVec c(phi.begin() + static_cast<std::ptrdiff_t>(at(j, 0)), phi.begin() + static_cast<std::ptrdiff_t>(at(j, 0) + nm));
      c[0] = mean;
      sol.levels.push_back(SpectralField::from_coefficients(grid, std::move(c)));
    }
    return sol;
  }
};

namespace {

DomainSpec reflected_domain(const DomainSpec& dom) {
  DomainSpec r = dom;
  r.bottom = dom.top;
  r.top = Wall::vacuum();
  return r;
}

}  // namespace

DNOperator::DNOperator(const Interface& eta, Side side, const DomainSpec& dom, const EllipticSolveConfig& cfg)
    : eta_(eta), side_(side), cfg_(cfg) {
  cfg.validate();
  dom.validate();
  if (!dom.has_fluid(side)) throw PreconditionError("DN operator: no fluid above a vacuum interface");
  require_separation(eta, dom);
  const Interface lower_eta = side == Side::lower ? eta : Interface{-eta.height, eta.regularity};
  const DomainSpec lower_dom = side == Side::lower ? DomainSpec{dom.bottom, Wall::vacuum(), dom.separation,
                                                                dom.artificial_depth_factor}
                                                   : reflected_domain(dom);
  const double tau = initial_tau(lower_eta, dom.separation);
  FlatteningMap fm = build_flattening(lower_eta, lower_dom, tau, Side::lower,
                                      StripSampling{cfg.n_z, cfg.surface_scale});
  impl_ = std::make_shared<const Impl>(eta.grid(), std::move(fm), cfg);
}

DNSolution DNOperator::solve(const SpectralField& f) const {
  if (!(f.grid() == eta_.grid())) throw std::invalid_argument("DN operator: data on a different grid");
  DNSolution sol = impl_->solve(f);
  if (side_ == Side::upper) sol.dn = -sol.dn;
  return sol;
}

SpectralField DNOperator::apply(const SpectralField& f) const { return solve(f).dn; }

const FlatteningMap& DNOperator::map() const { return impl_->map; }

double DNOperator::flat_symbol(int k) const {
  k = std::abs(k);
  if (k > impl_->n / 2) throw std::out_of_range("flat_symbol: mode not represented");
  return impl_->flat[static_cast<size_t>(k)];
}

SpectralField dn_apply(const DNOperator& op, const SpectralField& f) { return op.apply(f); }

ThetaLift::ThetaLift(const SpectralField& v, const Interface& eta, double h) : v_(v), eta_(eta), h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("theta_lift: h must be positive");
  if (!(v.grid() == eta.grid())) throw std::invalid_argument("theta_lift: v and eta on different grids");
}

double ThetaLift::cutoff(double z) {
  const double a = std::abs(z);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double t = 2.0 * (a - 0.5);
  const double up = std::exp(-1.0 / t);
  const double down = std::exp(-1.0 / (1.0 - t));
  return down / (up + down);
}

namespace {

double evaluate_series(const SpectralField& f, double x, double decay_rate) {
  const PeriodicGrid& grid = f.grid();
  const int n = grid.size();
  double s = f.mean() * std::exp(-decay_rate);
  for (int k = 1; k <= n / 2; ++k) {
    const double kappa = grid.wavenumber(k);
    const double damp = std::exp(-decay_rate * japanese_bracket(kappa));
    const Complex c = f.coefficients()[static_cast<size_t>(k)];
    const double w = 2 * k == n ? 1.0 : 2.0;
    s += w * damp * std::real(c * std::exp(Complex(0.0, kappa * x)));
  }
  return s;
}

}  // namespace

double ThetaLift::at_node(int j, double z) const {
  const double c = cutoff(z);
  if (c == 0.0) return 0.0;
  return -0.5 * c * evaluate_series(v_, v_.grid().node(j), std::abs(z));
}

double ThetaLift::operator()(double x, double y) const {
  const double z = (y - evaluate_series(eta_.height, x, 0.0)) / h_;
  const double c = cutoff(z);
  if (c == 0.0) return 0.0;
  return -0.5 * c * evaluate_series(v_, x, std::abs(z));
}

ThetaLift theta_lift(const SpectralField& v, const Interface& eta, double h) { return ThetaLift(v, eta, h); }

namespace {

EllipticSolveConfig inner_config(const EllipticSolveConfig& cfg, bool two_phase) {
  EllipticSolveConfig c = cfg;
  if (two_phase) c.tolerance = std::max(1e-14, 1e-2 * cfg.tolerance);
  return c;
}

}  // namespace

InterfaceOperators::InterfaceOperators(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                                       const EllipticSolveConfig& cfg)
    : params_(params),
      cfg_(cfg),
      lower_(eta, Side::lower, dom, inner_config(cfg, !params.one_phase())) {
  params.validate(dom);
  if (!params.one_phase()) upper_.emplace(eta, Side::upper, dom, inner_config(cfg, true));
}

double InterfaceOperators::flat_L_symbol(int k) const {
  if (k == 0) return 0.0;
  const double gm = lower_.flat_symbol(k);
  if (!upper_) return gm;
  const double gp = upper_->flat_symbol(k);
  const double mp = params_.mu_plus, mm = params_.mu_minus;
  return (mp + mm) * gm * gp / (mp * gm + mm * gp);
}

JumpSplit InterfaceOperators::split(const SpectralField& v) const {
  const PeriodicGrid& grid = v.grid();
  if (!upper_) {
    return JumpSplit{v, SpectralField::zeros(grid), lower_.apply(v), SpectralField::zeros(grid), 0, 0.0};
  }
  const double mp = params_.mu_plus, mm = params_.mu_minus;
  const double mean = v.mean();
  const SpectralField v0 = v + (-mean);
  const double vnorm = l2_norm(v);
  const SpectralField gp_v = upper_->apply(v0);
  const SpectralField rhs = -mm * gp_v;

  const int nm = grid.n_modes();
  std::vector<double> inv_symbol(static_cast<size_t>(nm), 0.0);
  for (int k = 1; k < nm; ++k) {
    const double s = mp * lower_.flat_symbol(k) + mm * upper_->flat_symbol(k);
    if (s > 0.0) inv_symbol[static_cast<size_t>(k)] = 1.0 / s;
  }
  auto precondition = [&](const SpectralField& r) {
    CVec c(r.coefficients().begin(), r.coefficients().end());
    for (int k = 0; k < nm; ++k) c[static_cast<size_t>(k)] *= inv_symbol[static_cast<size_t>(k)];
    return SpectralField::from_coefficients(grid, std::move(c));
  };

  SpectralField x = SpectralField::zeros(grid);
  SpectralField gm_x = x, gp_x = x;
  SpectralField r = rhs;
  double rnorm = l2_norm(r);
  const double target = cfg_.tolerance * vnorm;
  int it = 0;
  if (rnorm > target) {
    SpectralField z = precondition(r);
    SpectralField p = z;
    double rz = inner_product(r, z);
    while (rnorm > target) {
      if (it >= cfg_.max_iterations)
        throw SolverError(fmt::format("two-phase split: CG did not converge in {} iterations (residual {:.3e})", it,
                                      rnorm / std::max(vnorm, 1e-300)),
                          it, rnorm);
      const SpectralField gm_p = lower_.apply(p);
      const SpectralField gp_p = upper_->apply(p);
      const SpectralField sp = mp * gm_p - mm * gp_p;
      const double psp = inner_product(p, sp);
      if (!(psp > 0.0)) throw SolverError("two-phase split: Schur operator not positive", it, rnorm);
      const double alpha = rz / psp;
      x = x + alpha * p;
      gm_x = gm_x + alpha * gm_p;
      gp_x = gp_x + alpha * gp_p;
      r = r - alpha * sp;
      rnorm = l2_norm(r);
      z = precondition(r);
      const double rz_new = inner_product(r, z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
      ++it;
    }
  }
  SpectralField lower = x + mean;
  SpectralField upper = lower - v;
  return JumpSplit{std::move(lower), std::move(upper), gm_x, gp_x - gp_v, it,
                   vnorm > 0.0 ? rnorm / vnorm : 0.0};
}

SpectralField InterfaceOperators::L(const SpectralField& f) const {
  const JumpSplit s = split(f);
  return s.dn_lower + s.dn_upper;
}

SpectralField InterfaceOperators::L_lower_form(const SpectralField& f) const {
  const JumpSplit s = split(f);
  return (params_.mu_sum() / params_.mu_minus) * s.dn_lower;
}

std::pair<SpectralField, SpectralField> solve_two_phase(const Interface& eta, const SpectralField& v,
                                                        const FluidParams& params, const DomainSpec& dom,
                                                        const EllipticSolveConfig& cfg) {
  params.validate(dom);
  if (params.one_phase()) return {v, SpectralField::zeros(v.grid())};
  InterfaceOperators ops(eta, params, dom, cfg);
  JumpSplit s = ops.split(v);
  return {std::move(s.lower), std::move(s.upper)};
}

SpectralField operator_L(const Interface& eta, const SpectralField& f, const FluidParams& params,
                         const DomainSpec& dom, const EllipticSolveConfig& cfg) {
  return InterfaceOperators(eta, params, dom, cfg).L(f);
}

}  // namespace muskat
