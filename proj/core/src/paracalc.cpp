#include "muskat/paracalc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <fmt/format.h>
#include <random>
#include <set>

#include "muskat/errors.hpp"
#include "muskat/fft.hpp"
#include "muskat/stats.hpp"

namespace muskat {
namespace {

int index_of(int k, int n) { return k + n / 2 - 1; }

// C^2 smoothstep from 0 at t <= 0 to 1 at t >= 1.
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// x-Fourier coefficients of complex samples, full spectrum.
FullSpectrum dft(std::span<const Complex> samples) {
  const int n = static_cast<int>(samples.size());
  std::vector<double> re(static_cast<size_t>(n)), im(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    re[static_cast<size_t>(j)] = samples[static_cast<size_t>(j)].real();
    im[static_cast<size_t>(j)] = samples[static_cast<size_t>(j)].imag();
  }
  std::vector<Complex> cr(static_cast<size_t>(n / 2 + 1)), ci(static_cast<size_t>(n / 2 + 1));
  fft::forward(re, cr);
  fft::forward(im, ci);
  FullSpectrum out(static_cast<size_t>(n));
  const Complex i(0.0, 1.0);
  for (int k = -n / 2 + 1; k <= n / 2; ++k) {
    const size_t a = static_cast<size_t>(std::abs(k));
    const Complex r = k >= 0 ? cr[a] : std::conj(cr[a]);
    const Complex s = k >= 0 ? ci[a] : std::conj(ci[a]);
    out[static_cast<size_t>(index_of(k, n))] = r + i * s;
  }
  // The Nyquist mode is a real cosine; keep it as is.
  return out;
}

}  // namespace

FullSpectrum to_full(const SpectralField& f) {
  const int n = f.grid().size();
  FullSpectrum c(static_cast<size_t>(n));
  for (int k = -n / 2 + 1; k <= n / 2; ++k) c[static_cast<size_t>(index_of(k, n))] = f.coefficient(k);
  return c;
}

SpectralField real_part(const PeriodicGrid& grid, const FullSpectrum& c) {
  const int n = grid.size();
  if (c.size() != static_cast<size_t>(n)) throw std::invalid_argument("real_part: spectrum size mismatch");
  std::vector<Complex> half(static_cast<size_t>(grid.n_modes()));
  half[0] = c[static_cast<size_t>(index_of(0, n))].real();
  for (int k = 1; k < n / 2; ++k)
    half[static_cast<size_t>(k)] =
        0.5 * (c[static_cast<size_t>(index_of(k, n))] + std::conj(c[static_cast<size_t>(index_of(-k, n))]));
  half[static_cast<size_t>(n / 2)] = c[static_cast<size_t>(index_of(n / 2, n))].real();
  return SpectralField::from_coefficients(grid, std::move(half));
}

FullSpectrum unit_mode(const PeriodicGrid& grid, int k) {
  const int n = grid.size();
  if (k <= -n / 2 || k > n / 2) throw std::out_of_range("unit_mode: wavenumber not represented");
  FullSpectrum c(static_cast<size_t>(n), 0.0);
  c[static_cast<size_t>(index_of(k, n))] = 1.0 / std::sqrt(grid.length());
  return c;
}

Complex inner_product(const PeriodicGrid& grid, const FullSpectrum& a, const FullSpectrum& b) {
  Complex s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(b[i]) * a[i];
  return grid.length() * s;
}

double l2_norm(const PeriodicGrid& grid, const FullSpectrum& c) {
  return std::sqrt(std::max(0.0, inner_product(grid, c, c).real()));
}

double CutoffPair::psi(double xi) const {
  return smoothstep((std::abs(xi) - psi_low) / (psi_high - psi_low));
}

double CutoffPair::chi(double theta, double xi) const {
  const double a = std::abs(theta), b = std::abs(xi);
  if (b == 0.0) return a == 0.0 ? 1.0 : 0.0;
  return 1.0 - smoothstep((a / b - eps1) / (eps2 - eps1));
}

void CutoffPair::validate() const {
  if (!(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0)) throw ValidationError("cutoff: need 0 < eps1 < eps2 < 1");
  if (!(0.0 < psi_low && psi_low < psi_high)) throw ValidationError("cutoff: need 0 < psi_low < psi_high");
}

ParaSymbol::ParaSymbol(const PeriodicGrid& grid, double order, double regularity, std::vector<Complex> table)
    : grid_(grid), order_(order), regularity_(regularity), table_(std::move(table)) {
  const int n = grid.size();
  for (const Complex& v : table_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("ParaSymbol: non-finite sample");
    if (v.imag() != 0.0) real_ = false;
  }
  for (int k = 1; k < n / 2 && hermitian_; ++k)
    for (int j = 0; j < n; ++j)
      if (std::abs(at(j, -k) - std::conj(at(j, k))) > 1e-13 * (1.0 + std::abs(at(j, k)))) {
        hermitian_ = false;
        break;
      }
  for (int j = 0; j < n && hermitian_; ++j)
    if (std::abs(at(j, 0).imag()) > 1e-13 * (1.0 + std::abs(at(j, 0)))) hermitian_ = false;
}

ParaSymbol ParaSymbol::from_function(const PeriodicGrid& grid, double order, double regularity, const Function& a) {
  const int n = grid.size();
  std::vector<Complex> t(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int k = -n / 2 + 1; k <= n / 2; ++k)
    for (int j = 0; j < n; ++j)
      t[static_cast<size_t>(index_of(k, n)) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
          a(grid.node(j), grid.wavenumber(k));
  return ParaSymbol(grid, order, regularity, std::move(t));
}

ParaSymbol ParaSymbol::from_fields(const PeriodicGrid& grid, double order, double regularity,
                                   const std::function<SpectralField(double xi)>& a) {
  const int n = grid.size();
  std::vector<Complex> t(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int k = -n / 2 + 1; k <= n / 2; ++k) {
    const SpectralField f = a(grid.wavenumber(k));
    for (int j = 0; j < n; ++j)
      t[static_cast<size_t>(index_of(k, n)) * static_cast<size_t>(n) + static_cast<size_t>(j)] = f[j];
  }
  return ParaSymbol(grid, order, regularity, std::move(t));
}

Complex ParaSymbol::at(int j, int k) const {
  const int n = grid_.size();
  return table_[static_cast<size_t>(index_of(k, n)) * static_cast<size_t>(n) + static_cast<size_t>(j)];
}

ParaSymbol ParaSymbol::conjugate() const {
  std::vector<Complex> t(table_);
  for (auto& v : t) v = std::conj(v);
  return ParaSymbol(grid_, order_, regularity_, std::move(t));
}

ParaSymbol ParaSymbol::times(const ParaSymbol& b) const {
  if (!(grid_ == b.grid_)) throw std::invalid_argument("ParaSymbol::times: different grids");
  std::vector<Complex> t(table_);
  for (size_t i = 0; i < t.size(); ++i) t[i] *= b.table_[i];
  return ParaSymbol(grid_, order_ + b.order_, std::min(regularity_, b.regularity_), std::move(t));
}

ParaOperator::ParaOperator(const PeriodicGrid& grid)
    : grid_(grid), n_(grid.size()), m_(static_cast<size_t>(n_) * static_cast<size_t>(n_), 0.0) {}

ParaOperator::ParaOperator(const ParaSymbol& a, const CutoffPair& cut) : ParaOperator(a.grid()) {
  cut.validate();
  const int n = n_;
  std::vector<Complex> column(static_cast<size_t>(n));
  for (int eta = -n / 2 + 1; eta <= n / 2; ++eta) {
    const double xi_eta = grid_.wavenumber(eta);
    const double psi = cut.psi(xi_eta);
    if (psi == 0.0) continue;
    for (int j = 0; j < n; ++j) column[static_cast<size_t>(j)] = a.at(j, eta);
    const FullSpectrum ahat = dft(column);
    for (int theta = -n / 2 + 1; theta <= n / 2; ++theta) {
      const int xi = theta + eta;
      if (xi <= -n / 2 || xi > n / 2) continue;
      const double chi = cut.chi(grid_.wavenumber(theta), xi_eta);
      if (chi == 0.0) continue;
      m_[static_cast<size_t>(index_of(xi, n)) * static_cast<size_t>(n) + static_cast<size_t>(index_of(eta, n))] +=
          chi * ahat[static_cast<size_t>(index_of(theta, n))] * psi;
    }
  }
}

Complex ParaOperator::entry(int xi, int eta) const {
  return m_[static_cast<size_t>(index_of(xi, n_)) * static_cast<size_t>(n_) + static_cast<size_t>(index_of(eta, n_))];
}

FullSpectrum ParaOperator::apply(const FullSpectrum& u) const {
  if (u.size() != static_cast<size_t>(n_)) throw std::invalid_argument("ParaOperator::apply: size mismatch");
  FullSpectrum out(static_cast<size_t>(n_), 0.0);
  for (int r = 0; r < n_; ++r) {
    Complex s = 0.0;
    const Complex* row = m_.data() + static_cast<size_t>(r) * static_cast<size_t>(n_);
    for (int c = 0; c < n_; ++c) s += row[c] * u[static_cast<size_t>(c)];
    out[static_cast<size_t>(r)] = s;
  }
  return out;
}

SpectralField ParaOperator::apply(const SpectralField& u) const { return real_part(grid_, apply(to_full(u))); }

ParaOperator ParaOperator::adjoint() const {
  ParaOperator t(grid_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      t.m_[static_cast<size_t>(c) * static_cast<size_t>(n_) + static_cast<size_t>(r)] =
          std::conj(m_[static_cast<size_t>(r) * static_cast<size_t>(n_) + static_cast<size_t>(c)]);
  return t;
}

ParaOperator ParaOperator::compose(const ParaOperator& right) const {
  ParaOperator t(grid_);
  const size_t n = static_cast<size_t>(n_);
  for (size_t r = 0; r < n; ++r)
    for (size_t k = 0; k < n; ++k) {
      const Complex a = m_[r * n + k];
      if (a == Complex(0.0)) continue;
      const Complex* rb = right.m_.data() + k * n;
      Complex* out = t.m_.data() + r * n;
      for (size_t c = 0; c < n; ++c) out[c] += a * rb[c];
    }
  return t;
}

ParaOperator ParaOperator::operator-(const ParaOperator& other) const {
  ParaOperator t(*this);
  for (size_t i = 0; i < t.m_.size(); ++i) t.m_[i] -= other.m_[i];
  return t;
}

FullSpectrum paradiff_apply(const ParaSymbol& a, const FullSpectrum& u, const CutoffPair& cut) {
  return ParaOperator(a, cut).apply(u);
}

SpectralField paradiff_apply(const ParaSymbol& a, const SpectralField& u, const CutoffPair& cut) {
  if (!a.preserves_real())
    throw SymmetryError("paradiff_apply: a(x,-xi) != conj a(x,xi); T_a u is not real");
  return ParaOperator(a, cut).apply(u);
}

std::vector<int> default_probes() { return {8, 12, 16, 24, 32}; }

OrderFit fit_order(std::span<const int> probes, std::span<const double> norms) {
  const std::set<int> distinct(probes.begin(), probes.end());
  if (distinct.size() < 4 || distinct.size() != probes.size())
    throw std::invalid_argument("order fit: need at least 4 distinct probe wavenumbers");
  if (*distinct.begin() <= 0) throw std::invalid_argument("order fit: probe wavenumbers must be positive");
  if (*distinct.rbegin() < 4 * *distinct.begin()) throw std::invalid_argument("order fit: need max/min >= 4");
  OrderFit fit;
  fit.probes.assign(probes.begin(), probes.end());
  fit.norms.assign(norms.begin(), norms.end());
  std::vector<double> lx, ly;
  for (size_t i = 0; i < probes.size(); ++i)
    if (norms[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(probes[i])));
      ly.push_back(std::log(norms[i]));
    }
  if (lx.size() < 2) {
    fit.degenerate = true;
    fit.order = kOrderNegativeInfinity;
    return fit;
  }
  const LinearFit lf = least_squares(lx, ly);
  fit.order = lf.slope;
  fit.intercept = lf.intercept;
  return fit;
}

OrderFit operator_order_fit(const std::function<FullSpectrum(const FullSpectrum&)>& T, const PeriodicGrid& grid,
                            std::span<const int> probes) {
  std::vector<double> norms;
  for (int k : probes) norms.push_back(l2_norm(grid, T(unit_mode(grid, k))));
  return fit_order(probes, norms);
}

OrderFit operator_order_fit(const std::function<SpectralField(const SpectralField&)>& T, const PeriodicGrid& grid,
                            std::span<const int> probes) {
  std::vector<double> norms;
  const double scale = 1.0 / std::sqrt(0.5 * grid.length());
  for (int k : probes) {
    const double kappa = grid.wavenumber(k);
    const SpectralField e =
        SpectralField::from_function(grid, [&](double x) { return scale * std::cos(kappa * x); });
    norms.push_back(l2_norm(T(e)));
  }
  return fit_order(probes, norms);
}

GardingReport garding_check(const ParaSymbol& a, double m, double c, int samples, std::uint64_t seed,
                            const CutoffPair& cut) {
  if (samples < 2) throw std::invalid_argument("garding_check: need at least 2 samples");
  const PeriodicGrid& grid = a.grid();
  const int n = grid.size();
  GardingReport rep;
  rep.samples = samples;
  rep.ellipticity = std::numeric_limits<double>::infinity();
  for (int k = -n / 2 + 1; k <= n / 2; ++k) {
    const double w = std::pow(std::abs(grid.wavenumber(k)), m);
    for (int j = 0; j < n; ++j) {
      const double re = a.at(j, k).real();
      if (re < c * w - 1e-12 * (1.0 + c * w))
        throw PreconditionError(fmt::format(
            "garding_check: ellipticity Re a >= c|xi|^m fails at x = {:.4g}, xi = {:.4g} (Re a = {:.6g})",
            grid.node(j), grid.wavenumber(k), re));
      if (k != 0) rep.ellipticity = std::min(rep.ellipticity, re / w);
    }
  }

  const ParaOperator T(a, cut);
  const double r = a.regularity();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> degree(1, std::max(1, grid.dealias_cutoff()));
  std::uniform_real_distribution<double> decay(0.0, 2.0);
  std::normal_distribution<double> normal;

  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int K = degree(rng);
    const double p = decay(rng);
    std::vector<Complex> half(static_cast<size_t>(grid.n_modes()), 0.0);
    for (int k = 1; k <= K; ++k) {
      const double amp = std::pow(1.0 + k, -p);
      half[static_cast<size_t>(k)] = amp * Complex(normal(rng), normal(rng));
    }
    const SpectralField u = SpectralField::from_coefficients(grid, std::move(half));
    const FullSpectrum uf = to_full(u);
    double lhs = 0.0, lower = 0.0;
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
      const double xi = grid.wavenumber(k);
      const double br = 1.0 + xi * xi;
      const double u2 = std::norm(uf[static_cast<size_t>(index_of(k, n))]);
      lhs += std::pow(cut.psi(xi), 2) * std::pow(br, m / 2.0) * u2;
      lower += std::pow(br, (m - r) / 2.0) * u2;
    }
    lhs *= grid.length();
    lower *= grid.length();
    const double rhs = inner_product(grid, T.apply(uf), uf).real() + lower;
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    best = std::max(best, ratio);
    if (s + 1 == samples / 2) rep.constant_half = best;
  }
  rep.constant = best;
  rep.stable = std::isfinite(best) && best <= 1.1 * rep.constant_half;
  return rep;
}

ParalinResult paralin_residual_dn(const DNOperator& lower, const SpectralField& f, std::span<const int> probes,
                                  const CutoffPair& cut) {
  if (lower.side() != Side::lower) throw std::invalid_argument("paralin_residual_dn: lower-side operator expected");
  const Interface& eta = lower.interface();
  const ParaSymbol lambda = ParaSymbol::from_fields(eta.grid(), 1.0, eta.regularity - 1.0,
                                                    [&](double xi) { return symbol_lambda(eta, xi); });
  const ParaOperator T(lambda, cut);
  auto residual = [&](const SpectralField& g) { return lower.apply(g) - T.apply(g); };
  return ParalinResult{residual(f), operator_order_fit(residual, eta.grid(), probes)};
}

ParalinResult paralin_residual_curvature(const Interface& eta, std::span<const double> amplitudes,
                                         const CutoffPair& cut) {
  auto residual = [&](const Interface& e) {
    const ParaSymbol l = ParaSymbol::from_fields(e.grid(), 2.0, e.regularity - 1.0,
                                                 [&](double xi) { return symbol_l(e, xi); });
    return curvature(e) - paradiff_apply(l, e.height, cut);
  };
  ParalinResult res{residual(eta), {}};
  std::vector<double> lx, ly;
  for (double a : amplitudes) {
    const double nr = l2_norm(residual(Interface{a * eta.height, eta.regularity}));
    res.fit.norms.push_back(nr);
    if (a > 0.0 && nr > 0.0) {
      lx.push_back(std::log(a));
      ly.push_back(std::log(nr));
    }
  }
  if (lx.size() < 2) {
    res.fit.degenerate = true;
    res.fit.order = kOrderNegativeInfinity;
  } else {
    const LinearFit lf = least_squares(lx, ly);
    res.fit.order = lf.slope;
    res.fit.intercept = lf.intercept;
  }
  return res;
}

void write_residual_csv(const OrderFit& fit, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "probe_k,residual_norm,fitted_order\n";
  for (size_t i = 0; i < fit.probes.size(); ++i)
    out << fmt::format("{},{:.17g},{:.17g}\n", fit.probes[i], fit.norms[i], fit.order);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace muskat
