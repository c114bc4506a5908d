#include "muskat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "muskat/errors.hpp"
#include "muskat/fft.hpp"

namespace muskat {
namespace {

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

// Weight of a stored half-spectrum coefficient in sums over the full spectrum.
double mode_weight(int k, int n) { return (k == 0 || 2 * k == n) ? 1.0 : 2.0; }

}  // namespace

PeriodicGrid::PeriodicGrid(int n_points, double length) : n_(n_points), length_(length) {
  if (n_points < 8 || n_points % 2 != 0)
    throw std::invalid_argument("PeriodicGrid: n_points must be even and >= 8");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("PeriodicGrid: length must be positive");
}

int PeriodicGrid::padded_size() const {
  const int m = (3 * n_ + 1) / 2;
  return m + (m % 2);
}

SpectralField::SpectralField(const PeriodicGrid& grid, std::vector<double> values,
                             std::vector<Complex> coeffs)
    : grid_(grid), values_(std::move(values)), coeffs_(std::move(coeffs)) {}

SpectralField SpectralField::zeros(const PeriodicGrid& grid) {
  return SpectralField(grid, std::vector<double>(static_cast<size_t>(grid.size()), 0.0),
                       std::vector<Complex>(static_cast<size_t>(grid.n_modes()), 0.0));
}

SpectralField SpectralField::from_values(const PeriodicGrid& grid, std::vector<double> values) {
  if (values.size() != static_cast<size_t>(grid.size()))
    throw std::invalid_argument("from_values: sample count does not match grid");
  std::vector<Complex> coeffs(static_cast<size_t>(grid.n_modes()));
  fft::forward(values, coeffs);
  return SpectralField(grid, std::move(values), std::move(coeffs));
}

SpectralField SpectralField::from_coefficients(const PeriodicGrid& grid, std::vector<Complex> coeffs) {
  if (coeffs.size() != static_cast<size_t>(grid.n_modes()))
    throw std::invalid_argument("from_coefficients: expected n/2+1 coefficients");
  coeffs.front() = coeffs.front().real();
  coeffs.back() = coeffs.back().real();
  std::vector<double> values(static_cast<size_t>(grid.size()));
  fft::inverse(coeffs, values);
  return SpectralField(grid, std::move(values), std::move(coeffs));
}

SpectralField SpectralField::from_function(const PeriodicGrid& grid,
                                           const std::function<double(double)>& f) {
  std::vector<double> values(static_cast<size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) values[static_cast<size_t>(j)] = f(grid.node(j));
  return from_values(grid, std::move(values));
}

SpectralField::Complex SpectralField::coefficient(int k) const {
  const int n = grid_.size();
  if (k <= -n / 2 || k > n / 2) throw std::out_of_range("wavenumber not represented");
  return k >= 0 ? coeffs_[static_cast<size_t>(k)] : std::conj(coeffs_[static_cast<size_t>(-k)]);
}

double SpectralField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SpectralField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double SpectralField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField SpectralField::derivative(int order) const {
  if (order < 0) throw std::invalid_argument("derivative order must be nonnegative");
  std::vector<Complex> c(coeffs_);
  const Complex i(0.0, 1.0);
  for (int k = 0; k < grid_.n_modes(); ++k) {
    Complex factor = 1.0;
    const double kappa = grid_.wavenumber(k);
    for (int p = 0; p < order; ++p) factor *= i * kappa;
    c[static_cast<size_t>(k)] *= factor;
  }
  if (order % 2 == 1) c.back() = 0.0;
  return from_coefficients(grid_, std::move(c));
}

SpectralField SpectralField::truncated(int cutoff) const {
  std::vector<Complex> c(coeffs_);
  for (int k = std::max(cutoff + 1, 0); k < grid_.n_modes(); ++k) c[static_cast<size_t>(k)] = 0.0;
  return from_coefficients(grid_, std::move(c));
}

SpectralField SpectralField::shifted(int shift) const {
  const int n = grid_.size();
  std::vector<double> v(values_.size());
  for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = values_[static_cast<size_t>(((j - shift) % n + n) % n)];
  return from_values(grid_, std::move(v));
}

SpectralField SpectralField::reflected() const {
  const int n = grid_.size();
  std::vector<double> v(values_.size());
  for (int j = 0; j < n; ++j) v[static_cast<size_t>(j)] = values_[static_cast<size_t>((n - j) % n)];
  return from_values(grid_, std::move(v));
}

SpectralField SpectralField::operator-() const { return -1.0 * (*this); }

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.values_);
  std::vector<SpectralField::Complex> c(a.coeffs_);
  for (size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
  for (size_t i = 0; i < c.size(); ++i) c[i] += b.coeffs_[i];
  return SpectralField(a.grid_, std::move(v), std::move(c));
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) { return a + (-1.0) * b; }

SpectralField operator*(double s, const SpectralField& a) {
  std::vector<double> v(a.values_);
  std::vector<SpectralField::Complex> c(a.coeffs_);
  for (double& x : v) x *= s;
  for (auto& x : c) x *= s;
  return SpectralField(a.grid_, std::move(v), std::move(c));
}

SpectralField operator+(const SpectralField& a, double c0) {
  std::vector<double> v(a.values_);
  std::vector<SpectralField::Complex> c(a.coeffs_);
  for (double& x : v) x += c0;
  c[0] += c0;
  return SpectralField(a.grid_, std::move(v), std::move(c));
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g);
  const int n = f.grid().size();
  double s = 0.0;
  for (int k = 0; k < f.grid().n_modes(); ++k)
    s += mode_weight(k, n) * std::real(std::conj(f.coefficients()[static_cast<size_t>(k)]) *
                                       g.coefficients()[static_cast<size_t>(k)]);
  return f.grid().length() * s;
}

double l2_norm(const SpectralField& f) { return std::sqrt(std::max(0.0, inner_product(f, f))); }

SpectralField apply_multiplier(const Multiplier& m, const SpectralField& f) {
  const PeriodicGrid& grid = f.grid();
  const int n = grid.size();
  std::vector<std::complex<double>> c(f.coefficients().begin(), f.coefficients().end());
  for (int k = 0; k < grid.n_modes(); ++k) {
    const double kappa = grid.wavenumber(k);
    const std::complex<double> mp = m(kappa);
    const std::complex<double> mm = m(-kappa);
    if (!std::isfinite(mp.real()) || !std::isfinite(mp.imag()))
      throw std::invalid_argument("apply_multiplier: multiplier not finite at a represented mode");
    if (std::abs(mm - std::conj(mp)) > 1e-12 * (1.0 + std::abs(mp)))
      throw SymmetryError("apply_multiplier: m(-k) != conj(m(k)); output would not be real");
    // The Nyquist mode is a real cosine, so only the symmetric part of m acts on it.
    const std::complex<double> factor = (2 * k == n) ? std::complex<double>(mp.real()) : mp;
    c[static_cast<size_t>(k)] *= factor;
  }
  return SpectralField::from_coefficients(grid, std::move(c));
}

double sobolev_norm(const SpectralField& f, double sigma) {
  const PeriodicGrid& grid = f.grid();
  double s = 0.0;
  for (int k = 0; k < grid.n_modes(); ++k) {
    const double w = std::pow(1.0 + grid.wavenumber(k) * grid.wavenumber(k), sigma);
    s += mode_weight(k, grid.size()) * w * std::norm(f.coefficients()[static_cast<size_t>(k)]);
  }
  return std::sqrt(grid.length() * s);
}

SpectralField smoothing_semigroup(double tau, double zeta, const SpectralField& f) {
  if (!(tau >= 0.0)) throw std::invalid_argument("smoothing_semigroup: tau must be nonnegative");
  const double rate = tau * std::abs(zeta);
  return apply_multiplier([rate](double k) { return std::exp(-rate * japanese_bracket(k)); }, f);
}

std::vector<double> padded_values(const SpectralField& f) {
  const PeriodicGrid& grid = f.grid();
  const int m = grid.padded_size();
  std::vector<std::complex<double>> c(static_cast<size_t>(m / 2 + 1), 0.0);
  const auto src = f.coefficients();
  const int nyq = grid.size() / 2;
  for (int k = 0; k < nyq; ++k) c[static_cast<size_t>(k)] = src[static_cast<size_t>(k)];
  // Coarse Nyquist sample pattern is cos(n/2 x); split it evenly between +-n/2.
  c[static_cast<size_t>(nyq)] = 0.5 * src[static_cast<size_t>(nyq)];
  std::vector<double> out(static_cast<size_t>(m));
  fft::inverse(c, out);
  return out;
}

SpectralField from_padded(const PeriodicGrid& grid, std::span<const double> padded) {
  const int m = grid.padded_size();
  if (padded.size() != static_cast<size_t>(m)) throw std::invalid_argument("from_padded: wrong length");
  std::vector<std::complex<double>> fine(static_cast<size_t>(m / 2 + 1));
  fft::forward(padded, fine);
  std::vector<std::complex<double>> c(static_cast<size_t>(grid.n_modes()), 0.0);
  for (int k = 0; k < grid.size() / 2; ++k) c[static_cast<size_t>(k)] = fine[static_cast<size_t>(k)];
  return SpectralField::from_coefficients(grid, std::move(c));
}

SpectralField product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b);
  return dealiased_map([](double x, double y) { return x * y; }, a, b);
}

}  // namespace muskat
