#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace muskat {

/// Uniform periodic grid x_j = j * length / n_points, j = 0..n_points-1.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int n_points, double length = 2.0 * std::numbers::pi);

  int size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double node(int j) const { return j * spacing(); }

  /// Number of stored half-spectrum coefficients, n/2 + 1.
  int n_modes() const { return n_ / 2 + 1; }
  /// Physical wavenumber of integer mode k.
  double wavenumber(int k) const { return 2.0 * std::numbers::pi * k / length_; }
  /// Largest mode kept by the 2/3 rule.
  int dealias_cutoff() const { return n_ / 3; }
  /// Size of the 3/2-padded quadrature grid used for pointwise products.
  int padded_size() const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  int n_;
  double length_;
};

/// Real periodic field held both as grid samples and as Fourier coefficients.
///
/// Coefficients are normalized by 1/length in the continuum sense, i.e.
///   f(x) = sum_k c_k exp(i kappa_k x),  c_k = (1/n) sum_j f_j exp(-i kappa_k x_j),
/// and only k = 0..n/2 are stored (c_{-k} = conj(c_k)). Fields are immutable.
class SpectralField {
 public:
  using Complex = std::complex<double>;

  static SpectralField zeros(const PeriodicGrid& grid);
  static SpectralField from_values(const PeriodicGrid& grid, std::vector<double> values);
  /// Half-spectrum coefficients; imaginary parts of k = 0 and the Nyquist mode are dropped.
  static SpectralField from_coefficients(const PeriodicGrid& grid, std::vector<Complex> coeffs);
  static SpectralField from_function(const PeriodicGrid& grid, const std::function<double(double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const Complex> coefficients() const { return coeffs_; }
  double operator[](int j) const { return values_[static_cast<size_t>(j)]; }
  /// Coefficient of integer wavenumber k in {-n/2+1, ..., n/2}.
  Complex coefficient(int k) const;

  double mean() const { return coeffs_[0].real(); }
  double min() const;
  double max() const;
  double max_abs() const;

  /// k-th spectral derivative. Odd derivatives drop the Nyquist mode.
  SpectralField derivative(int order = 1) const;
  /// Zero all modes with |k| > cutoff.
  SpectralField truncated(int cutoff) const;
  /// Shift samples by `shift` nodes: result[j] = this[j - shift].
  SpectralField shifted(int shift) const;
  /// Reflection x -> -x on the grid: result[j] = this[-j mod n].
  SpectralField reflected() const;

  SpectralField operator-() const;
  friend SpectralField operator+(const SpectralField& a, const SpectralField& b);
  friend SpectralField operator-(const SpectralField& a, const SpectralField& b);
  friend SpectralField operator*(double s, const SpectralField& a);
  friend SpectralField operator+(const SpectralField& a, double c);

 private:
  SpectralField(const PeriodicGrid& grid, std::vector<double> values, std::vector<Complex> coeffs);

  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<Complex> coeffs_;
};

/// <x> = sqrt(1 + x^2).
inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Continuum inner product int f g dx, exact for band-limited data.
double inner_product(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);

using Multiplier = std::function<std::complex<double>(double)>;

/// Fourier multiplier: output coefficient m(kappa_k) * c_k, kappa the physical
/// wavenumber. Throws SymmetryError when m(-kappa) != conj(m(kappa)) for some
/// represented mode, since the output would not be real.
SpectralField apply_multiplier(const Multiplier& m, const SpectralField& f);

/// ||f||_{H^sigma} = (length * sum_k <kappa_k>^{2 sigma} |c_k|^2)^{1/2}.
double sobolev_norm(const SpectralField& f, double sigma);

/// exp(-tau |zeta| <D>) f. Throws std::invalid_argument for tau < 0.
SpectralField smoothing_semigroup(double tau, double zeta, const SpectralField& f);

// Dealiased pointwise operations: inputs are interpolated to the 3/2-padded
// grid, combined there, and truncated back to |k| < n/2.

/// Samples of `f` on the padded grid.
std::vector<double> padded_values(const SpectralField& f);
/// Field whose coefficients are the |k| < n/2 part of the padded samples.
SpectralField from_padded(const PeriodicGrid& grid, std::span<const double> padded);

SpectralField product(const SpectralField& a, const SpectralField& b);

template <class F>
SpectralField dealiased_map(F&& fn, const SpectralField& a) {
  std::vector<double> pa = padded_values(a);
  for (double& v : pa) v = fn(v);
  return from_padded(a.grid(), pa);
}

template <class F>
SpectralField dealiased_map(F&& fn, const SpectralField& a, const SpectralField& b) {
  std::vector<double> pa = padded_values(a);
  const std::vector<double> pb = padded_values(b);
  for (size_t i = 0; i < pa.size(); ++i) pa[i] = fn(pa[i], pb[i]);
  return from_padded(a.grid(), pa);
}

}  // namespace muskat
