#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "muskat/elliptic.hpp"

namespace muskat {

using Complex = std::complex<double>;

/// Full spectrum of a (possibly complex) periodic function: entry i holds the
/// coefficient of wavenumber k = i - n/2 + 1, k in {-n/2+1, ..., n/2}.
using FullSpectrum = std::vector<Complex>;

FullSpectrum to_full(const SpectralField& f);
/// Real part of the function with spectrum `c`.
SpectralField real_part(const PeriodicGrid& grid, const FullSpectrum& c);
/// Single-mode probe exp(i k x) / sqrt(length), unit in L^2.
FullSpectrum unit_mode(const PeriodicGrid& grid, int k);
double l2_norm(const PeriodicGrid& grid, const FullSpectrum& c);
Complex inner_product(const PeriodicGrid& grid, const FullSpectrum& a, const FullSpectrum& b);

/// Cutoffs of the Bony quantization: Psi kills |xi| <= psi_low and is 1 for
/// |xi| >= psi_high; chi(theta, xi) is 1 for |theta| <= eps1 |xi| and 0 for
/// |theta| >= eps2 |xi|. Both use a C^2 smoothstep transition.
struct CutoffPair {
  double eps1 = 0.1;
  double eps2 = 0.2;
  double psi_low = 0.2;
  double psi_high = 0.25;

  double psi(double xi) const;
  double chi(double theta, double xi) const;
  void validate() const;
};

/// Symbol a(x, xi) tabulated at grid nodes x_j and represented wavenumbers.
class ParaSymbol {
 public:
  using Function = std::function<Complex(double x, double xi)>;

  static ParaSymbol from_function(const PeriodicGrid& grid, double order, double regularity, const Function& a);
  /// a(., xi) given as a field for each represented physical wavenumber xi.
  static ParaSymbol from_fields(const PeriodicGrid& grid, double order, double regularity,
                                const std::function<SpectralField(double xi)>& a);

  const PeriodicGrid& grid() const { return grid_; }
  double order() const { return order_; }
  double regularity() const { return regularity_; }
  /// a(x, xi) real for every sample.
  bool is_real() const { return real_; }
  /// a(x, -xi) = conj a(x, xi): T_a maps real functions to real functions.
  bool preserves_real() const { return hermitian_; }

  /// a(x_j, xi_k), integer k in {-n/2+1, ..., n/2}.
  Complex at(int j, int k) const;
  ParaSymbol conjugate() const;
  /// Pointwise product; orders add, regularity is the minimum.
  ParaSymbol times(const ParaSymbol& b) const;

 private:
  ParaSymbol(const PeriodicGrid& grid, double order, double regularity, std::vector<Complex> table);

  PeriodicGrid grid_;
  double order_;
  double regularity_;
  std::vector<Complex> table_;  // [k index][j]
  bool real_ = true;
  bool hermitian_ = true;
};

/// Dense matrix of T_a acting on full spectra:
///   (T_a u)^(xi) = sum_eta chi(xi - eta, eta) a^(xi - eta, eta) Psi(eta) u^(eta),
/// a^(theta, eta) the x-Fourier coefficient of a(., eta). Outputs outside the
/// represented band are dropped.
class ParaOperator {
 public:
  ParaOperator(const ParaSymbol& a, const CutoffPair& cut = {});
  explicit ParaOperator(const PeriodicGrid& grid);  // zero operator

  const PeriodicGrid& grid() const { return grid_; }
  FullSpectrum apply(const FullSpectrum& u) const;
  SpectralField apply(const SpectralField& u) const;
  /// Conjugate transpose with respect to the L^2 pairing.
  ParaOperator adjoint() const;
  ParaOperator compose(const ParaOperator& right) const;  // this * right
  ParaOperator operator-(const ParaOperator& other) const;
  Complex entry(int xi, int eta) const;

 private:
  PeriodicGrid grid_;
  int n_;
  std::vector<Complex> m_;  // row-major [xi index][eta index]
};

/// T_a u. The real-field overload requires a symbol with preserves_real()
/// and throws SymmetryError otherwise.
FullSpectrum paradiff_apply(const ParaSymbol& a, const FullSpectrum& u, const CutoffPair& cut = {});
SpectralField paradiff_apply(const ParaSymbol& a, const SpectralField& u, const CutoffPair& cut = {});

struct OrderFit {
  double order = 0.0;
  double intercept = 0.0;
  std::vector<int> probes;
  std::vector<double> norms;
  bool degenerate = false;
};

inline constexpr double kOrderNegativeInfinity = -std::numeric_limits<double>::infinity();

/// Slope of log ||T e_k|| against log k over unit probes. Requires at least 4
/// distinct positive wavenumbers with max/min >= 4 (std::invalid_argument
/// otherwise). All outputs zero gives order = -infinity.
OrderFit fit_order(std::span<const int> probes, std::span<const double> norms);
OrderFit operator_order_fit(const std::function<FullSpectrum(const FullSpectrum&)>& T, const PeriodicGrid& grid,
                            std::span<const int> probes);
/// Same with real probes cos(k x) / sqrt(length / 2).
OrderFit operator_order_fit(const std::function<SpectralField(const SpectralField&)>& T, const PeriodicGrid& grid,
                            std::span<const int> probes);

/// Default probe set {8, 12, 16, 24, 32}.
std::vector<int> default_probes();

struct GardingReport {
  double constant = 0.0;       // over all samples
  double constant_half = 0.0;  // over the first half of the samples
  bool stable = false;         // finite and within 10% under sample doubling
  double ellipticity = 0.0;    // min Re a / |xi|^m over the scan
  int samples = 0;
};

/// Smallest C with ||Psi(D) u||^2_{H^{m/2}} <= C (Re <T_a u, u> + ||u||^2_{H^{(m-r)/2}})
/// over seeded random real trigonometric polynomials. Throws PreconditionError
/// when Re a(x, xi) >= c |xi|^m fails on the sample grid.
GardingReport garding_check(const ParaSymbol& a, double m, double c, int samples, std::uint64_t seed = 1,
                            const CutoffPair& cut = {});

struct ParalinResult {
  SpectralField residual;
  OrderFit fit;
};

/// G^-(eta) f - T_lambda f and the order of f -> G^-(eta) f - T_lambda f over
/// real probes.
ParalinResult paralin_residual_dn(const DNOperator& lower, const SpectralField& f,
                                  std::span<const int> probes, const CutoffPair& cut = {});
/// H(eta) - T_l eta, and the amplitude order of eps -> ||H(eps eta) - T_l(eps eta) eps eta||
/// over eps in `amplitudes` (fit slope in log eps).
ParalinResult paralin_residual_curvature(const Interface& eta, std::span<const double> amplitudes,
                                         const CutoffPair& cut = {});

/// CSV with columns probe_k, residual_norm, fitted_order.
void write_residual_csv(const OrderFit& fit, const std::filesystem::path& path);

}  // namespace muskat
