#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "muskat/errors.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;
using std::numbers::pi;

namespace {

SpectralField wave(const PeriodicGrid& g, double (*fn)(double), int k) {
  return SpectralField::from_function(g, [=](double x) { return fn(k * x); });
}

double cosine(double x) { return std::cos(x); }
double sine(double x) { return std::sin(x); }

double max_diff(const SpectralField& a, const SpectralField& b) { return (a - b).max_abs(); }

}  // namespace

TEST(Spectral, ValuesCoefficientsRoundTrip) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<double> v(64);
  for (double& x : v) x = n(rng);
  const SpectralField f = SpectralField::from_values(g, v);
  const SpectralField back = SpectralField::from_coefficients(g, {f.coefficients().begin(), f.coefficients().end()});
  for (int j = 0; j < 64; ++j) EXPECT_NEAR(back[j], v[static_cast<size_t>(j)], 1e-13);
}

TEST(Spectral, CoefficientNormalization) {
  const PeriodicGrid g(32);
  const SpectralField f = SpectralField::from_function(g, [](double x) { return 2.0 + 3.0 * std::cos(2 * x); });
  EXPECT_NEAR(f.mean(), 2.0, 1e-14);
  EXPECT_NEAR(f.coefficient(2).real(), 1.5, 1e-14);
  EXPECT_NEAR(f.coefficient(-2).real(), 1.5, 1e-14);
}

TEST(Spectral, Derivative) {
  const PeriodicGrid g(64);
  EXPECT_LT(max_diff(wave(g, sine, 3).derivative(), 3.0 * wave(g, cosine, 3)), 1e-12);
  EXPECT_LT(max_diff(wave(g, sine, 3).derivative(2), -9.0 * wave(g, sine, 3)), 1e-11);
}

TEST(Spectral, NonStandardLength) {
  const PeriodicGrid g(64, 4.0);
  const SpectralField f = SpectralField::from_function(g, [](double x) { return std::sin(pi * x / 2.0); });
  const SpectralField df = SpectralField::from_function(g, [](double x) { return pi / 2.0 * std::cos(pi * x / 2.0); });
  EXPECT_LT(max_diff(f.derivative(), df), 1e-12);
}

TEST(Spectral, MultiplierExamples) {
  const PeriodicGrid g(64);
  const SpectralField f = wave(g, cosine, 3) + 0.3 * wave(g, sine, 7);
  EXPECT_LT(max_diff(apply_multiplier([](double) { return 1.0; }, f), f), 1e-14);
  EXPECT_LT(max_diff(apply_multiplier([](double k) { return std::abs(k); }, wave(g, cosine, 3)), 3.0 * wave(g, cosine, 3)), 1e-13);
  EXPECT_LT(max_diff(apply_multiplier([](double k) { return std::sqrt(1 + k * k); }, wave(g, sine, 2)),
                     std::sqrt(5.0) * wave(g, sine, 2)),
            1e-13);
}

TEST(Spectral, MultiplierSymmetryViolation) {
  const PeriodicGrid g(32);
  EXPECT_THROW(apply_multiplier([](double k) { return std::complex<double>(0.0, std::abs(k)); }, wave(g, cosine, 1)),
               SymmetryError);
}

TEST(Spectral, SobolevNormExamples) {
  const PeriodicGrid g(64);
  EXPECT_EQ(sobolev_norm(SpectralField::zeros(g), 2.0), 0.0);
  EXPECT_NEAR(sobolev_norm(wave(g, cosine, 4), 0.0), std::sqrt(pi), 1e-13);
  EXPECT_NEAR(sobolev_norm(wave(g, cosine, 2), 1.0), std::sqrt(5.0 * pi), 1e-13);
  // quadrature of f^2 + f_x^2
  const SpectralField f = wave(g, cosine, 2);
  const SpectralField fx = f.derivative();
  double q = 0.0;
  for (int j = 0; j < 64; ++j) q += (f[j] * f[j] + fx[j] * fx[j]) * g.spacing();
  EXPECT_NEAR(sobolev_norm(f, 1.0), std::sqrt(q), 1e-12);
}

TEST(Spectral, SmoothingSemigroup) {
  const PeriodicGrid g(64);
  const SpectralField f = wave(g, cosine, 1);
  EXPECT_LT(max_diff(smoothing_semigroup(0.0, 0.7, f), f), 1e-15);
  EXPECT_LT(max_diff(smoothing_semigroup(1.0, 1.0, f), std::exp(-std::sqrt(2.0)) * f), 1e-14);
  EXPECT_THROW(smoothing_semigroup(-1.0, 0.0, f), std::invalid_argument);
}

TEST(Spectral, SmoothingIsContractive) {
  const PeriodicGrid g(64);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 2.0), s(-1.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::complex<double>> c(33);
    for (int k = 0; k < 21; ++k) c[static_cast<size_t>(k)] = {n(rng), n(rng)};
    const SpectralField f = SpectralField::from_coefficients(g, c);
    const double sigma = s(rng);
    EXPECT_LE(sobolev_norm(smoothing_semigroup(u(rng), u(rng) - 1.0, f), sigma), sobolev_norm(f, sigma) * (1 + 1e-14));
  }
}

TEST(Spectral, DealiasedProductExactForLowModes) {
  const PeriodicGrid g(48);
  // cos(10x) * cos(5x) = (cos 15x + cos 5x) / 2, all below the cutoff
  const SpectralField p = product(wave(g, cosine, 10), wave(g, cosine, 5));
  const SpectralField expect = 0.5 * (wave(g, cosine, 15) + wave(g, cosine, 5));
  EXPECT_LT(max_diff(p, expect), 1e-13);
}

TEST(Spectral, DealiasedMapOfSmoothFunction) {
  const PeriodicGrid g(128);
  const SpectralField f = 0.1 * wave(g, cosine, 1);
  const SpectralField e = dealiased_map([](double v) { return std::exp(v); }, f);
  const SpectralField exact = SpectralField::from_function(g, [](double x) { return std::exp(0.1 * std::cos(x)); });
  EXPECT_LT(max_diff(e, exact), 1e-13);
}

TEST(Spectral, ReflectionAndShift) {
  const PeriodicGrid g(32);
  const SpectralField s = wave(g, sine, 2);
  EXPECT_LT(max_diff(s.reflected(), -s), 1e-14);
  EXPECT_NEAR(s.shifted(1)[1], s[0], 0.0);
}
