#include "muskat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "muskat/errors.hpp"

namespace muskat {

void DomainSpec::validate() const {
  if (bottom.kind == WallKind::vacuum) throw ValidationError("domain: the bottom cannot be vacuum");
  if (bottom.kind == WallKind::flat && !(bottom.distance > 0.0))
    throw ValidationError("domain: bottom depth must be positive");
  if (top.kind == WallKind::flat && !(top.distance > 0.0))
    throw ValidationError("domain: top height must be positive");
  if (!(separation > 0.0)) throw ValidationError("domain: separation h must be positive");
  if (!(artificial_depth_factor > 0.0))
    throw ValidationError("domain: artificial depth factor must be positive");
}

bool DomainSpec::has_fluid(Side side) const {
  return side == Side::lower || top.kind != WallKind::vacuum;
}

double DomainSpec::layer_depth(Side side, double length) const {
  const Wall& w = side == Side::lower ? bottom : top;
  switch (w.kind) {
    case WallKind::flat:
      return w.distance;
    case WallKind::infinite:
      return artificial_depth_factor * length;
    case WallKind::vacuum:
      break;
  }
  throw PreconditionError("domain: no fluid layer above a vacuum interface");
}

double separation(const Interface& eta, const DomainSpec& dom) {
  double d = std::numeric_limits<double>::infinity();
  if (dom.bottom.kind == WallKind::flat) d = std::min(d, eta.height.min() + dom.bottom.distance);
  if (dom.top.kind == WallKind::flat) d = std::min(d, dom.top.distance - eta.height.max());
  return d;
}

void require_separation(const Interface& eta, const DomainSpec& dom) {
  const double d = separation(eta, dom);
  if (!(d > dom.separation))
    throw PreconditionError(
        fmt::format("interface too close to a wall: separation {:.6g} <= h = {:.6g}", d, dom.separation));
}

SpectralField curvature(const Interface& eta) {
  const SpectralField slope = eta.height.derivative();
  return -dealiased_map([](double s) { return s / japanese_bracket(s); }, slope).derivative();
}

SpectralField symbol_lambda(const Interface& eta, double xi) {
  const SpectralField slope = eta.height.derivative();
  std::vector<double> v(slope.values().size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double s = slope.values()[i];
    const double q = (1.0 + s * s) * xi * xi - (s * xi) * (s * xi);
    v[i] = std::sqrt(std::max(q, 0.0));
  }
  return SpectralField::from_values(eta.grid(), std::move(v));
}

SpectralField symbol_l(const Interface& eta, double xi) {
  const SpectralField slope = eta.height.derivative();
  const SpectralField lambda = symbol_lambda(eta, xi);
  std::vector<double> v(slope.values().size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double b = japanese_bracket(slope.values()[i]);
    v[i] = lambda.values()[i] * lambda.values()[i] / (b * b * b);
  }
  return SpectralField::from_values(eta.grid(), std::move(v));
}

StripGrading::StripGrading(double depth, double surface_scale)
    : beta_(std::log1p(depth / surface_scale)) {
  if (!(depth > 0.0) || !(surface_scale > 0.0))
    throw std::invalid_argument("StripGrading: depth and surface scale must be positive");
}

double StripGrading::z(double zeta) const {
  const double a = std::abs(zeta);
  if (beta_ < 1e-8) return -a;
  return -std::expm1(beta_ * a) / std::expm1(beta_);
}

double StripGrading::dz(double zeta) const {
  const double a = std::abs(zeta);
  if (beta_ < 1e-8) return 1.0;
  return beta_ * std::exp(beta_ * a) / std::expm1(beta_);
}

namespace {

double resolve_surface_scale(const StripSampling& s, const PeriodicGrid& grid) {
  if (s.surface_scale > 0.0) return s.surface_scale;
  return 3.0 * grid.length() / (2.0 * std::numbers::pi * grid.size());
}

}  // namespace

FlatteningMap::FlatteningMap(const Interface& eta, Side side, double tau, double depth, double h,
                             StripGrading grading)
    : eta_(eta), side_(side), tau_(tau), depth_(depth), h_(h), grading_(grading) {}

FlatteningMap::Level FlatteningMap::evaluate(double z) const {
  const double sign = side_ == Side::lower ? -1.0 : 1.0;
  if (z * sign < 0.0 || std::abs(z) > 1.0)
    throw std::out_of_range("FlatteningMap::evaluate: z outside this strip");
  const SpectralField smoothed = smoothing_semigroup(tau_, z, eta_.height);
  const SpectralField bracket_smoothed =
      apply_multiplier([](double k) { return japanese_bracket(k); }, smoothed);
  const double w = 1.0 - z * z;
  // d/dz exp(-tau |z| <D>) = -sign(z) tau <D> exp(-tau |z| <D>)
  SpectralField rho = w * smoothed + z * depth_;
  SpectralField rho_z = (-2.0 * z) * smoothed + (-sign * tau_ * w) * bracket_smoothed + depth_;
  SpectralField rho_x = w * smoothed.derivative();
  return Level{z, std::move(rho), std::move(rho_z), std::move(rho_x)};
}

double initial_tau(const Interface& eta, double h, double k_hat) {
  const double norm = sobolev_norm(eta.height, eta.regularity);
  if (!(norm > 0.0)) return 1.0;
  return std::min(1.0, h / (12.0 * k_hat * norm));
}

FlatteningMap build_flattening(const Interface& eta, const DomainSpec& dom, double tau, Side side,
                               const StripSampling& sampling) {
  dom.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("build_flattening: tau must be positive");
  if (sampling.n_z < 2) throw std::invalid_argument("build_flattening: need at least two z cells");
  if (!dom.has_fluid(side)) throw PreconditionError("build_flattening: no fluid on the requested side");
  require_separation(eta, dom);

  const PeriodicGrid& grid = eta.grid();
  const double depth = dom.layer_depth(side, grid.length());
  const StripGrading grading(depth, resolve_surface_scale(sampling, grid));
  const double sign = side == Side::lower ? 1.0 : -1.0;  // z = sign * s(zeta)
  const double bound = dom.separation / 12.0;
  const int n_z = sampling.n_z;

  constexpr int kMaxRetries = 40;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    FlatteningMap map(eta, side, tau, depth, dom.separation, grading);
    double min_jac = std::numeric_limits<double>::infinity();
    auto sample = [&](double zeta) {
      FlatteningMap::Level level = map.evaluate(sign * grading.z(zeta));
      min_jac = std::min(min_jac, level.rho_z.min());
      return level;
    };
    for (int j = 0; j <= n_z; ++j) map.nodes_.push_back(sample(-static_cast<double>(j) / n_z));
    for (int j = 0; j < n_z; ++j) map.midpoints_.push_back(sample(-(j + 0.5) / n_z));
    map.min_jacobian_ = min_jac;
    map.retries_ = attempt;
    if (min_jac >= bound) return map;
    tau *= 0.5;
  }
  throw PreconditionError(fmt::format(
      "flattening: d(rho)/dz >= h/12 = {:.3g} not attained after {} halvings of tau; "
      "the smallness condition tau K ||eta||_{{H^s}} <= h/12 is violated",
      bound, kMaxRetries));
}

}  // namespace muskat
