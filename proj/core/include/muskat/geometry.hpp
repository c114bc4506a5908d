#pragma once

#include <limits>
#include <vector>

#include "muskat/spectral.hpp"

namespace muskat {

/// Graph interface y = eta(x). `regularity` is the Sobolev index s the
/// interface is tracked in; it is bookkeeping only.
struct Interface {
  SpectralField height;
  double regularity = 3.0;

  const PeriodicGrid& grid() const { return height.grid(); }
};

enum class WallKind { flat, infinite, vacuum };

/// Rigid wall (flat, at vertical distance `distance` from y = 0), no wall, or
/// vacuum above a one-phase interface.
struct Wall {
  WallKind kind = WallKind::infinite;
  double distance = 0.0;

  static Wall flat(double d) { return {WallKind::flat, d}; }
  static Wall infinite() { return {WallKind::infinite, 0.0}; }
  static Wall vacuum() { return {WallKind::vacuum, 0.0}; }
};

enum class Side { lower, upper };

struct DomainSpec {
  Wall bottom = Wall::infinite();
  Wall top = Wall::vacuum();
  /// Required separation h between the interface and any rigid wall.
  double separation = 0.1;
  /// Infinite layers are truncated at this many periods below/above y = 0.
  double artificial_depth_factor = 8.0;

  /// Throws ValidationError for inconsistent settings (vacuum bottom, non-positive depths...).
  void validate() const;
  /// Depth of the fluid layer on `side` used by the elliptic solver: the wall
  /// distance, or artificial_depth_factor * length for an infinite layer.
  double layer_depth(Side side, double length) const;
  bool has_fluid(Side side) const;
};

/// Smallest vertical distance between eta and a present flat wall; +infinity
/// when neither wall is a flat wall.
double separation(const Interface& eta, const DomainSpec& dom);

/// Throws PreconditionError if separation(eta, dom) <= dom.separation.
void require_separation(const Interface& eta, const DomainSpec& dom);

/// H(eta) = -d/dx (eta_x / <eta_x>).
SpectralField curvature(const Interface& eta);

/// Principal symbol of G^-(eta): sqrt(<eta_x>^2 xi^2 - (eta_x xi)^2), which
/// in one dimension is |xi| for every x.
SpectralField symbol_lambda(const Interface& eta, double xi);

/// l(x, xi) = <eta_x>^{-3} lambda(x, xi)^2, the principal symbol of H.
SpectralField symbol_l(const Interface& eta, double xi);

/// Sampling of the flattened strip. The computational coordinate zeta in
/// [-1, 0] is uniform; the strip coordinate is z = s(zeta) with
///   s(zeta) = -(exp(beta |zeta|) - 1) / (exp(beta) - 1),
/// beta = log(1 + depth / surface_scale), which clusters nodes logarithmically
/// towards the interface so every resolved wavenumber sees comparable
/// resolution in its decay layer.
struct StripSampling {
  int n_z = 64;
  /// Near-interface length scale; <= 0 selects 3 * length / (2 pi n_points).
  double surface_scale = 0.0;
};

/// Graded strip coordinate for a layer of physical depth `depth`.
class StripGrading {
 public:
  StripGrading(double depth, double surface_scale);
  /// z = s(zeta) for zeta in [-1, 0].
  double z(double zeta) const;
  /// ds/dzeta.
  double dz(double zeta) const;
  double beta() const { return beta_; }

 private:
  double beta_;
};

/// Smoothed flattening of one fluid layer onto a unit strip,
///   rho(x, z) = (1 - z^2) exp(-tau |z| <D>) eta(x) + z * depth,
/// lower layer z in [-1, 0] (rho(-1) = -depth), upper layer z in [0, 1]
/// (rho(1) = depth). Samples are taken at z = +-s(zeta_j), zeta_j = -j / n_z,
/// and at the cell midpoints zeta_{j+1/2}.
class FlatteningMap {
 public:
  struct Level {
    double z;        // strip coordinate
    SpectralField rho;
    SpectralField rho_z;
    SpectralField rho_x;
  };

  Side side() const { return side_; }
  double tau() const { return tau_; }
  double depth() const { return depth_; }
  double separation() const { return h_; }
  int n_z() const { return static_cast<int>(nodes_.size()) - 1; }
  const StripGrading& grading() const { return grading_; }

  /// Levels at zeta_j = -j / n_z, j = 0..n_z (j = 0 is the interface).
  const std::vector<Level>& nodes() const { return nodes_; }
  /// Levels at cell midpoints zeta_{j+1/2}, j = 0..n_z-1.
  const std::vector<Level>& midpoints() const { return midpoints_; }
  /// Smallest sampled d(rho)/dz (oriented so that it is positive for a valid map).
  double min_jacobian() const { return min_jacobian_; }
  int retries() const { return retries_; }

  /// Evaluate the map at an arbitrary strip coordinate z of this side.
  Level evaluate(double z) const;

 private:
  friend FlatteningMap build_flattening(const Interface&, const DomainSpec&, double, Side,
                                        const StripSampling&);
  FlatteningMap(const Interface& eta, Side side, double tau, double depth, double h,
                StripGrading grading);

  Interface eta_;
  Side side_;
  double tau_;
  double depth_;
  double h_;
  StripGrading grading_;
  std::vector<Level> nodes_;
  std::vector<Level> midpoints_;
  double min_jacobian_ = 0.0;
  int retries_ = 0;
};

/// Initial smoothing parameter h / (12 K ||eta||_{H^s}), capped at 1.
double initial_tau(const Interface& eta, double h, double k_hat = 1.0);

/// Builds the flattening of the layer on `side` and checks d(rho)/dz >= h/12
/// on all samples; tau is halved up to 40 times until the bound holds.
/// Throws PreconditionError when the bound cannot be met or when the
/// interface violates the separation requirement.
FlatteningMap build_flattening(const Interface& eta, const DomainSpec& dom, double tau,
                               Side side = Side::lower, const StripSampling& sampling = {});

}  // namespace muskat
