#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "muskat/geometry.hpp"
#include "muskat/params.hpp"

namespace muskat {

struct EllipticSolveConfig {
  int n_z = 64;
  double tolerance = 1e-10;
  int max_iterations = 2000;
  /// Precondition the interior solve with the x-averaged (flat) operator,
  /// exact when eta = 0. Disabled means plain CG.
  bool flat_preconditioner = true;
  /// Strip grading length scale; <= 0 is automatic (see StripSampling).
  double surface_scale = 0.0;

  /// n_z >= 8, tolerance in (0, 1e-4], max_iterations >= 1.
  void validate() const;
};

/// Interior potential returned by DNOperator::solve, in the operator's own
/// lower-strip frame: levels[j] is phi at zeta_j = -j / n_z of map().
struct DNSolution {
  SpectralField dn;
  std::vector<SpectralField> levels;
  int iterations = 0;
  double residual = 0.0;
};

/// Dirichlet-Neumann operator G^-(eta) (lower layer) or G^+(eta) (upper layer).
///
/// The layer is flattened onto a strip and the Dirichlet energy
///   Q(phi) = int int [ a11 phi_x^2 + 2 a12 phi_x phi_zeta + a22 phi_zeta^2 ] dx dzeta
/// is discretized with Fourier modes in x and linear elements in zeta. G f is
/// the gradient of the minimized energy with respect to the interface values,
/// computed by PCG on the interior levels. The upper layer is handled by
/// reflection, G^+(eta) f = -G^-_{d+}(-eta) f.
///
/// Immutable after construction; copies share the cached coefficients.
class DNOperator {
 public:
  DNOperator(const Interface& eta, Side side, const DomainSpec& dom,
             const EllipticSolveConfig& cfg = {});

  SpectralField apply(const SpectralField& f) const;
  /// apply() plus the interior potential (lower-frame; see DNSolution).
  DNSolution solve(const SpectralField& f) const;

  Side side() const { return side_; }
  /// Flattening used internally (of -eta for the upper side).
  const FlatteningMap& map() const;
  const Interface& interface() const { return eta_; }
  const EllipticSolveConfig& config() const { return cfg_; }

  /// Magnitude of the discrete symbol of the flat operator with this
  /// operator's depth and grading, at integer mode k: exactly G^-(0) (or
  /// -G^+(0)) on cos(kx). Nonnegative.
  double flat_symbol(int k) const;

  struct Impl;

 private:
  Interface eta_;
  Side side_;
  EllipticSolveConfig cfg_;
  std::shared_ptr<const Impl> impl_;
};

SpectralField dn_apply(const DNOperator& op, const SpectralField& f);

/// Cutoff lift of an interface jump v:
///   theta(x, y) = -1/2 varsigma(z) [exp(-|z|<D>) v](x),  z = (y - eta(x)) / h,
/// varsigma = 1 on |z| <= 1/2 and 0 on |z| >= 1 (C-infinity in between).
class ThetaLift {
 public:
  ThetaLift(const SpectralField& v, const Interface& eta, double h);

  double operator()(double x, double y) const;
  /// Profile in the normalized coordinate z at grid node j.
  double at_node(int j, double z) const;
  static double cutoff(double z);

 private:
  SpectralField v_;
  Interface eta_;
  double h_;
};

ThetaLift theta_lift(const SpectralField& v, const Interface& eta, double h);

/// Solution of the transmission system
///   f^- - f^+ = v,   mu^+ G^- f^- - mu^- G^+ f^+ = 0,
/// together with G^- f^- and G^+ f^+ (accumulated during the Krylov loop).
struct JumpSplit {
  SpectralField lower;
  SpectralField upper;
  SpectralField dn_lower;
  SpectralField dn_upper;
  int iterations = 0;
  double residual = 0.0;
};

/// G^-(eta) and, for two-phase flow, G^+(eta) built once for an interface.
class InterfaceOperators {
 public:
  InterfaceOperators(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                     const EllipticSolveConfig& cfg = {});

  const DNOperator& lower() const { return lower_; }
  /// nullptr for one-phase flow.
  const DNOperator* upper() const { return upper_ ? &*upper_ : nullptr; }
  const FluidParams& params() const { return params_; }
  const Interface& interface() const { return lower_.interface(); }

  /// J^- v, J^+ v. One-phase: (v, 0). The mean of v goes to f^-.
  JumpSplit split(const SpectralField& v) const;
  /// L f = G^- J^- f + G^+ J^+ f.
  SpectralField L(const SpectralField& f) const;
  /// L f = ((mu^+ + mu^-) / mu^-) G^- J^- f.
  SpectralField L_lower_form(const SpectralField& f) const;
  /// Discrete flat-interface symbol L_0(k) for the configured depths.
  double flat_L_symbol(int k) const;

 private:
  FluidParams params_;
  EllipticSolveConfig cfg_;
  DNOperator lower_;
  std::optional<DNOperator> upper_;
};

std::pair<SpectralField, SpectralField> solve_two_phase(const Interface& eta, const SpectralField& v,
                                                        const FluidParams& params,
                                                        const DomainSpec& dom,
                                                        const EllipticSolveConfig& cfg = {});

SpectralField operator_L(const Interface& eta, const SpectralField& f, const FluidParams& params,
                         const DomainSpec& dom, const EllipticSolveConfig& cfg = {});

}  // namespace muskat
