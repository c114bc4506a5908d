#pragma once

#include "muskat/geometry.hpp"

namespace muskat {

/// Physical constants. The lower fluid (mu_minus, rho_minus) lies below the
/// interface; mu_plus = rho_plus = 0 selects the one-phase problem.
struct FluidParams {
  double mu_minus = 1.0;
  double mu_plus = 0.0;
  double rho_minus = 1.0;
  double rho_plus = 0.0;
  double g = 1.0;
  double surface_tension = 0.0;

  /// Reduced gravity g (rho^- - rho^+).
  double reduced_gravity() const { return g * (rho_minus - rho_plus); }
  bool one_phase() const { return mu_plus == 0.0; }
  double mu_sum() const { return mu_minus + mu_plus; }

  /// Throws ValidationError unless mu^- > 0, mu^+ >= 0, rho^- > rho^+ >= 0,
  /// g > 0, surface tension >= 0, and mu^+ = 0 implies rho^+ = 0.
  void validate() const;
  /// validate() plus compatibility with the domain: one-phase needs a vacuum
  /// top, two-phase needs fluid above the interface.
  void validate(const DomainSpec& dom) const;
};

}  // namespace muskat
