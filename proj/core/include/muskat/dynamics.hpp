#pragma once

#include "muskat/elliptic.hpp"

namespace muskat {

/// B^{+-} f = <eta_x>^{-2} (eta_x f_x + G^{+-}(eta) f).
SpectralField operator_B(const Interface& eta, const SpectralField& f, const SpectralField& dn_f);
SpectralField operator_B(const InterfaceOperators& ops, const SpectralField& f, Side side);

/// V^{+-} f = f_x - eta_x B^{+-} f.
SpectralField operator_V(const Interface& eta, const SpectralField& f, const SpectralField& b_f);
SpectralField operator_V(const InterfaceOperators& ops, const SpectralField& f, Side side);

struct RayleighTaylor {
  SpectralField field;
  double infimum;
};

/// RT(eta) = 1 - (B^- J^- eta - B^+ J^+ eta).
RayleighTaylor rayleigh_taylor(const InterfaceOperators& ops);
RayleighTaylor rayleigh_taylor(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                               const EllipticSolveConfig& cfg = {});

/// g eta + s H(eta), the jump of the pressure-like quantity driving the flow.
SpectralField driving_potential(const Interface& eta, const FluidParams& params);

/// d eta / dt = -(1/(mu^+ + mu^-)) L(eta) (g eta + s H(eta)).
SpectralField evolution_rhs(const InterfaceOperators& ops);
SpectralField evolution_rhs(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                            const EllipticSolveConfig& cfg = {});

}  // namespace muskat
