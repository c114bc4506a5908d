#include "muskat/dynamics.hpp"

#include "muskat/errors.hpp"

namespace muskat {

SpectralField operator_B(const Interface& eta, const SpectralField& f, const SpectralField& dn_f) {
  const SpectralField slope = eta.height.derivative();
  const SpectralField num = product(slope, f.derivative()) + dn_f;
  return dealiased_map([](double s, double v) { return v / (1.0 + s * s); }, slope, num);
}

SpectralField operator_V(const Interface& eta, const SpectralField& f, const SpectralField& b_f) {
  return f.derivative() - product(eta.height.derivative(), b_f);
}

namespace {

const DNOperator& side_operator(const InterfaceOperators& ops, Side side) {
  if (side == Side::lower) return ops.lower();
  if (ops.upper() == nullptr) throw PreconditionError("upper-side operator requested for one-phase flow");
  return *ops.upper();
}

}  // namespace

SpectralField operator_B(const InterfaceOperators& ops, const SpectralField& f, Side side) {
  return operator_B(ops.interface(), f, side_operator(ops, side).apply(f));
}

SpectralField operator_V(const InterfaceOperators& ops, const SpectralField& f, Side side) {
  return operator_V(ops.interface(), f, operator_B(ops, f, side));
}

RayleighTaylor rayleigh_taylor(const InterfaceOperators& ops) {
  const Interface& eta = ops.interface();
  const JumpSplit s = ops.split(eta.height);
  SpectralField jump = operator_B(eta, s.lower, s.dn_lower);
  if (ops.upper() != nullptr) jump = jump - operator_B(eta, s.upper, s.dn_upper);
  SpectralField field = (-jump) + 1.0;
  const double inf = field.min();
  return RayleighTaylor{std::move(field), inf};
}

RayleighTaylor rayleigh_taylor(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                               const EllipticSolveConfig& cfg) {
  return rayleigh_taylor(InterfaceOperators(eta, params, dom, cfg));
}

SpectralField driving_potential(const Interface& eta, const FluidParams& params) {
  SpectralField p = params.reduced_gravity() * eta.height;
  if (params.surface_tension > 0.0) p = p + params.surface_tension * curvature(eta);
  return p;
}

SpectralField evolution_rhs(const InterfaceOperators& ops) {
  const FluidParams& p = ops.params();
  return (-1.0 / p.mu_sum()) * ops.L(driving_potential(ops.interface(), p));
}

SpectralField evolution_rhs(const Interface& eta, const FluidParams& params, const DomainSpec& dom,
                            const EllipticSolveConfig& cfg) {
  return evolution_rhs(InterfaceOperators(eta, params, dom, cfg));
}

}  // namespace muskat
