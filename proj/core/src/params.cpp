#include "muskat/params.hpp"

#include <cmath>
#include <fmt/format.h>

#include "muskat/errors.hpp"

namespace muskat {

void FluidParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(mu_minus) || !finite(mu_plus) || !finite(rho_minus) || !finite(rho_plus) || !finite(g) ||
      !finite(surface_tension))
    throw ValidationError("fluid: parameters must be finite");
  if (!(mu_minus > 0.0)) throw ValidationError("fluid: mu_minus must be positive");
  if (mu_plus < 0.0) throw ValidationError("fluid: mu_plus must be nonnegative");
  if (!(rho_minus > 0.0)) throw ValidationError("fluid: rho_minus must be positive");
  if (rho_plus < 0.0) throw ValidationError("fluid: rho_plus must be nonnegative");
  if (!(rho_minus > rho_plus))
    throw ValidationError(fmt::format(
        "fluid: stable regime requires rho_minus > rho_plus (got rho_minus = {}, rho_plus = {})", rho_minus,
        rho_plus));
  if (!(g > 0.0)) throw ValidationError("fluid: g must be positive");
  if (surface_tension < 0.0) throw ValidationError("fluid: surface tension must be nonnegative");
  if (mu_plus == 0.0 && rho_plus != 0.0)
    throw ValidationError("fluid: one-phase flow (mu_plus = 0) requires rho_plus = 0");
}

void FluidParams::validate(const DomainSpec& dom) const {
  validate();
  dom.validate();
  if (one_phase() && dom.top.kind != WallKind::vacuum)
    throw ValidationError("domain: one-phase flow needs a vacuum top");
  if (!one_phase() && dom.top.kind == WallKind::vacuum)
    throw ValidationError("domain: two-phase flow needs an upper fluid layer (flat or infinite top)");
}

}  // namespace muskat
