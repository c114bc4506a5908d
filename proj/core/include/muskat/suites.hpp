#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace muskat {

/// Outcome of one verification check.
struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

/// dn_apply at eta = 0, bottom depth 1, n_z = 128 against |k| tanh |k|, k = 1..8.
CheckResult check_flat_dn_exactness();
/// Symmetry, positivity and zero mean of G^-, G^+ and L on random smooth pairs.
CheckResult check_operator_structure(std::uint64_t seed, int pairs = 50);
/// f^- - f^+ = v and the flat formula f^- = mu^- / (mu^- + mu^+) v.
CheckResult check_two_phase_identity();
/// d(rho)/dz >= h/12 on the sample grid for random admissible interfaces.
CheckResult check_flattening_invariant(std::uint64_t seed, int count = 100);
/// Mean drift, energy monotonicity and per-step monitors over a one-phase run.
CheckResult check_dynamics_invariants();

/// The elliptic suite: the four checks above that involve G and L.
std::vector<CheckResult> dn_suite(std::uint64_t seed);

/// T_1 = Psi(D), linearity, low-frequency annihilation, support, composition
/// and adjoint orders, DN and curvature paralinearization, Garding.
std::vector<CheckResult> paracalc_suite(std::uint64_t seed);

/// One line: PASS|FAIL name measured threshold time detail.
std::string format_check(const CheckResult& r);

}  // namespace muskat
