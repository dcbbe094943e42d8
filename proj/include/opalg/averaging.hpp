#pragma once

#include "opalg/algebra.hpp"
#include "opalg/definite_set.hpp"
#include "opalg/linmap.hpp"
#include "opalg/separability.hpp"

namespace opalg {

/// Invariant state of a positive unital map: density d with
/// adjoint_map(phi)(d) = d, PSD, unit counting trace. Computed by pushing
/// the maximally mixed state through the adjoint of the averaging
/// projection. faithful = (lambda_min > 1e-10).
struct InvariantState {
  Functional state;
  bool faithful = false;
};
InvariantState invariant_state(const LinMap& phi);

struct CesaroResult {
  LinMap projection;        ///< the spectral-projection construction (authoritative)
  std::int64_t steps = 0;   ///< Cesaro length n actually reached
  bool converged = false;   ///< Cesaro difference met tol before the cap
  double agreement = 0.0;   ///< ||phi_n - P|| at the stopping point
};

/// Averaging projection P = lim (1/n)(phi + ... + phi^n). The running
/// average is evaluated at doubling lengths (the cap is on n itself, at
/// logarithmic cost) and convergence is detected on the extrapolated pair
/// 2 phi_2n - phi_n, which cancels the 1/n tail; the exact spectral
/// projection onto the eigenvalue-1 eigenspace is computed alongside and the
/// two must agree within 10*tol whenever the iteration converged.
CesaroResult cesaro_projection(const LinMap& phi, double tol = 1e-10,
                               std::int64_t max_n = (std::int64_t{1} << 40));

struct FixedPointAlgebra {
  StarAlgebra algebra;       ///< null space of (phi - id), adjoint-closed span
  bool jordan_closed = false;
  bool multiplicative_closed = false;
  bool contained_in_definite = false;  ///< checked when a faithful invariant state exists
};
FixedPointAlgebra fixed_point_algebra(const LinMap& phi);

struct AveragingReport {
  Functional invariant_state;
  bool faithful = false;
  LinMap projection;
  std::int64_t cesaro_steps = 0;
  bool cesaro_converged = false;
  double cesaro_agreement = 0.0;
  double idempotency_residual = 0.0;
  double state_invariance_residual = 0.0;  ///< ||rho o P - rho||
  StarAlgebra fixed_algebra;
  bool jordan_closed = false;
  bool range_equals_fixed_algebra = false;
};
AveragingReport averaging_report(const LinMap& phi);

struct Corollary5Report {
  AveragingReport averaging;
  SepVerdict verdict_i;    ///< P entanglement breaking?
  bool verdict_ii = false; ///< fixed-point algebra abelian
  SepVerdict verdict_iii;  ///< dual of P separable (same density as (i))
  bool consistent = false;
};

/// Requires a faithful invariant state (refuses otherwise).
Corollary5Report corollary5_harness(const LinMap& phi, const SepOptions& opts = {});

}  // namespace opalg
