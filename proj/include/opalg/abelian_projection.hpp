#pragma once

#include <vector>

#include "opalg/linmap.hpp"

namespace opalg {

/// Worst |rho(e b) - rho(b e)| over elements e and a matrix-unit basis b;
/// zero exactly when every element lies in the centralizer of rho.
double centralizer_check(const Functional& rho, const std::vector<Mat>& elems);

/// Projection P(a) = sum_i rho(e_i)^{-1} rho(e_i a e_i) e_i onto the abelian
/// algebra of an orthogonal resolution {e_i}, together with the pinching E
/// on the doubled space realizing the dual identity.
struct AbelianProjectionData {
  std::vector<Mat> projections;
  Functional rho;          ///< normalized to a state
  RVec weights;            ///< rho(e_i)
  LinMap projection_map;   ///< P
  double unitality_residual = 0.0;
  double idempotency_residual = 0.0;
  double invariance_residual = 0.0;   ///< ||rho o P - rho||
  double state_support_residual = 0.0;  ///< omega_i(e_j) = delta_ij defect
};

/// Validates: {e_i} an orthogonal resolution of identity, rho faithful,
/// e_i in the centralizer of rho at 1e-8, weights above 1e-12.
AbelianProjectionData build_projection(const Functional& rho,
                                       const std::vector<Mat>& projections);

/// E(x) = sum_i rho(e_i)^{-1} (e_i (x) e_i^t) x (e_i (x) e_i^t) on the
/// doubled space; CP by construction (explicit Kraus form).
LinMap pinching_map(const AbelianProjectionData& data);

/// max over matrix-unit pairs (a, b) of
/// |dual(P)(a (x) b) - (rho (x) Tr)(E(a (x) b))|.
double dual_identity_check(const AbelianProjectionData& data);

}  // namespace opalg
