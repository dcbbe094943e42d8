#pragma once

#include <vector>

#include "opalg/linmap.hpp"

namespace opalg {

/// Finite-dimensional *-subalgebra of B(C^n), represented by an orthonormal
/// basis under <x,y> = Tr(x* y). The basis spans a subspace that is closed
/// under adjoints and (when built by span_closure) under products.
struct StarAlgebra {
  Index ambient_dim = 0;
  std::vector<Mat> basis;
  bool contains_unit = false;

  Index dim() const { return static_cast<Index>(basis.size()); }
};

/// Largest residuals of the StarAlgebra invariants: Gram orthonormality,
/// adjoint closure, multiplicative closure.
struct AlgebraResiduals {
  double gram = 0.0;
  double adjoint = 0.0;
  double product = 0.0;
};
AlgebraResiduals algebra_residuals(const StarAlgebra& a);

/// Smallest adjoint- and multiplication-closed span containing the
/// generators; iterates {products, adjoints} with re-orthonormalization until
/// the dimension stabilizes (capped at n^2). Throws NumericalError when the
/// rank decision conditioning degrades below 1e-6.
StarAlgebra span_closure(const std::vector<Mat>& generators);

bool is_abelian(const StarAlgebra& a, double tol = 1e-8);

/// Orthogonal projection onto span(a) under the trace inner product.
Mat project_onto_span(const StarAlgebra& a, const Mat& x);

/// Distance from x to span(a) in Frobenius norm.
double span_residual(const StarAlgebra& a, const Mat& x);

bool span_contains(const StarAlgebra& a, const Mat& x, double tol = 1e-8);

/// Trace-invariant conditional expectation of B(C^n) onto span(a): the
/// orthogonal projection, an idempotent unital trace-invariant CP map with
/// the bimodule property over a. Requires the unit in a.
LinMap conditional_expectation(const StarAlgebra& a);

Mat jordan_product(const Mat& a, const Mat& b);

/// Minimal projections of an abelian unital algebra: pairwise orthogonal,
/// summing to I, spanning the algebra. Joint diagonalization of a generic
/// self-adjoint combination, with up to 10 resamples. Throws ValidationError
/// on a non-abelian input, NumericalError when no generic combination
/// separates the spectrum.
std::vector<Mat> minimal_projections(const StarAlgebra& a, std::uint64_t seed = 0);

// Convenience constructors used across harnesses and tests.
StarAlgebra full_matrix_algebra(Index n);
StarAlgebra diagonal_algebra(Index n);
StarAlgebra scalar_algebra(Index n);

}  // namespace opalg
