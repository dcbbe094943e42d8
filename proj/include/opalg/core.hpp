#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

#include "opalg/errors.hpp"

namespace opalg {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default tolerance for PSD / self-adjointness decisions.
inline constexpr double kDefaultTol = 1e-9;

/// Bipartite annotation: the space is C^a (x) C^b, first factor major, so the
/// global index of (i, j) is i*b + j.
struct Dims {
  Index a = 0;
  Index b = 0;

  Index total() const { return a * b; }
  bool operator==(const Dims&) const = default;
};

enum class Factor { A, B };

// ---------------------------------------------------------------------------
// Elementary constructions
// ---------------------------------------------------------------------------

/// Matrix unit E_ij in M_n.
Mat matrix_unit(Index n, Index i, Index j);

/// Kronecker product a (x) b, first factor major.
Mat tensor(const Mat& a, const Mat& b);

/// Entrywise transpose (no conjugation) in the standard basis.
/// Throws ValidationError on non-square input.
Mat transpose_in_basis(const Mat& b);

/// Trace over the named factor; preserves the total trace.
Mat partial_trace(const Mat& x, Dims d, Factor which);

/// Transpose applied blockwise to the named factor.
Mat partial_transpose(const Mat& x, Dims d, Factor which);

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition with a deterministic contract
// ---------------------------------------------------------------------------

/// Eigenvalues sorted descending; eigenvector columns phase-normalized so the
/// first entry of magnitude > 1e-12 is real positive; exact ties broken by
/// lexicographic order on the normalized entries.
struct HermEig {
  RVec values;
  Mat vectors;
};

/// Throws ValidationError if x is not self-adjoint within tol, NumericalError
/// if the reconstruction residual exceeds 1e-10 * ||x||_F.
HermEig herm_eig(const Mat& x, double tol = kDefaultTol);

bool is_hermitian(const Mat& x, double tol = kDefaultTol);

/// lambda_min(x) >= -tol, for self-adjoint x.
bool is_psd(const Mat& x, double tol = kDefaultTol);

/// Smallest eigenvalue of the self-adjoint part (x + x*)/2.
double min_eigenvalue(const Mat& x);

/// PSD square root of a PSD matrix (eigenvalues clipped at zero).
Mat psd_sqrt(const Mat& x);

/// Inverse PSD square root; throws NumericalError when an eigenvalue falls
/// below floor.
Mat psd_inv_sqrt(const Mat& x, double floor = 1e-12);

// ---------------------------------------------------------------------------
// Vectorization (row-major), matching the JSON layout
// ---------------------------------------------------------------------------

Vec vectorize(const Mat& x);
Mat unvectorize(const Vec& v, Index rows, Index cols);

/// Orthonormal basis of the span of the given equally-sized matrices under
/// <x,y> = Tr(x* y), via SVD with relative cutoff rank_tol. A retained
/// singular value below cond_floor * smax means the rank decision is
/// ill-conditioned and raises NumericalError (cond_floor = 0 disables).
std::vector<Mat> orthonormal_matrix_basis(const std::vector<Mat>& mats,
                                          double rank_tol = 1e-8,
                                          double cond_floor = 0.0);

}  // namespace opalg
