#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "opalg/core.hpp"
#include "opalg/rng.hpp"

namespace opalg {

/// Linear map phi: M_n -> M_m, canonically stored as its Choi matrix
/// C = sum_ij E_ij (x) phi(E_ij), an (n*m) x (n*m) matrix with the input
/// factor major. Unnormalized, standard basis throughout.
class LinMap {
 public:
  LinMap() = default;

  static LinMap from_choi(Index dim_in, Index dim_out, Mat choi);
  static LinMap from_kraus(const std::vector<Mat>& kraus);
  static LinMap from_function(Index dim_in, Index dim_out,
                              const std::function<Mat(const Mat&)>& f);
  /// Superoperator matrix t acting on row-major vectorizations.
  static LinMap from_transfer(Index dim_in, Index dim_out, const Mat& t);

  static LinMap identity(Index n);
  static LinMap transpose_map(Index n);
  /// x -> Tr(x)/n * I_n (the completely depolarizing unital channel).
  static LinMap depolarizing_target(Index n);

  Index dim_in() const { return dim_in_; }
  Index dim_out() const { return dim_out_; }
  const Mat& choi() const { return choi_; }
  Dims choi_dims() const { return {dim_in_, dim_out_}; }

  Mat apply(const Mat& a) const;
  Mat transfer() const;

  /// (*this) o inner.
  LinMap compose(const LinMap& inner) const;

  LinMap operator+(const LinMap& other) const;
  LinMap operator-(const LinMap& other) const;
  LinMap scaled(double c) const;

  bool is_unital(double tol = kDefaultTol) const;
  bool is_trace_preserving(double tol = kDefaultTol) const;
  bool is_hermiticity_preserving(double tol = kDefaultTol) const;

 private:
  LinMap(Index n, Index m, Mat c)
      : dim_in_(n), dim_out_(m), choi_(std::move(c)) {}

  Index dim_in_ = 0;
  Index dim_out_ = 0;
  Mat choi_;
};

/// Linear functional on a matrix algebra (or a bipartite tensor product),
/// stored as its density D with respect to the counting trace:
/// value(x) = Tr(D x).
struct Functional {
  std::optional<Dims> dims;  ///< bipartite split, when the space is a tensor product
  Mat density;

  Index dim() const { return density.rows(); }
  Complex value(const Mat& x) const { return (density * x).trace(); }
  bool is_state(double tol = kDefaultTol) const {
    return is_psd(density, tol) && std::abs(density.trace() - Complex(1, 0)) <= tol;
  }
};

// ---------------------------------------------------------------------------
// Duality and adjoints
// ---------------------------------------------------------------------------

/// Dual functional on M_n (x) M_m with value(a (x) b) = Tr(phi(a) b^t);
/// its density is the global transpose of the Choi matrix.
Functional dual_functional(const LinMap& phi);

/// Unique eta* with Tr(eta(x) y) = Tr(x eta*(y)) for all x, y.
LinMap adjoint_map(const LinMap& eta);

/// Apply a map to one factor of a bipartite operator: (iota (x) psi)(x) for
/// which = B, (psi (x) iota)(x) for which = A. The acted factor of d must
/// equal psi.dim_in(); the result carries the replaced factor dimension.
Mat apply_to_factor(const LinMap& psi, const Mat& x, Dims d, Factor which);

// ---------------------------------------------------------------------------
// Positivity
// ---------------------------------------------------------------------------

/// Choi criterion: completely positive iff the Choi matrix is PSD.
bool is_cp(const LinMap& phi, double tol = kDefaultTol);

struct ProductWitness {
  Vec u;  ///< first-factor unit vector
  Vec v;  ///< second-factor unit vector
  double value = 0.0;
};

/// min over unit u, v of <u (x) v| M |u (x) v> by alternating closed-form
/// eigenvector updates from random starts. Returns the best witness found;
/// one-sided (an upper bound on the true product minimum).
ProductWitness min_product_expectation(const Mat& m, Dims d, Rng& rng,
                                       int restarts = 50, int sweeps = 200,
                                       double converge_tol = 1e-10);

struct PositivityVerdict {
  bool certified_not_positive = false;
  std::optional<ProductWitness> witness;  ///< present iff certified
};

/// Heuristic block-positivity test of the Choi matrix. A negative value below
/// -tol certifies non-positivity with a reproducible witness; otherwise the
/// verdict is ProbablyPositive (one-sided by design).
PositivityVerdict is_positive(const LinMap& phi, int restarts = 50,
                              double tol = kDefaultTol,
                              std::uint64_t seed = 0x7a51711e);

// ---------------------------------------------------------------------------
// Stinespring dilation
// ---------------------------------------------------------------------------

struct StinespringData {
  Index rank = 0;          ///< Kraus rank r
  Index rep_dim = 0;       ///< n * r
  Mat isometry;            ///< V: C^m -> C^n (x) C^r, V*V = I_m
  Mat range_projection;    ///< p = V V*
  std::vector<Mat> kraus;  ///< K_t: m x n, phi(a) = sum K_t a K_t*
};

/// Stinespring form of a unital CP map from the Choi eigendecomposition;
/// pi(a) = a (x) I_r and phi(a) = V* pi(a) V. Kraus rank threshold 1e-9 on
/// Choi eigenvalues. Throws ValidationError when phi is not unital CP.
StinespringData stinespring(const LinMap& phi, double tol = kDefaultTol);

// ---------------------------------------------------------------------------
// Seeded random ensembles. Deterministic functions of their arguments.
// ---------------------------------------------------------------------------

LinMap random_cp(std::uint64_t seed, Index dim_in, Index dim_out, int size);
LinMap random_unital_cp(std::uint64_t seed, Index dim_in, Index dim_out, int size);
LinMap random_copositive(std::uint64_t seed, Index dim_in, Index dim_out, int size);
LinMap random_decomposable(std::uint64_t seed, Index dim_in, Index dim_out, int size);

/// Holevo form phi(x) = sum_i omega_i(x) a_i kept alongside the map: the
/// Choi matrix then reads sum_i d_i^t (x) a_i, an explicit product
/// decomposition of the dual density.
struct HolevoForm {
  std::vector<Mat> state_densities;  ///< d_i, PSD unit trace, n x n
  std::vector<Mat> effects;          ///< a_i, PSD, m x m
};

LinMap random_eb(std::uint64_t seed, Index dim_in, Index dim_out, int size,
                 bool unital = false, HolevoForm* form = nullptr);

/// Unital EB map with definite set equal to the span of a random orthogonal
/// resolution of identity {e_i}: phi(x) = sum_i omega_i(x) e_i with omega_i
/// supported inside e_i. Its image equals phi of its definite set.
LinMap random_eb_projective(std::uint64_t seed, Index dim, int blocks = 0,
                            HolevoForm* form = nullptr);

/// Positive non-CP candidate: a hermiticity-preserving random map mixed with
/// enough of the depolarizing channel to clear the block-positivity optimizer
/// at margin, then re-screened by is_positive.
LinMap random_positive_hardened(std::uint64_t seed, Index dim, int restarts = 30,
                                double margin = 1e-3);

}  // namespace opalg
