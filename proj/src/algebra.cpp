#include "opalg/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace opalg {

AlgebraResiduals algebra_residuals(const StarAlgebra& a) {
  AlgebraResiduals r;
  for (size_t i = 0; i < a.basis.size(); ++i) {
    for (size_t j = 0; j < a.basis.size(); ++j) {
      const Complex g = (a.basis[i].adjoint() * a.basis[j]).trace();
      r.gram = std::max(r.gram, std::abs(g - (i == j ? Complex(1, 0) : Complex(0, 0))));
      r.product = std::max(r.product, span_residual(a, a.basis[i] * a.basis[j]));
    }
    r.adjoint = std::max(r.adjoint, span_residual(a, a.basis[i].adjoint()));
  }
  return r;
}

StarAlgebra span_closure(const std::vector<Mat>& generators) {
  if (generators.empty())
    throw ValidationError("span_closure: at least one generator required");
  const Index n = generators.front().rows();
  for (const Mat& g : generators)
    if (g.rows() != n || g.cols() != n)
      throw ValidationError("span_closure: generators of mixed dimension");

  std::vector<Mat> pool = generators;
  for (const Mat& g : generators) pool.push_back(g.adjoint());
  std::vector<Mat> basis = orthonormal_matrix_basis(pool, 1e-8, 1e-6);

  while (true) {
    std::vector<Mat> extended = basis;
    for (const Mat& x : basis) {
      extended.push_back(x.adjoint());
      for (const Mat& y : basis) extended.push_back(x * y);
    }
    std::vector<Mat> next = orthonormal_matrix_basis(extended, 1e-8, 1e-6);
    const bool stable = next.size() == basis.size();
    basis = std::move(next);
    if (stable || static_cast<Index>(basis.size()) >= n * n) break;
  }

  StarAlgebra a;
  a.ambient_dim = n;
  a.basis = std::move(basis);
  a.contains_unit = span_contains(a, Mat::Identity(n, n), 1e-8);
  return a;
}

bool is_abelian(const StarAlgebra& a, double tol) {
  for (size_t i = 0; i < a.basis.size(); ++i)
    for (size_t j = i + 1; j < a.basis.size(); ++j)
      if ((a.basis[i] * a.basis[j] - a.basis[j] * a.basis[i]).norm() > tol)
        return false;
  return true;
}

Mat project_onto_span(const StarAlgebra& a, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const Mat& b : a.basis) out += (b.adjoint() * x).trace() * b;
  return out;
}

double span_residual(const StarAlgebra& a, const Mat& x) {
  return (x - project_onto_span(a, x)).norm();
}

bool span_contains(const StarAlgebra& a, const Mat& x, double tol) {
  return span_residual(a, x) <= tol;
}

LinMap conditional_expectation(const StarAlgebra& a) {
  if (!a.contains_unit)
    throw ValidationError("conditional_expectation: algebra does not contain the unit");
  return LinMap::from_function(a.ambient_dim, a.ambient_dim,
                               [&a](const Mat& x) { return project_onto_span(a, x); });
}

Mat jordan_product(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ValidationError("jordan_product: dimension mismatch");
  return (a * b + b * a) / 2.0;
}

std::vector<Mat> minimal_projections(const StarAlgebra& a, std::uint64_t seed) {
  if (!is_abelian(a, 1e-8))
    throw ValidationError("minimal_projections: algebra is not abelian");
  if (!a.contains_unit)
    throw ValidationError("minimal_projections: algebra does not contain the unit");

  const Index k = a.dim();
  Rng rng(substream(seed, 0x3147));

  for (int attempt = 0; attempt < 10; ++attempt) {
    // generic self-adjoint combination of the basis
    Mat h = Mat::Zero(a.ambient_dim, a.ambient_dim);
    for (const Mat& b : a.basis) h += rng.normal() * b;
    h = (h + h.adjoint()).eval() / 2.0;

    const HermEig eig = herm_eig(h, 1e-8);
    // group eigenvalues: a gap above the noise scale separates joint eigenspaces
    const double scale = std::max(1.0, std::abs(eig.values(0)));
    std::vector<std::pair<Index, Index>> groups;  // [begin, end)
    Index begin = 0;
    for (Index i = 1; i <= eig.values.size(); ++i) {
      if (i == eig.values.size() ||
          eig.values(i - 1) - eig.values(i) > 1e-6 * scale) {
        groups.emplace_back(begin, i);
        begin = i;
      }
    }
    if (static_cast<Index>(groups.size()) != k) continue;

    std::vector<Mat> projections;
    bool ok = true;
    for (auto [b0, b1] : groups) {
      Mat p = Mat::Zero(a.ambient_dim, a.ambient_dim);
      for (Index c = b0; c < b1; ++c)
        p += eig.vectors.col(c) * eig.vectors.col(c).adjoint();
      if (span_residual(a, p) > 1e-7) {
        ok = false;
        break;
      }
      projections.push_back(std::move(p));
    }
    if (!ok) continue;

    // deterministic order: lexicographic on rounded entries
    std::sort(projections.begin(), projections.end(), [](const Mat& x, const Mat& y) {
      for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j) {
          const double xr = std::round(x(i, j).real() * 1e9);
          const double yr = std::round(y(i, j).real() * 1e9);
          if (xr != yr) return xr > yr;
          const double xi = std::round(x(i, j).imag() * 1e9);
          const double yi = std::round(y(i, j).imag() * 1e9);
          if (xi != yi) return xi > yi;
        }
      return false;
    });
    return projections;
  }
  throw NumericalError(
      "minimal_projections: no generic combination separated the joint eigenspaces");
}

StarAlgebra full_matrix_algebra(Index n) {
  std::vector<Mat> basis;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) basis.push_back(matrix_unit(n, i, j));
  StarAlgebra a;
  a.ambient_dim = n;
  a.basis = std::move(basis);
  a.contains_unit = true;
  return a;
}

StarAlgebra diagonal_algebra(Index n) {
  std::vector<Mat> basis;
  for (Index i = 0; i < n; ++i) basis.push_back(matrix_unit(n, i, i));
  StarAlgebra a;
  a.ambient_dim = n;
  a.basis = std::move(basis);
  a.contains_unit = true;
  return a;
}

StarAlgebra scalar_algebra(Index n) {
  StarAlgebra a;
  a.ambient_dim = n;
  a.basis = {Mat::Identity(n, n) / std::sqrt(static_cast<double>(n))};
  a.contains_unit = true;
  return a;
}

}  // namespace opalg
