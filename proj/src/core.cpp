#include "opalg/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <vector>

namespace opalg {

Mat matrix_unit(Index n, Index i, Index j) {
  Mat e = Mat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat transpose_in_basis(const Mat& b) {
  if (b.rows() != b.cols())
    throw ValidationError("transpose_in_basis: input must be square");
  return b.transpose();
}

static void check_dims(const Mat& x, Dims d, const char* who) {
  if (d.a < 1 || d.b < 1)
    throw ValidationError(std::string(who) + ": bipartite dims annotation missing or invalid");
  if (x.rows() != x.cols() || x.rows() != d.total())
    throw ValidationError(std::string(who) + ": matrix size does not match dims annotation");
}

Mat partial_trace(const Mat& x, Dims d, Factor which) {
  check_dims(x, d, "partial_trace");
  if (which == Factor::B) {
    Mat out = Mat::Zero(d.a, d.a);
    for (Index i = 0; i < d.a; ++i)
      for (Index j = 0; j < d.a; ++j)
        for (Index k = 0; k < d.b; ++k)
          out(i, j) += x(i * d.b + k, j * d.b + k);
    return out;
  }
  Mat out = Mat::Zero(d.b, d.b);
  for (Index k = 0; k < d.b; ++k)
    for (Index l = 0; l < d.b; ++l)
      for (Index i = 0; i < d.a; ++i)
        out(k, l) += x(i * d.b + k, i * d.b + l);
  return out;
}

Mat partial_transpose(const Mat& x, Dims d, Factor which) {
  check_dims(x, d, "partial_transpose");
  Mat out(x.rows(), x.cols());
  for (Index i = 0; i < d.a; ++i)
    for (Index j = 0; j < d.a; ++j)
      for (Index k = 0; k < d.b; ++k)
        for (Index l = 0; l < d.b; ++l) {
          if (which == Factor::B)
            out(i * d.b + k, j * d.b + l) = x(i * d.b + l, j * d.b + k);
          else
            out(i * d.b + k, j * d.b + l) = x(j * d.b + k, i * d.b + l);
        }
  return out;
}

bool is_hermitian(const Mat& x, double tol) {
  if (x.rows() != x.cols()) return false;
  return (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

// Phase-normalize a column: first entry with |z| > 1e-12 made real positive.
void normalize_phase(Eigen::Ref<Vec> col) {
  for (Index i = 0; i < col.size(); ++i) {
    const Complex z = col(i);
    if (std::abs(z) > 1e-12) {
      col *= std::conj(z) / std::abs(z);
      return;
    }
  }
}

bool column_lex_less(const Vec& a, const Vec& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

HermEig herm_eig(const Mat& x, double tol) {
  if (!is_hermitian(x, tol))
    throw ValidationError("herm_eig: input is not self-adjoint within tol");
  Eigen::SelfAdjointEigenSolver<Mat> es((x + x.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw NumericalError("herm_eig: eigensolver did not converge");

  const Index n = x.rows();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  Mat vecs = es.eigenvectors();
  for (Index c = 0; c < n; ++c) normalize_phase(vecs.col(c));

  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    if (es.eigenvalues()(i) != es.eigenvalues()(j))
      return es.eigenvalues()(i) > es.eigenvalues()(j);
    return column_lex_less(vecs.col(i), vecs.col(j));
  });

  HermEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index c = 0; c < n; ++c) {
    out.values(c) = es.eigenvalues()(order[static_cast<size_t>(c)]);
    out.vectors.col(c) = vecs.col(order[static_cast<size_t>(c)]);
  }

  const double residual =
      (out.vectors * out.values.asDiagonal() * out.vectors.adjoint() - x).norm();
  if (residual > 1e-10 * std::max(1.0, x.norm()))
    throw NumericalError("herm_eig: reconstruction residual exceeds 1e-10 * ||x||");
  return out;
}

bool is_psd(const Mat& x, double tol) {
  return is_hermitian(x, tol) && min_eigenvalue(x) >= -tol;
}

double min_eigenvalue(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es((x + x.adjoint()) / 2.0,
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat psd_sqrt(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es((x + x.adjoint()) / 2.0);
  RVec clipped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

Mat psd_inv_sqrt(const Mat& x, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es((x + x.adjoint()) / 2.0);
  if (es.eigenvalues().minCoeff() < floor)
    throw NumericalError("psd_inv_sqrt: eigenvalue below invertibility floor");
  RVec inv = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Vec vectorize(const Mat& x) {
  Vec v(x.size());
  Index k = 0;
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) v(k++) = x(i, j);
  return v;
}

Mat unvectorize(const Vec& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw ValidationError("unvectorize: length does not match shape");
  Mat x(rows, cols);
  Index k = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) x(i, j) = v(k++);
  return x;
}

std::vector<Mat> orthonormal_matrix_basis(const std::vector<Mat>& mats,
                                          double rank_tol, double cond_floor) {
  if (mats.empty()) return {};
  const Index r = mats.front().rows(), c = mats.front().cols();
  double max_nrm = 0.0;
  for (const Mat& m : mats) {
    if (m.rows() != r || m.cols() != c)
      throw ValidationError("orthonormal_matrix_basis: mixed matrix shapes");
    max_nrm = std::max(max_nrm, m.norm());
  }
  Mat stacked(r * c, static_cast<Index>(mats.size()));
  for (size_t k = 0; k < mats.size(); ++k) {
    const double nrm = mats[k].norm();
    // quasi-zero members are numerical noise; normalizing them would promote
    // garbage directions to full-strength columns
    if (nrm > 1e-12 * max_nrm)
      stacked.col(static_cast<Index>(k)) = vectorize(mats[k]) / nrm;
    else
      stacked.col(static_cast<Index>(k)).setZero();
  }
  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinU);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (smax == 0.0) return {};

  std::vector<Mat> basis;
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    const double s = svd.singularValues()(k);
    if (s <= rank_tol * smax) break;
    if (cond_floor > 0 && s < cond_floor * smax)
      throw NumericalError(
          "orthonormal_matrix_basis: Gram conditioning degraded below floor");
    basis.push_back(unvectorize(svd.matrixU().col(k), r, c));
  }
  return basis;
}

}  // namespace opalg
