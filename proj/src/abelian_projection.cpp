#include "opalg/abelian_projection.hpp"

#include <algorithm>
#include <cmath>

namespace opalg {

double centralizer_check(const Functional& rho, const std::vector<Mat>& elems) {
  double worst = 0.0;
  for (const Mat& e : elems) {
    if (e.rows() != rho.dim() || e.cols() != rho.dim())
      throw ValidationError("centralizer_check: element dimension mismatch");
    // |rho(e E_ij) - rho(E_ij e)| over matrix units = entries of [D, e]
    const Mat comm = rho.density * e - e * rho.density;
    worst = std::max(worst, comm.cwiseAbs().maxCoeff());
  }
  return worst;
}

AbelianProjectionData build_projection(const Functional& rho,
                                       const std::vector<Mat>& projections) {
  if (projections.empty())
    throw ValidationError("build_projection: at least one projection required");
  const Index n = rho.dim();
  if (!is_hermitian(rho.density, 1e-8))
    throw ValidationError("build_projection: rho density is not self-adjoint");
  if (min_eigenvalue(rho.density) <= 1e-10)
    throw ValidationError("build_projection: rho is not faithful");

  AbelianProjectionData data;
  data.rho.density = rho.density / rho.density.trace().real();
  data.projections = projections;

  Mat sum = Mat::Zero(n, n);
  for (size_t i = 0; i < projections.size(); ++i) {
    const Mat& e = projections[i];
    if (e.rows() != n || e.cols() != n)
      throw ValidationError("build_projection: projection dimension mismatch");
    if ((e * e - e).norm() > 1e-8 || !is_hermitian(e, 1e-8))
      throw ValidationError("build_projection: element is not a projection");
    for (size_t j = 0; j < i; ++j)
      if ((e * projections[j]).norm() > 1e-8)
        throw ValidationError("build_projection: projections are not orthogonal");
    sum += e;
  }
  if ((sum - Mat::Identity(n, n)).norm() > 1e-8)
    throw ValidationError("build_projection: projections do not resolve the identity");

  if (centralizer_check(data.rho, projections) > 1e-8)
    throw ValidationError(
        "build_projection: a projection fails the centralizer condition "
        "(rho o P = rho forces e_i into the centralizer)");

  const size_t k = projections.size();
  data.weights.resize(static_cast<Index>(k));
  for (size_t i = 0; i < k; ++i) {
    data.weights(static_cast<Index>(i)) =
        (data.rho.density * projections[i]).trace().real();
    if (data.weights(static_cast<Index>(i)) <= 1e-12)
      throw ValidationError("build_projection: weight rho(e_i) below the 1e-12 floor");
  }

  const Functional rho_state = data.rho;
  const std::vector<Mat>& es = data.projections;
  const RVec& w = data.weights;
  data.projection_map = LinMap::from_function(n, n, [&](const Mat& a) {
    Mat out = Mat::Zero(n, n);
    for (size_t i = 0; i < es.size(); ++i) {
      const Complex c = (rho_state.density * es[i] * a * es[i]).trace();
      out += c / w(static_cast<Index>(i)) * es[i];
    }
    return out;
  });

  const LinMap& p = data.projection_map;
  data.unitality_residual =
      (p.apply(Mat::Identity(n, n)) - Mat::Identity(n, n)).norm();
  data.idempotency_residual =
      (p.compose(p).choi() - p.choi()).norm();
  const Mat rho_pull = adjoint_map(p).apply(data.rho.density);
  data.invariance_residual = (rho_pull - data.rho.density).norm();

  // omega_i(e_j) = delta_ij, with omega_i = rho(e_i)^{-1} rho(e_i . e_i)
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) {
      const double val =
          ((data.rho.density * es[i] * es[j] * es[i]).trace().real()) /
          w(static_cast<Index>(i));
      data.state_support_residual = std::max(
          data.state_support_residual, std::abs(val - (i == j ? 1.0 : 0.0)));
    }

  const double worst = std::max({data.unitality_residual, data.idempotency_residual,
                                 data.invariance_residual, data.state_support_residual});
  if (worst > 1e-9)
    throw NumericalError("build_projection: projection residuals exceed 1e-9");
  return data;
}

LinMap pinching_map(const AbelianProjectionData& data) {
  std::vector<Mat> kraus;
  for (size_t i = 0; i < data.projections.size(); ++i) {
    const Mat& e = data.projections[i];
    kraus.push_back(tensor(e, e.transpose()) /
                    std::sqrt(data.weights(static_cast<Index>(i))));
  }
  return LinMap::from_kraus(kraus);
}

double dual_identity_check(const AbelianProjectionData& data) {
  const Index n = data.rho.dim();
  const Functional dual = dual_functional(data.projection_map);
  const LinMap e_map = pinching_map(data);
  const Mat rho_tensor_id = tensor(data.rho.density, Mat::Identity(n, n));

  double worst = 0.0;
  for (Index a1 = 0; a1 < n; ++a1)
    for (Index a2 = 0; a2 < n; ++a2)
      for (Index b1 = 0; b1 < n; ++b1)
        for (Index b2 = 0; b2 < n; ++b2) {
          const Mat x = tensor(matrix_unit(n, a1, a2), matrix_unit(n, b1, b2));
          const Complex lhs = dual.value(x);
          const Complex rhs = (rho_tensor_id * e_map.apply(x)).trace();
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

}  // namespace opalg
