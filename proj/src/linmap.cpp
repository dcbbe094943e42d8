#include "opalg/linmap.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace opalg {

LinMap LinMap::from_choi(Index dim_in, Index dim_out, Mat choi) {
  if (dim_in < 1 || dim_out < 1)
    throw ValidationError("LinMap: dimensions must be positive");
  if (choi.rows() != dim_in * dim_out || choi.cols() != dim_in * dim_out)
    throw ValidationError("LinMap: Choi matrix size must be (dim_in*dim_out)^2");
  return LinMap(dim_in, dim_out, std::move(choi));
}

LinMap LinMap::from_kraus(const std::vector<Mat>& kraus) {
  if (kraus.empty()) throw ValidationError("LinMap: empty Kraus list");
  const Index m = kraus.front().rows(), n = kraus.front().cols();
  Mat choi = Mat::Zero(n * m, n * m);
  for (const Mat& k : kraus) {
    if (k.rows() != m || k.cols() != n)
      throw ValidationError("LinMap: Kraus operators of mixed shape");
    // w[(i, alpha)] = K(alpha, i); choi += w w*
    Vec w(n * m);
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < m; ++a) w(i * m + a) = k(a, i);
    choi += w * w.adjoint();
  }
  return LinMap(n, m, std::move(choi));
}

LinMap LinMap::from_function(Index dim_in, Index dim_out,
                             const std::function<Mat(const Mat&)>& f) {
  Mat choi = Mat::Zero(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = 0; j < dim_in; ++j) {
      const Mat img = f(matrix_unit(dim_in, i, j));
      if (img.rows() != dim_out || img.cols() != dim_out)
        throw ValidationError("LinMap: function image has wrong dimension");
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = img;
    }
  return LinMap(dim_in, dim_out, std::move(choi));
}

LinMap LinMap::from_transfer(Index dim_in, Index dim_out, const Mat& t) {
  if (t.rows() != dim_out * dim_out || t.cols() != dim_in * dim_in)
    throw ValidationError("LinMap: transfer matrix shape mismatch");
  Mat choi(dim_in * dim_out, dim_in * dim_out);
  for (Index i = 0; i < dim_in; ++i)
    for (Index j = 0; j < dim_in; ++j)
      for (Index a = 0; a < dim_out; ++a)
        for (Index b = 0; b < dim_out; ++b)
          choi(i * dim_out + a, j * dim_out + b) = t(a * dim_out + b, i * dim_in + j);
  return LinMap(dim_in, dim_out, std::move(choi));
}

LinMap LinMap::identity(Index n) {
  return from_kraus({Mat::Identity(n, n)});
}

LinMap LinMap::transpose_map(Index n) {
  return from_function(n, n, [](const Mat& x) { return Mat(x.transpose()); });
}

LinMap LinMap::depolarizing_target(Index n) {
  return from_function(n, n, [n](const Mat& x) {
    return Mat(x.trace() / static_cast<double>(n) * Mat::Identity(n, n));
  });
}

Mat LinMap::transfer() const {
  Mat t(dim_out_ * dim_out_, dim_in_ * dim_in_);
  for (Index i = 0; i < dim_in_; ++i)
    for (Index j = 0; j < dim_in_; ++j)
      for (Index a = 0; a < dim_out_; ++a)
        for (Index b = 0; b < dim_out_; ++b)
          t(a * dim_out_ + b, i * dim_in_ + j) = choi_(i * dim_out_ + a, j * dim_out_ + b);
  return t;
}

Mat LinMap::apply(const Mat& a) const {
  if (a.rows() != dim_in_ || a.cols() != dim_in_)
    throw ValidationError("LinMap::apply: argument dimension mismatch");
  Mat out = Mat::Zero(dim_out_, dim_out_);
  for (Index i = 0; i < dim_in_; ++i)
    for (Index j = 0; j < dim_in_; ++j)
      out += a(i, j) * choi_.block(i * dim_out_, j * dim_out_, dim_out_, dim_out_);
  return out;
}

LinMap LinMap::compose(const LinMap& inner) const {
  if (inner.dim_out_ != dim_in_)
    throw ValidationError("LinMap::compose: dimension mismatch");
  return from_transfer(inner.dim_in_, dim_out_, transfer() * inner.transfer());
}

LinMap LinMap::operator+(const LinMap& other) const {
  if (other.dim_in_ != dim_in_ || other.dim_out_ != dim_out_)
    throw ValidationError("LinMap: sum of maps with different shapes");
  return LinMap(dim_in_, dim_out_, choi_ + other.choi_);
}

LinMap LinMap::operator-(const LinMap& other) const {
  if (other.dim_in_ != dim_in_ || other.dim_out_ != dim_out_)
    throw ValidationError("LinMap: difference of maps with different shapes");
  return LinMap(dim_in_, dim_out_, choi_ - other.choi_);
}

LinMap LinMap::scaled(double c) const { return LinMap(dim_in_, dim_out_, c * choi_); }

bool LinMap::is_unital(double tol) const {
  return (apply(Mat::Identity(dim_in_, dim_in_)) - Mat::Identity(dim_out_, dim_out_))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

bool LinMap::is_trace_preserving(double tol) const {
  // Tr(phi(E_ij)) = delta_ij <=> ptrace_B(choi) = I_n
  const Mat red = partial_trace(choi_, {dim_in_, dim_out_}, Factor::B);
  return (red - Mat::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff() <= tol;
}

bool LinMap::is_hermiticity_preserving(double tol) const {
  return is_hermitian(choi_, tol);
}

Functional dual_functional(const LinMap& phi) {
  Functional f;
  f.dims = Dims{phi.dim_in(), phi.dim_out()};
  f.density = phi.choi().transpose();
  return f;
}

LinMap adjoint_map(const LinMap& eta) {
  const Index n = eta.dim_in(), m = eta.dim_out();
  Mat c(m * n, m * n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index l = 0; l < n; ++l)
        for (Index k = 0; k < n; ++k)
          c(i * n + l, j * n + k) = eta.choi()(k * m + j, l * m + i);
  return LinMap::from_choi(m, n, std::move(c));
}

Mat apply_to_factor(const LinMap& psi, const Mat& x, Dims d, Factor which) {
  if (x.rows() != d.total() || x.cols() != d.total())
    throw ValidationError("apply_to_factor: matrix size does not match dims");
  const Index acted = (which == Factor::B) ? d.b : d.a;
  if (psi.dim_in() != acted)
    throw ValidationError("apply_to_factor: map input dimension mismatch");
  const Index out = psi.dim_out();
  const Mat t = psi.transfer();

  if (which == Factor::B) {
    Mat res(d.a * out, d.a * out);
    for (Index i = 0; i < d.a; ++i)
      for (Index j = 0; j < d.a; ++j) {
        const Mat block = x.block(i * d.b, j * d.b, d.b, d.b);
        res.block(i * out, j * out, out, out) =
            unvectorize(t * vectorize(block), out, out);
      }
    return res;
  }
  // which == A: gather strided blocks
  Mat res = Mat::Zero(out * d.b, out * d.b);
  for (Index k = 0; k < d.b; ++k)
    for (Index l = 0; l < d.b; ++l) {
      Mat block(d.a, d.a);
      for (Index i = 0; i < d.a; ++i)
        for (Index j = 0; j < d.a; ++j) block(i, j) = x(i * d.b + k, j * d.b + l);
      const Mat img = unvectorize(t * vectorize(block), out, out);
      for (Index i = 0; i < out; ++i)
        for (Index j = 0; j < out; ++j) res(i * d.b + k, j * d.b + l) = img(i, j);
    }
  return res;
}

bool is_cp(const LinMap& phi, double tol) {
  return is_hermitian(phi.choi(), tol) && min_eigenvalue(phi.choi()) >= -tol;
}

ProductWitness min_product_expectation(const Mat& m, Dims d, Rng& rng,
                                       int restarts, int sweeps,
                                       double converge_tol) {
  if (restarts < 1) throw ValidationError("min_product_expectation: restarts >= 1");
  const Mat h = (m + m.adjoint()) / 2.0;
  ProductWitness best;
  best.value = std::numeric_limits<double>::infinity();

  Mat au(d.b, d.b), av(d.a, d.a);
  Eigen::SelfAdjointEigenSolver<Mat> es;
  for (int r = 0; r < restarts; ++r) {
    Vec u = rng.unit_vector(d.a);
    Vec v = rng.unit_vector(d.b);
    double val = std::numeric_limits<double>::infinity();
    for (int s = 0; s < sweeps; ++s) {
      // A_u(p,q) = <u (x) p| h |u (x) q>: acts on the second factor
      au.setZero();
      for (Index i = 0; i < d.a; ++i)
        for (Index j = 0; j < d.a; ++j)
          au += (std::conj(u(i)) * u(j)) * h.block(i * d.b, j * d.b, d.b, d.b);
      es.compute((au + au.adjoint()) / 2.0);
      v = es.eigenvectors().col(0);

      for (Index i = 0; i < d.a; ++i)
        for (Index j = 0; j < d.a; ++j)
          av(i, j) = (v.adjoint() * h.block(i * d.b, j * d.b, d.b, d.b) * v)(0, 0);
      es.compute((av + av.adjoint()) / 2.0);
      u = es.eigenvectors().col(0);
      const double next = es.eigenvalues()(0);
      if (std::abs(val - next) <= converge_tol * (1.0 + std::abs(next))) {
        val = next;
        break;
      }
      val = next;
    }
    if (val < best.value) {
      best.value = val;
      best.u = u;
      best.v = v;
    }
  }
  return best;
}

PositivityVerdict is_positive(const LinMap& phi, int restarts, double tol,
                              std::uint64_t seed) {
  Rng rng(seed);
  const ProductWitness w =
      min_product_expectation(phi.choi(), phi.choi_dims(), rng, restarts);
  PositivityVerdict verdict;
  if (w.value < -tol) {
    verdict.certified_not_positive = true;
    verdict.witness = w;
  }
  return verdict;
}

StinespringData stinespring(const LinMap& phi, double tol) {
  if (!is_cp(phi, tol))
    throw ValidationError("stinespring: map is not completely positive");
  if (!phi.is_unital(tol))
    throw ValidationError("stinespring: map is not unital");

  const Index n = phi.dim_in(), m = phi.dim_out();
  const HermEig eig = herm_eig(phi.choi(), tol);

  StinespringData out;
  for (Index t = 0; t < eig.values.size(); ++t) {
    if (eig.values(t) <= 1e-9) break;
    const double c = std::sqrt(eig.values(t));
    Mat k(m, n);
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < m; ++a) k(a, i) = c * eig.vectors(i * m + a, t);
    out.kraus.push_back(std::move(k));
  }
  const Index r = static_cast<Index>(out.kraus.size());
  out.rank = r;
  out.rep_dim = n * r;

  // V h = sum_t (K_t* h) (x) e_t: V[(i, t), j] = conj(K_t(j, i))
  out.isometry = Mat::Zero(n * r, m);
  for (Index t = 0; t < r; ++t)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j)
        out.isometry(i * r + t, j) = std::conj(out.kraus[static_cast<size_t>(t)](j, i));
  out.range_projection = out.isometry * out.isometry.adjoint();

  if ((out.isometry.adjoint() * out.isometry - Mat::Identity(m, m)).norm() > 1e-10 * m)
    throw NumericalError("stinespring: V*V = I residual exceeds 1e-10");
  return out;
}

// ---------------------------------------------------------------------------
// Random ensembles
// ---------------------------------------------------------------------------

LinMap random_cp(std::uint64_t seed, Index dim_in, Index dim_out, int size) {
  if (size < 1) throw ValidationError("random_cp: size >= 1");
  Rng rng(substream(seed, 0xc9));
  std::vector<Mat> kraus;
  for (int i = 0; i < size; ++i) kraus.push_back(rng.ginibre(dim_out, dim_in));
  return LinMap::from_kraus(kraus);
}

LinMap random_unital_cp(std::uint64_t seed, Index dim_in, Index dim_out, int size) {
  if (size < 1) throw ValidationError("random_unital_cp: size >= 1");
  Rng rng(substream(seed, 0x75));
  std::vector<Mat> kraus;
  Mat s = Mat::Zero(dim_out, dim_out);
  for (int i = 0; i < size; ++i) {
    kraus.push_back(rng.ginibre(dim_out, dim_in));
    s += kraus.back() * kraus.back().adjoint();
  }
  const Mat whiten = psd_inv_sqrt(s);
  for (Mat& k : kraus) k = whiten * k;
  return LinMap::from_kraus(kraus);
}

LinMap random_copositive(std::uint64_t seed, Index dim_in, Index dim_out, int size) {
  return random_cp(seed, dim_in, dim_out, size)
      .compose(LinMap::transpose_map(dim_in));
}

LinMap random_decomposable(std::uint64_t seed, Index dim_in, Index dim_out, int size) {
  const int cp_part = (size + 1) / 2, cop_part = std::max(1, size - cp_part);
  return random_cp(substream(seed, 1), dim_in, dim_out, cp_part) +
         random_copositive(substream(seed, 2), dim_in, dim_out, cop_part);
}

LinMap random_eb(std::uint64_t seed, Index dim_in, Index dim_out, int size,
                 bool unital, HolevoForm* form) {
  if (size < 1) throw ValidationError("random_eb: size >= 1");
  Rng rng(substream(seed, 0xeb));
  HolevoForm hf;
  Mat total = Mat::Zero(dim_out, dim_out);
  for (int i = 0; i < size; ++i) {
    hf.state_densities.push_back(rng.density(dim_in));
    hf.effects.push_back(rng.psd(dim_out));
    total += hf.effects.back();
  }
  if (unital) {
    const Mat w = psd_inv_sqrt(total);
    for (Mat& a : hf.effects) a = w * a * w;
  }
  Mat choi = Mat::Zero(dim_in * dim_out, dim_in * dim_out);
  for (int i = 0; i < size; ++i)
    choi += tensor(hf.state_densities[static_cast<size_t>(i)].transpose(),
                   hf.effects[static_cast<size_t>(i)]);
  if (form) *form = std::move(hf);
  return LinMap::from_choi(dim_in, dim_out, std::move(choi));
}

LinMap random_eb_projective(std::uint64_t seed, Index dim, int blocks,
                            HolevoForm* form) {
  Rng rng(substream(seed, 0x9e));
  if (blocks <= 0)
    blocks = static_cast<int>(rng.uniform_int(2, std::max<Index>(2, dim)));
  blocks = static_cast<int>(std::min<Index>(blocks, dim));

  // random block sizes >= 1 summing to dim
  std::vector<Index> sizes(static_cast<size_t>(blocks), 1);
  for (Index extra = dim - blocks; extra > 0; --extra)
    sizes[static_cast<size_t>(rng.uniform_int(0, blocks - 1))]++;

  const Mat u = rng.unitary(dim);
  HolevoForm hf;
  Mat choi = Mat::Zero(dim * dim, dim * dim);
  Index offset = 0;
  for (Index s : sizes) {
    Mat p = Mat::Zero(dim, dim);
    p.block(offset, offset, s, s) = Mat::Identity(s, s);
    const Mat e = u * p * u.adjoint();
    Mat d = e * rng.psd(dim) * e;
    d /= d.trace().real();
    hf.state_densities.push_back(d);
    hf.effects.push_back(e);
    choi += tensor(d.transpose(), e);
    offset += s;
  }
  if (form) *form = std::move(hf);
  return LinMap::from_choi(dim, dim, std::move(choi));
}

LinMap random_positive_hardened(std::uint64_t seed, Index dim, int restarts,
                                double margin) {
  Rng rng(substream(seed, 0x4a7d));
  Mat c = rng.hermitian(dim * dim);
  c /= c.norm();
  LinMap raw = LinMap::from_choi(dim, dim, std::move(c));

  Rng probe(substream(seed, 0x5c933));
  const ProductWitness w =
      min_product_expectation(raw.choi(), raw.choi_dims(), probe, restarts);
  // mix with the depolarizing channel until the product minimum clears margin
  const double mix = static_cast<double>(dim) * (std::max(0.0, -w.value) + margin);
  LinMap hardened = raw + LinMap::depolarizing_target(dim).scaled(mix);

  const PositivityVerdict check = is_positive(hardened, restarts, 1e-10,
                                              substream(seed, 0x811c));
  if (check.certified_not_positive)
    throw NumericalError("random_positive_hardened: screening found a witness");
  return hardened;
}

}  // namespace opalg
