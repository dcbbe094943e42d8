#include <doctest.h>

#include "opalg/core.hpp"
#include "opalg/rng.hpp"

using namespace opalg;

namespace {

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_y() {
  Mat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Bell density built directly from the ket (|00> + |11>)/sqrt(2); independent
// of partial_trace / partial_transpose.
Mat bell_density() {
  Vec psi = Vec::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

}  // namespace

TEST_CASE("tensor: identity, diagonal placement, basis action") {
  CHECK((tensor(Mat::Identity(2, 2), Mat::Identity(2, 2)) - Mat::Identity(4, 4)).norm() ==
        doctest::Approx(0.0));

  Mat d1 = Mat::Zero(2, 2), d2 = Mat::Zero(2, 2);
  d1(0, 0) = 1;
  d2(1, 1) = 1;
  Mat expect = Mat::Zero(4, 4);
  expect(1, 1) = 1;  // index (0,1) -> 0*2+1
  CHECK((tensor(d1, d2) - expect).norm() == doctest::Approx(0.0));

  // sigma_x (x) sigma_x maps e_0 to e_3: (x (x) x)|00> = |11>
  Vec e0 = Vec::Zero(4);
  e0(0) = 1;
  Vec out = tensor(pauli_x(), pauli_x()) * e0;
  CHECK(std::abs(out(3) - Complex(1, 0)) < 1e-15);
  CHECK(out.norm() == doctest::Approx(1.0));
}

TEST_CASE("transpose_in_basis: antisymmetry of sigma_y, diagonal fixed point, unit swap") {
  CHECK((transpose_in_basis(pauli_y()) + pauli_y()).norm() == doctest::Approx(0.0));

  Mat d(3, 3);
  d.setZero();
  d(0, 0) = 1;
  d(1, 1) = 2;
  d(2, 2) = 3;
  CHECK((transpose_in_basis(d) - d).norm() == doctest::Approx(0.0));

  CHECK((transpose_in_basis(matrix_unit(2, 0, 1)) - matrix_unit(2, 1, 0)).norm() ==
        doctest::Approx(0.0));

  CHECK_THROWS_AS(transpose_in_basis(Mat::Zero(2, 3)), ValidationError);
}

TEST_CASE("partial_trace: product factorization, Bell marginal, identity") {
  Rng rng(7);
  const Mat a = rng.ginibre(2, 2), b = rng.ginibre(3, 3);
  const Mat ab = tensor(a, b);
  CHECK((partial_trace(ab, {2, 3}, Factor::B) - b.trace() * a).norm() < 1e-12);
  CHECK((partial_trace(ab, {2, 3}, Factor::A) - a.trace() * b).norm() < 1e-12);

  // Bell marginal is maximally mixed (computed from the ket directly)
  CHECK((partial_trace(bell_density(), {2, 2}, Factor::B) - Mat::Identity(2, 2) / 2.0)
            .norm() < 1e-14);

  CHECK((partial_trace(Mat::Identity(4, 4), {2, 2}, Factor::A) - 2.0 * Mat::Identity(2, 2))
            .norm() < 1e-14);

  CHECK_THROWS_AS(partial_trace(Mat::Identity(4, 4), {0, 0}, Factor::A), ValidationError);
}

TEST_CASE("partial_transpose: product case, Bell spectrum, involution") {
  Rng rng(11);
  const Mat a = rng.ginibre(2, 2), b = rng.ginibre(2, 2);
  CHECK((partial_transpose(tensor(a, b), {2, 2}, Factor::B) - tensor(a, b.transpose()))
            .norm() < 1e-12);

  // eigenvalues {1/2, 1/2, 1/2, -1/2}: the PT of the Bell state is the swap/2
  const HermEig eig = herm_eig(partial_transpose(bell_density(), {2, 2}, Factor::B));
  CHECK(eig.values(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eig.values(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eig.values(2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eig.values(3) == doctest::Approx(-0.5).epsilon(1e-12));

  const Mat x = rng.ginibre(6, 6);
  CHECK((partial_transpose(partial_transpose(x, {2, 3}, Factor::B), {2, 3}, Factor::B) - x)
            .norm() < 1e-13);
}

TEST_CASE("herm_eig: identity, sigma_z, sigma_x eigenvectors") {
  const HermEig id3 = herm_eig(Mat::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(id3.values(i) == doctest::Approx(1.0));

  const HermEig z = herm_eig(pauli_z());
  CHECK(z.values(0) == doctest::Approx(1.0));
  CHECK(z.values(1) == doctest::Approx(-1.0));

  const HermEig x = herm_eig(pauli_x());
  CHECK(x.values(0) == doctest::Approx(1.0));
  CHECK(x.values(1) == doctest::Approx(-1.0));
  // eigenvectors (1, 1)/sqrt(2) and (1, -1)/sqrt(2) after phase normalization
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(x.vectors(0, 0) - Complex(s, 0)) < 1e-12);
  CHECK(std::abs(x.vectors(1, 0) - Complex(s, 0)) < 1e-12);
  CHECK(std::abs(x.vectors(0, 1) - Complex(s, 0)) < 1e-12);
  CHECK(std::abs(x.vectors(1, 1) - Complex(-s, 0)) < 1e-12);

  CHECK_THROWS_AS(herm_eig(matrix_unit(2, 0, 1)), ValidationError);
}

TEST_CASE("property: trace multiplicativity of tensor") {
  Rng rng(23);
  for (int t = 0; t < 40; ++t) {
    const Index na = 1 + static_cast<Index>(rng.uniform_int(0, 3));
    const Index nb = 1 + static_cast<Index>(rng.uniform_int(0, 3));
    const Mat a = rng.ginibre(na, na), b = rng.ginibre(nb, nb);
    CHECK(std::abs(tensor(a, b).trace() - a.trace() * b.trace()) < 1e-10);
  }
}

TEST_CASE("property: partial transpose commutes with adjoint and preserves block traces") {
  Rng rng(29);
  for (int t = 0; t < 40; ++t) {
    const Dims d{2, 3};
    const Mat x = rng.ginibre(6, 6);
    const Mat lhs = partial_transpose(x, d, Factor::B).adjoint();
    const Mat rhs = partial_transpose(x.adjoint(), d, Factor::B);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK((partial_trace(partial_transpose(x, d, Factor::B), d, Factor::B) -
           partial_trace(x, d, Factor::B))
              .norm() < 1e-12);
    CHECK(std::abs(partial_transpose(x, d, Factor::A).trace() - x.trace()) < 1e-12);
  }
}

TEST_CASE("property: herm_eig reconstruction on random self-adjoint matrices up to 64") {
  Rng rng(31);
  for (Index n : {2, 5, 16, 64}) {
    const Mat h = rng.hermitian(n);
    const HermEig eig = herm_eig(h);
    const Mat recon = eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    CHECK((recon - h).norm() <= 1e-10 * h.norm());
    CHECK((eig.vectors.adjoint() * eig.vectors - Mat::Identity(n, n)).norm() < 1e-12 * n);
    for (Index i = 1; i < n; ++i) CHECK(eig.values(i - 1) >= eig.values(i));
  }
}

TEST_CASE("herm_eig is deterministic across repeated calls") {
  Rng rng(37);
  const Mat h = rng.hermitian(8);
  const HermEig a = herm_eig(h), b = herm_eig(h);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
  CHECK((a.values - b.values).norm() == 0.0);
}

TEST_CASE("orthonormal_matrix_basis: rank detection and conditioning guard") {
  Rng rng(41);
  const Mat a = rng.ginibre(3, 3), b = rng.ginibre(3, 3);
  const std::vector<Mat> basis = orthonormal_matrix_basis({a, b, a + b, 2.0 * a});
  CHECK(basis.size() == 2);
  for (const Mat& x : basis)
    CHECK(std::abs((x.adjoint() * x).trace().real() - 1.0) < 1e-12);

  // a direction present only at scale 1e-7 makes the rank decision ambiguous
  const Mat tiny = a + 1e-7 * b;
  CHECK_THROWS_AS(orthonormal_matrix_basis({a, tiny}, 1e-8, 1e-6), NumericalError);
}
