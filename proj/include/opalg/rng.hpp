#pragma once

#include <cstdint>
#include <random>

#include "opalg/core.hpp"

namespace opalg {

/// Seeded random source. Gaussians come from Box-Muller over the raw
/// mt19937_64 stream so that every draw is a pure function of the seed,
/// independent of the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % span);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Complex cnormal() {
    const double re = normal(), im = normal();
    return Complex(re, im) / std::sqrt(2.0);
  }

  Mat ginibre(Index rows, Index cols) {
    Mat g(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) g(i, j) = cnormal();
    return g;
  }

  Mat hermitian(Index n) {
    const Mat g = ginibre(n, n);
    return (g + g.adjoint()) / 2.0;
  }

  Mat psd(Index n, Index rank = -1) {
    const Mat g = ginibre(n, rank < 0 ? n : rank);
    return g * g.adjoint();
  }

  /// PSD with unit counting trace.
  Mat density(Index n, Index rank = -1) {
    const Mat p = psd(n, rank);
    return p / p.trace().real();
  }

  Vec unit_vector(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = cnormal();
    return v / v.norm();
  }

  /// Haar-ish unitary: QR of a Ginibre matrix with the R diagonal phase fixed.
  Mat unitary(Index n) {
    Eigen::HouseholderQR<Mat> qr(ginibre(n, n));
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < n; ++i) {
      const Complex d = r(i, i);
      q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0);
    }
    return q;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Derive an independent stream for a named subtask of a seeded computation.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step over seed ^ salt
  std::uint64_t z = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace opalg
