#include "opalg/uhf_tower.hpp"

#include <algorithm>
#include <cmath>

namespace opalg {

namespace {

Index pow2(int k) { return Index{1} << k; }

}  // namespace

TowerState TowerState::make(Index a_dim, int level, Mat density) {
  if (a_dim < 1 || level < 1)
    throw ValidationError("TowerState: a_dim >= 1 and level >= 1 required");
  if (a_dim * pow2(level) > 64)
    throw ValidationError("TowerState: total dimension exceeds the desk-scale cap 64");
  const Dims d{a_dim, pow2(level)};
  if (density.rows() != d.total() || density.cols() != d.total())
    throw ValidationError("TowerState: density size does not match level");
  if (!is_hermitian(density, 1e-8) || min_eigenvalue(density) < -1e-8)
    throw ValidationError("TowerState: density must be PSD");
  if (std::abs(density.trace().real() - 1.0) > 1e-8)
    throw ValidationError("TowerState: density must have unit counting trace");
  TowerState s;
  s.a_dim = a_dim;
  s.level = level;
  s.h = Functional{d, std::move(density)};
  return s;
}

LinMap conditional_expectation_level(int level_k_total, int k) {
  if (k < 0 || k > level_k_total)
    throw ValidationError("conditional_expectation_level: k out of range [0, K]");
  const Index head = pow2(k), tail = pow2(level_k_total - k);
  return LinMap::from_function(head * tail, head * tail, [head, tail](const Mat& x) {
    const Mat reduced = partial_trace(x, {head, tail}, Factor::B);
    return Mat(tensor(reduced, Mat::Identity(tail, tail)) /
               static_cast<double>(tail));
  });
}

NuclearTriple nuclear_triple(const StarAlgebra& a) {
  NuclearTriple t;
  t.alpha = LinMap::identity(a.ambient_dim);
  t.beta = conditional_expectation(a);
  t.through_dim = a.ambient_dim;
  return t;
}

TowerState truncate_state(const TowerState& s, int k) {
  if (k < 1 || k > s.level)
    throw ValidationError("truncate_state: k out of range [1, level]");
  if (k == s.level) return s;
  const Index head = pow2(k), tail = pow2(s.level - k);
  // trace the tower tail: C^a (x) (C^head (x) C^tail) -> C^a (x) C^head
  const Dims inner{s.a_dim * head, tail};
  Mat reduced = partial_trace(s.h.density, inner, Factor::B);
  return TowerState::make(s.a_dim, k, std::move(reduced));
}

ProductDecomposition transport_decomposition(const ProductDecomposition& dec,
                                             Index a_dim, int from_level,
                                             int to_level) {
  if (to_level > from_level)
    throw ValidationError("transport_decomposition: target level above source");
  ProductDecomposition out;
  out.weights = dec.weights;
  out.factors_a = dec.factors_a;
  const Index head = pow2(to_level), tail = pow2(from_level - to_level);
  for (const Mat& b : dec.factors_b) {
    Mat rb = partial_trace(b, {head, tail}, Factor::B);
    const double tr = rb.trace().real();
    out.factors_b.push_back(tr > 0 ? Mat(rb / tr) : rb);
  }
  // ||ptr_tail(X)||_F <= sqrt(tail) ||X||_F, so the bound transports
  out.residual = dec.residual * std::sqrt(static_cast<double>(tail));
  (void)a_dim;
  return out;
}

TowerScanReport theorem8_scan(const TowerState& s, const TowerScanOptions& opts) {
  TowerScanReport rep;
  int best_separable_level = 0;
  int worst_failing_level = 0;

  for (int k = 1; k <= s.level; ++k) {
    const TowerState level_state = truncate_state(s, k);
    TowerLevelReport lr;
    lr.level = k;

    const PsiFamily fam =
        default_psi_family(pow2(k), substream(opts.seed, 0x8a0 + static_cast<std::uint64_t>(k)),
                           opts.n_decomposable, opts.n_hardened);
    const SweepResult sweep = witness_sweep(level_state.h, fam, opts.sep.tol);
    lr.sweep_pass = sweep.pass;
    lr.sweep_worst_value = sweep.worst_value;

    DecomposeOptions dopts = opts.sep.decompose;
    dopts.seed = substream(opts.seed, 0x8b0 + static_cast<std::uint64_t>(k));
    lr.decomposition = decompose_separable(level_state.h, dopts);

    if (lr.decomposition.verdict == Verdict::Separable)
      best_separable_level = std::max(best_separable_level, k);
    if (!lr.sweep_pass) worst_failing_level = std::max(worst_failing_level, k);
    rep.levels.push_back(std::move(lr));
  }

  // A sweep failure at level j <= i with a Separable certificate at level i
  // would contradict certificate transport.
  for (const TowerLevelReport& lr : rep.levels)
    if (!lr.sweep_pass && lr.level <= best_separable_level) rep.monotone = false;
  return rep;
}

TowerState random_tower_state(std::uint64_t seed, Index a_dim, int level,
                              TowerStateKind kind) {
  Rng rng(substream(seed, 0x709e2));
  const Index bd = pow2(level);
  const Index total = a_dim * bd;

  switch (kind) {
    case TowerStateKind::SeparableMix: {
      const int terms = 2 + static_cast<int>(rng.uniform_int(0, 3));
      Mat h = Mat::Zero(total, total);
      for (int t = 0; t < terms; ++t)
        h += rng.uniform() * tensor(rng.density(a_dim), rng.density(bd));
      h /= h.trace().real();
      return TowerState::make(a_dim, level, std::move(h));
    }
    case TowerStateKind::BellFirstFactor: {
      if (a_dim != 2 || level < 1)
        throw ValidationError("random_tower_state: Bell kind needs a_dim = 2");
      Vec bell = Vec::Zero(4);
      bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
      const Mat bell_density = bell * bell.adjoint();
      const Index tail = pow2(level - 1);
      Mat h = tensor(bell_density, Mat::Identity(tail, tail) / static_cast<double>(tail));
      return TowerState::make(a_dim, level, std::move(h));
    }
    default: {
      Mat h = rng.density(total);
      return TowerState::make(a_dim, level, std::move(h));
    }
  }
}

}  // namespace opalg
