#pragma once

#include <vector>

#include "opalg/algebra.hpp"
#include "opalg/separability.hpp"

namespace opalg {

/// State on C^d (x) C^(2^K): the 2^infinity tower M_{2^k} truncated at K.
struct TowerState {
  Index a_dim = 0;
  int level = 0;
  Functional h;  ///< dims (a_dim, 2^level), PSD, unit counting-trace

  static TowerState make(Index a_dim, int level, Mat density);
};

/// Trace-invariant conditional expectation of M_{2^K} onto the embedded
/// M_{2^k} (x) I: E_k(x) = (id (x) normalized-trace)(x) (x) I. k = 0 is the
/// scalar case E_0(x) = Tr(x)/2^K * I.
LinMap conditional_expectation_level(int level_k_total, int k);

struct NuclearTriple {
  LinMap alpha;  ///< inclusion of the ambient M_d (identity embedding)
  LinMap beta;   ///< conditional expectation onto A
  Index through_dim = 0;
};

/// Finite-dimensional nuclearity collapses the net to a single exact triple:
/// beta o alpha restricted to A is the identity; both maps CP.
NuclearTriple nuclear_triple(const StarAlgebra& a);

/// Compress to level k by tracing the tower tail (equivalently, E_k applied
/// to the B factor followed by tail compression; E_k is its own
/// counting-trace adjoint up to the embedding).
TowerState truncate_state(const TowerState& s, int k);

/// Push a product decomposition through truncation: each B factor is
/// tail-traced and renormalized. Never degrades a Separable verdict.
ProductDecomposition transport_decomposition(const ProductDecomposition& dec,
                                             Index a_dim, int from_level, int to_level);

struct TowerLevelReport {
  int level = 0;
  bool sweep_pass = false;
  double sweep_worst_value = 0.0;
  SepVerdict decomposition;
};

struct TowerScanReport {
  std::vector<TowerLevelReport> levels;
  bool monotone = true;  ///< no level fails while a higher level certified Separable
};

struct TowerScanOptions {
  SepOptions sep;
  std::uint64_t seed = 0;
  int n_decomposable = 16;
  int n_hardened = 4;
};

/// Per-level witness sweeps (psi families acting at level k are exactly the
/// E_k-lifted witnesses on the full space) plus decomposition verdicts.
TowerScanReport theorem8_scan(const TowerState& s, const TowerScanOptions& opts = {});

enum class TowerStateKind { SeparableMix, BellFirstFactor, Random };

TowerState random_tower_state(std::uint64_t seed, Index a_dim, int level,
                              TowerStateKind kind);

}  // namespace opalg
