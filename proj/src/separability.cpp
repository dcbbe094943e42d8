#include "opalg/separability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace opalg {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Separable: return "Separable";
    case Verdict::Entangled: return "Entangled";
    default: return "Undetermined";
  }
}

Mat ProductDecomposition::reconstruct() const {
  if (weights.empty()) return Mat();
  Mat out = Mat::Zero(factors_a.front().rows() * factors_b.front().rows(),
                      factors_a.front().rows() * factors_b.front().rows());
  for (size_t i = 0; i < weights.size(); ++i)
    out += weights[i] * tensor(factors_a[i], factors_b[i]);
  return out;
}

static Dims require_dims(const Functional& h, const char* who) {
  if (!h.dims)
    throw ValidationError(std::string(who) + ": bipartite dims annotation missing");
  if (h.density.rows() != h.dims->total())
    throw ValidationError(std::string(who) + ": density size does not match dims");
  return *h.dims;
}

PptResult ppt_check(const Functional& h, double tol) {
  const Dims d = require_dims(h, "ppt_check");
  if (!is_hermitian(h.density, 1e-8))
    throw ValidationError("ppt_check: density is not self-adjoint");
  const double lam = min_eigenvalue(partial_transpose(h.density, d, Factor::B));
  return {lam >= -tol, lam};
}

RealignmentResult realignment_check(const Functional& h, double tol) {
  const Dims d = require_dims(h, "realignment_check");
  // R[(a1,a2),(b1,b2)] = h[(a1,b1),(a2,b2)]
  Mat r(d.a * d.a, d.b * d.b);
  for (Index a1 = 0; a1 < d.a; ++a1)
    for (Index a2 = 0; a2 < d.a; ++a2)
      for (Index b1 = 0; b1 < d.b; ++b1)
        for (Index b2 = 0; b2 < d.b; ++b2)
          r(a1 * d.a + a2, b1 * d.b + b2) = h.density(a1 * d.b + b1, a2 * d.b + b2);
  const double value = Eigen::JacobiSVD<Mat>(r).singularValues().sum();
  return {value <= 1.0 + tol, value};
}

PsiFamily default_psi_family(Index dim, std::uint64_t seed, int n_decomposable,
                             int n_hardened) {
  PsiFamily fam;
  fam.maps.push_back(LinMap::identity(dim));
  fam.labels.push_back("identity");
  fam.maps.push_back(LinMap::transpose_map(dim));
  fam.labels.push_back("transpose");
  for (int i = 0; i < n_decomposable; ++i) {
    fam.maps.push_back(random_decomposable(substream(seed, 0xd00 + static_cast<std::uint64_t>(i)),
                                           dim, dim, 2));
    fam.labels.push_back("decomposable[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < n_hardened; ++i) {
    fam.maps.push_back(random_positive_hardened(
        substream(seed, 0xa00 + static_cast<std::uint64_t>(i)), dim));
    fam.labels.push_back("hardened[" + std::to_string(i) + "]");
  }
  return fam;
}

SweepResult witness_sweep(const Functional& h, const PsiFamily& family,
                          double tol) {
  const Dims d = require_dims(h, "witness_sweep");
  SweepResult res;
  res.pass = true;
  res.worst_value = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < family.maps.size(); ++i) {
    const LinMap adj = adjoint_map(family.maps[i]);
    const Mat density = apply_to_factor(adj, h.density, d, Factor::B);
    Eigen::SelfAdjointEigenSolver<Mat> es((density + density.adjoint()) / 2.0);
    const double lam = es.eigenvalues()(0);
    res.worst_value = std::min(res.worst_value, lam);
    if (lam < -tol) {
      res.pass = false;
      res.failing_index = static_cast<int>(i);
      WitnessViolation v;
      v.kind = "psi-sweep";
      v.psi = family.maps[i];
      v.eigenvector = es.eigenvectors().col(0);
      v.value = lam;
      res.violation = std::move(v);
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Conditional-gradient decomposition
// ---------------------------------------------------------------------------

namespace {

// Lawson-Hanson NNLS on the normal equations: min (1/2) w'Gw - c'w, w >= 0.
// Near-duplicate atoms make the Gram numerically singular, so the passive
// solves carry an adaptive ridge.
Eigen::VectorXd nnls(const Eigen::MatrixXd& g, const Eigen::VectorXd& c) {
  const Index n = c.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<Index> passive;
  std::vector<bool> in_passive(static_cast<size_t>(n), false);
  const double tol = 1e-10 * std::max(1.0, c.cwiseAbs().maxCoeff());

  auto solve_passive = [&](void) -> Eigen::VectorXd {
    const Index k = static_cast<Index>(passive.size());
    Eigen::MatrixXd gp(k, k);
    Eigen::VectorXd cp(k);
    for (Index i = 0; i < k; ++i) {
      cp(i) = c(passive[static_cast<size_t>(i)]);
      for (Index j = 0; j < k; ++j)
        gp(i, j) = g(passive[static_cast<size_t>(i)], passive[static_cast<size_t>(j)]);
    }
    const double scale = std::max(1e-300, gp.trace() / static_cast<double>(k));
    for (double ridge = 1e-13; ridge <= 1e-5; ridge *= 100.0) {
      Eigen::MatrixXd reg = gp;
      reg.diagonal().array() += ridge * scale;
      const Eigen::VectorXd z = reg.ldlt().solve(cp);
      if ((gp * z - cp).norm() <= 1e-9 * std::max(1.0, cp.norm()) || ridge >= 1e-5)
        return z;
    }
    return gp.ldlt().solve(cp);
  };

  for (Index outer = 0; outer < 2 * n + 20; ++outer) {
    const Eigen::VectorXd grad = c - g * w;
    Index best = -1;
    double best_val = tol;
    for (Index i = 0; i < n; ++i)
      if (!in_passive[static_cast<size_t>(i)] && grad(i) > best_val) {
        best_val = grad(i);
        best = i;
      }
    if (best < 0) break;
    passive.push_back(best);
    in_passive[static_cast<size_t>(best)] = true;

    for (Index inner = 0; inner < 3 * n + 10; ++inner) {
      Eigen::VectorXd z = solve_passive();
      bool all_positive = true;
      double alpha = 1.0;
      for (Index i = 0; i < static_cast<Index>(passive.size()); ++i) {
        if (z(i) <= 0) {
          all_positive = false;
          const double wi = w(passive[static_cast<size_t>(i)]);
          const double denom = wi - z(i);
          if (denom > 0) alpha = std::min(alpha, wi / denom);
        }
      }
      if (all_positive) {
        for (Index i = 0; i < static_cast<Index>(passive.size()); ++i)
          w(passive[static_cast<size_t>(i)]) = z(i);
        break;
      }
      for (Index i = 0; i < static_cast<Index>(passive.size()); ++i) {
        const Index idx = passive[static_cast<size_t>(i)];
        w(idx) += alpha * (z(i) - w(idx));
      }
      std::vector<Index> keep;
      for (Index idx : passive) {
        if (w(idx) > 1e-14) {
          keep.push_back(idx);
        } else {
          w(idx) = 0.0;
          in_passive[static_cast<size_t>(idx)] = false;
        }
      }
      passive = std::move(keep);
      if (passive.empty()) break;
    }
  }
  return w;
}

struct Atom {
  Vec u, v;
  Mat mat;  // uu* (x) vv*
};

Atom make_atom(const Vec& u, const Vec& v) {
  Atom a;
  a.u = u;
  a.v = v;
  a.mat = tensor(u * u.adjoint(), v * v.adjoint());
  return a;
}

double atom_overlap(const Atom& x, const Atom& y) {
  const double ou = std::norm((x.u.adjoint() * y.u)(0, 0));
  const double ov = std::norm((x.v.adjoint() * y.v)(0, 0));
  return ou * ov;
}

}  // namespace

SepVerdict decompose_separable(const Functional& h, const DecomposeOptions& opts) {
  const Dims d = require_dims(h, "decompose_separable");
  if (!is_hermitian(h.density, 1e-8))
    throw ValidationError("decompose_separable: density is not self-adjoint");
  if (min_eigenvalue(h.density) < -1e-8)
    throw ValidationError("decompose_separable: density is not PSD");
  if (std::abs(h.density.trace().real() - 1.0) > 1e-6)
    throw ValidationError("decompose_separable: density is not unit counting-trace");
  const Mat target = h.density / h.density.trace().real();

  Rng rng(substream(opts.seed, 0xf3a1));
  std::vector<Atom> atoms;
  std::vector<double> weights;
  Mat sigma = Mat::Zero(target.rows(), target.cols());
  double best_residual = target.norm();

  // Fully corrective step: free NNLS over the active atoms, then an exact
  // renormalization back onto the simplex (the drift is O(residual)). Applied
  // only when it does not worsen the residual, so a degenerate solve can
  // never trap the iteration.
  auto corrective = [&](void) {
    const Index k = static_cast<Index>(atoms.size());
    if (k == 0) return;
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd c(k);
    for (Index i = 0; i < k; ++i) {
      c(i) = ((atoms[static_cast<size_t>(i)].mat * target).trace()).real();
      for (Index j = 0; j <= i; ++j) {
        const double o =
            atom_overlap(atoms[static_cast<size_t>(i)], atoms[static_cast<size_t>(j)]);
        g(i, j) = o;
        g(j, i) = o;
      }
    }
    const Eigen::VectorXd w = nnls(g, c);
    double total = 0.0;
    for (Index i = 0; i < k; ++i) total += std::max(0.0, w(i));
    if (total <= 0) return;
    Mat candidate = Mat::Zero(target.rows(), target.cols());
    for (Index i = 0; i < k; ++i)
      if (w(i) > 1e-12) candidate += w(i) / total * atoms[static_cast<size_t>(i)].mat;
    if ((target - candidate).norm() > (target - sigma).norm()) return;

    std::vector<Atom> kept;
    std::vector<double> kw;
    for (Index i = 0; i < k; ++i)
      if (w(i) > 1e-12) {
        kept.push_back(std::move(atoms[static_cast<size_t>(i)]));
        kw.push_back(w(i) / total);
      }
    atoms = std::move(kept);
    weights = std::move(kw);
    sigma = std::move(candidate);
  };

  auto finalize = [&](double residual) -> SepVerdict {
    std::vector<double> w;
    std::vector<Mat> fa, fb;
    double total = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i)
      if (weights[i] >= opts.prune_below) total += weights[i];
    if (total <= 0) return {Verdict::Undetermined, BudgetExhausted{0, residual}};
    Mat recon = Mat::Zero(target.rows(), target.cols());
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (weights[i] < opts.prune_below) continue;
      w.push_back(weights[i] / total);
      fa.push_back(atoms[i].u * atoms[i].u.adjoint());
      fb.push_back(atoms[i].v * atoms[i].v.adjoint());
      recon += w.back() * atoms[i].mat;
    }
    ProductDecomposition dec;
    dec.weights = std::move(w);
    dec.factors_a = std::move(fa);
    dec.factors_b = std::move(fb);
    dec.residual = (target - recon).norm();
    if (dec.residual > opts.eps) return {Verdict::Undetermined, BudgetExhausted{0, dec.residual}};
    return {Verdict::Separable, std::move(dec)};
  };

  double stall_anchor = std::numeric_limits<double>::infinity();
  std::int64_t next_stall_check = opts.stall_window;
  std::int64_t corrective_interval = 25;
  std::int64_t next_corrective = 301;
  // Caratheodory: an optimal face needs at most dim+1 atoms over the
  // (nm)^2-dimensional Hermitian space; beyond that the set is churn.
  const size_t atom_cap = static_cast<size_t>(target.rows() * target.rows()) + 8;

  auto enforce_cap = [&](void) {
    while (atoms.size() > atom_cap) {
      size_t drop = 0;
      for (size_t i = 1; i < weights.size(); ++i)
        if (weights[i] < weights[drop]) drop = i;
      sigma -= weights[drop] * atoms[drop].mat;
      atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(drop));
      weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  };

  for (std::int64_t it = 1; it <= opts.max_iter; ++it) {
    const Mat grad = sigma - target;
    const ProductWitness lmo = min_product_expectation(
        grad, d, rng, opts.lmo_restarts, opts.lmo_sweeps);

    Atom cand = make_atom(lmo.u, lmo.v);
    Index idx = -1;
    for (size_t i = 0; i < atoms.size(); ++i)
      if (atom_overlap(cand, atoms[i]) > opts.merge_fidelity) {
        idx = static_cast<Index>(i);
        break;
      }
    if (idx < 0) {
      atoms.push_back(std::move(cand));
      weights.push_back(0.0);
      idx = static_cast<Index>(atoms.size()) - 1;
    }
    const Atom& a = atoms[static_cast<size_t>(idx)];

    // exact line search between sigma and the atom
    const Mat dir = a.mat - sigma;
    const double den = dir.squaredNorm();
    if (den > 0) {
      double gamma = ((target - sigma).cwiseProduct(dir.conjugate())).sum().real() / den;
      gamma = std::clamp(gamma, 0.0, 1.0);
      if (weights.size() == 1) gamma = 1.0;
      for (double& wi : weights) wi *= (1.0 - gamma);
      weights[static_cast<size_t>(idx)] += gamma;
      sigma = (1.0 - gamma) * sigma + gamma * a.mat;
    }

    if (it <= 300 || it >= next_corrective || atoms.size() > atom_cap) {
      const double before = (target - sigma).norm();
      corrective();
      enforce_cap();
      const double after = (target - sigma).norm();
      // back off while the reweighting stops paying
      if (it > 300) {
        corrective_interval = (before - after > 1e-9 * std::max(before, 1e-30))
                                  ? 25
                                  : std::min<std::int64_t>(2 * corrective_interval, 400);
        next_corrective = it + corrective_interval;
      }
    }

    const double residual = (target - sigma).norm();
    best_residual = std::min(best_residual, residual);
    if (residual <= opts.eps * 0.98) {
      corrective();
      SepVerdict v = finalize((target - sigma).norm());
      if (v.verdict == Verdict::Separable) return v;
    }
    if (opts.stall_window > 0 && it >= next_stall_check) {
      if (stall_anchor - best_residual <= 1e-6 * stall_anchor)
        return {Verdict::Undetermined, BudgetExhausted{it, best_residual}};
      stall_anchor = best_residual;
      next_stall_check = it + opts.stall_window;
    }
  }
  return {Verdict::Undetermined, BudgetExhausted{opts.max_iter, best_residual}};
}

// ---------------------------------------------------------------------------
// Verdict pipelines
// ---------------------------------------------------------------------------

static bool exact_dims(Dims d) {
  return (d.a == 2 && d.b == 2) || (d.a == 2 && d.b == 3) || (d.a == 3 && d.b == 2);
}

SepVerdict exact_low_dim_oracle(const Functional& h, const DecomposeOptions& opts) {
  const Dims d = require_dims(h, "exact_low_dim_oracle");
  if (!exact_dims(d))
    throw ValidationError("exact_low_dim_oracle: dims must be 2x2, 2x3 or 3x2");

  const PptResult ppt = ppt_check(h);
  if (!ppt.pass) {
    const HermEig eig = herm_eig(partial_transpose(h.density, d, Factor::B), 1e-8);
    WitnessViolation v;
    v.kind = "partial-transpose";
    v.eigenvector = eig.vectors.col(eig.vectors.cols() - 1);
    v.value = eig.values(eig.values.size() - 1);
    return {Verdict::Entangled, std::move(v)};
  }

  SepVerdict dec = decompose_separable(h, opts);
  if (dec.verdict != Verdict::Separable)
    throw NumericalError(
        "exact_low_dim_oracle: internal inconsistency - a PPT-pass state in "
        "exact dimensions failed the decomposition search");
  return dec;
}

SepVerdict separability_verdict(const Functional& h_in, const SepOptions& opts) {
  const Dims d = require_dims(h_in, "separability_verdict");
  if (!is_hermitian(h_in.density, 1e-8))
    throw ValidationError("separability_verdict: density is not self-adjoint");
  const double tr = h_in.density.trace().real();
  if (tr <= 1e-12)
    throw ValidationError("separability_verdict: density has non-positive trace");

  // a positive functional is the first requirement; a plain negative
  // eigenvalue is already a (psi = identity) violation
  {
    Eigen::SelfAdjointEigenSolver<Mat> es((h_in.density + h_in.density.adjoint()) / 2.0);
    if (es.eigenvalues()(0) < -1e-8 * std::max(1.0, tr)) {
      WitnessViolation v;
      v.kind = "positivity";
      v.eigenvector = es.eigenvectors().col(0);
      v.value = es.eigenvalues()(0);
      return {Verdict::Entangled, std::move(v)};
    }
  }

  Functional h;
  h.dims = h_in.dims;
  h.density = h_in.density / tr;
  if (exact_dims(d)) return exact_low_dim_oracle(h, opts.decompose);

  const PptResult ppt = ppt_check(h, opts.tol);
  if (!ppt.pass) {
    const HermEig eig = herm_eig(partial_transpose(h.density, d, Factor::B), 1e-8);
    WitnessViolation v;
    v.kind = "partial-transpose";
    v.eigenvector = eig.vectors.col(eig.vectors.cols() - 1);
    v.value = eig.values(eig.values.size() - 1);
    return {Verdict::Entangled, std::move(v)};
  }

  if (opts.use_realignment) {
    const RealignmentResult re = realignment_check(h, opts.tol);
    if (!re.pass) {
      WitnessViolation v;
      v.kind = "realignment";
      v.value = re.value;
      return {Verdict::Entangled, std::move(v)};
    }
  }

  if (opts.use_witness_sweep) {
    const PsiFamily fam = default_psi_family(d.b, substream(opts.decompose.seed, 0x517),
                                             opts.n_decomposable, opts.n_hardened);
    SweepResult sweep = witness_sweep(h, fam, opts.tol);
    if (!sweep.pass) return {Verdict::Entangled, std::move(*sweep.violation)};
  }

  return decompose_separable(h, opts.decompose);
}

SepVerdict is_eb(const LinMap& phi, const SepOptions& opts) {
  return separability_verdict(dual_functional(phi), opts);
}

double verify_certificate(const Functional& h, const SepVerdict& v) {
  const Dims d = require_dims(h, "verify_certificate");
  const double tr = h.density.trace().real();
  const Mat normalized = tr > 0 ? Mat(h.density / tr) : h.density;

  if (const auto* dec = std::get_if<ProductDecomposition>(&v.certificate)) {
    double worst = 0.0;
    double total = 0.0;
    for (size_t i = 0; i < dec->weights.size(); ++i) {
      if (dec->weights[i] <= 0) worst = std::max(worst, -dec->weights[i] + 1e-16);
      total += dec->weights[i];
      worst = std::max(worst, -min_eigenvalue(dec->factors_a[i]));
      worst = std::max(worst, -min_eigenvalue(dec->factors_b[i]));
      worst = std::max(worst, std::abs(dec->factors_a[i].trace().real() - 1.0));
      worst = std::max(worst, std::abs(dec->factors_b[i].trace().real() - 1.0));
    }
    worst = std::max(worst, std::abs(total - 1.0));
    const double recon = (normalized - dec->reconstruct()).norm();
    worst = std::max(worst, std::max(0.0, recon - dec->residual));
    return worst;
  }
  if (const auto* wit = std::get_if<WitnessViolation>(&v.certificate)) {
    auto rayleigh = [&](const Mat& m) {
      return (wit->eigenvector.adjoint() * m * wit->eigenvector)(0, 0).real();
    };
    if (wit->kind == "partial-transpose")
      return std::abs(rayleigh(partial_transpose(normalized, d, Factor::B)) - wit->value);
    if (wit->kind == "positivity")
      return std::abs(rayleigh(h.density) - wit->value);
    if (wit->kind == "psi-sweep" && wit->psi)
      return std::abs(
          rayleigh(apply_to_factor(adjoint_map(*wit->psi), normalized, d, Factor::B)) -
          wit->value);
    if (wit->kind == "realignment")
      return std::abs(realignment_check(Functional{h.dims, normalized}).value -
                      wit->value);
    return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Lemma 9 harness
// ---------------------------------------------------------------------------

Lemma9Report lemma9_harness(const StarAlgebra& a, Index dim_h, int samples,
                            std::uint64_t seed, const SepOptions& opts) {
  if (a.ambient_dim > dim_h)
    throw ValidationError(
        "lemma9_harness: requires ambient dim of A <= dim H; the cone "
        "equality can fail otherwise");
  if (!a.contains_unit)
    throw ValidationError("lemma9_harness: algebra must contain the unit");

  const Dims d{a.ambient_dim, dim_h};
  const PsiFamily fam = default_psi_family(dim_h, substream(seed, 0x91),
                                           opts.n_decomposable, opts.n_hardened);
  const LinMap ea = conditional_expectation(a);
  Rng rng(substream(seed, 0x92));

  Lemma9Report rep;
  // (a) positive combinations sum a_t (x) b_t stay in the cone
  for (int s = 0; s < samples; ++s) {
    Mat x = Mat::Zero(d.total(), d.total());
    const int terms = 1 + static_cast<int>(rng.uniform_int(0, 2));
    for (int t = 0; t < terms; ++t) {
      Mat r = Mat::Zero(a.ambient_dim, a.ambient_dim);
      for (const Mat& b : a.basis) r += Complex(rng.normal(), rng.normal()) * b;
      x += tensor(r.adjoint() * r, rng.psd(dim_h));
    }
    Functional f{d, x / x.trace().real()};
    const SweepResult sw = witness_sweep(f, fam, opts.tol);
    rep.cone_samples++;
    rep.worst_cone_violation = std::min(rep.worst_cone_violation, sw.worst_value);
    if (!sw.pass) rep.consistent = false;
  }

  // (b) sweep-passing PSD elements of span(A) (x) B(H) admit certificates
  // with factors projected back into A
  for (int s = 0; s < samples; ++s) {
    const Mat y = rng.density(d.total());
    Mat x = apply_to_factor(ea, y, d, Factor::A);
    x /= x.trace().real();
    Functional f{d, (x + x.adjoint()) / 2.0};
    rep.psd_samples++;
    const SweepResult sw = witness_sweep(f, fam, opts.tol);
    if (!sw.pass) continue;
    rep.sweep_passes++;

    DecomposeOptions dopts = opts.decompose;
    dopts.seed = substream(seed, 0x93 + static_cast<std::uint64_t>(s));
    const SepVerdict verdict = decompose_separable(f, dopts);
    if (verdict.verdict != Verdict::Separable) {
      if (exact_dims(d)) rep.consistent = false;  // the sweep family is complete there
      continue;
    }
    const auto& dec = std::get<ProductDecomposition>(verdict.certificate);
    Mat recon = Mat::Zero(d.total(), d.total());
    for (size_t i = 0; i < dec.weights.size(); ++i) {
      Mat pa = ea.apply(dec.factors_a[i]);
      recon += dec.weights[i] * tensor(pa, dec.factors_b[i]);
    }
    const double res = (f.density - recon).norm();
    rep.worst_projected_residual = std::max(rep.worst_projected_residual, res);
    if (res <= opts.decompose.eps + 1e-9) rep.decomposed++;
    else rep.consistent = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// PPT-entangled fixture search
// ---------------------------------------------------------------------------

namespace {

Mat tiles_upb_state() {
  auto basis = [](int i) {
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
    v(i) = 1.0;
    return v;
  };
  const Eigen::Vector3cd e0 = basis(0), e1 = basis(1), e2 = basis(2);
  const Eigen::Vector3cd s01 = (e0 - e1) / std::sqrt(2.0);
  const Eigen::Vector3cd s12 = (e1 - e2) / std::sqrt(2.0);
  const Eigen::Vector3cd uni = (e0 + e1 + e2) / std::sqrt(3.0);

  std::vector<std::pair<Eigen::Vector3cd, Eigen::Vector3cd>> upb = {
      {e0, s01}, {e2, s12}, {s01, e2}, {s12, e0}, {uni, uni}};
  Mat p = Mat::Zero(9, 9);
  for (const auto& [x, y] : upb) {
    Vec prod(9);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) prod(i * 3 + j) = x(i) * y(j);
    p += prod * prod.adjoint();
  }
  return (Mat::Identity(9, 9) - p) / 4.0;
}

Mat horodecki_3x3(double a) {
  Mat h = Mat::Zero(9, 9);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) h(3 * i + i, 3 * j + j) = a;
  h(1, 1) = h(2, 2) = h(3, 3) = h(5, 5) = h(7, 7) = a;
  h(6, 6) = h(8, 8) = (1.0 + a) / 2.0;
  h(6, 8) = h(8, 6) = std::sqrt(1.0 - a * a) / 2.0;
  return h / h.trace().real();
}

Mat horodecki_2x4(double b) {
  Mat h = Mat::Zero(8, 8);
  for (Index i = 0; i < 8; ++i) h(i, i) = b;
  h(4, 4) = h(7, 7) = (1.0 + b) / 2.0;
  h(4, 7) = h(7, 4) = std::sqrt(1.0 - b * b) / 2.0;
  h(0, 5) = h(5, 0) = b;
  h(1, 6) = h(6, 1) = b;
  h(2, 7) = h(7, 2) = b;
  return h / h.trace().real();
}

}  // namespace

PptEntangledFixture find_ppt_entangled_fixture(std::uint64_t seed, int budget) {
  for (int trial = 0; trial < budget; ++trial) {
    Rng rng(substream(seed, 0xf1c + static_cast<std::uint64_t>(trial)));
    const int family = static_cast<int>(rng.uniform_int(0, 2));
    Mat core;
    Dims d;
    std::string name;
    if (family == 0) {
      core = tiles_upb_state();
      d = {3, 3};
      name = "tiles-upb(3,3)";
    } else if (family == 1) {
      core = horodecki_3x3(0.05 + 0.9 * rng.uniform());
      d = {3, 3};
      name = "horodecki(3,3)";
    } else {
      core = horodecki_2x4(0.05 + 0.9 * rng.uniform());
      d = {2, 4};
      name = "horodecki(2,4)";
    }
    const Mat local = tensor(rng.unitary(d.a), rng.unitary(d.b));
    const double p = 0.03 * rng.uniform();
    Mat h = (1.0 - p) * (local * core * local.adjoint()) +
            p * Mat::Identity(d.total(), d.total()) / static_cast<double>(d.total());
    h = ((h + h.adjoint()) / 2.0).eval();

    Functional f{d, h};
    const PptResult ppt = ppt_check(f, 1e-10);
    const RealignmentResult re = realignment_check(f, 1e-6);
    if (ppt.pass && !re.pass) {
      PptEntangledFixture fix;
      fix.h = std::move(f);
      fix.seed = seed;
      fix.trials = trial + 1;
      fix.family = name;
      fix.realignment_value = re.value;
      fix.ppt_min_eigenvalue = ppt.min_eigenvalue;
      return fix;
    }
  }
  throw NumericalError(
      "find_ppt_entangled_fixture: search budget exhausted without a "
      "PPT-pass, realignment-fail sample");
}

}  // namespace opalg
