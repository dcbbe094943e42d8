#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "opalg/abelian_projection.hpp"
#include "opalg/averaging.hpp"
#include "opalg/definite_set.hpp"
#include "opalg/json_io.hpp"
#include "opalg/separability.hpp"
#include "opalg/uhf_tower.hpp"
#include "opalg/version.hpp"

using namespace opalg;

namespace {

struct GlobalFlags {
  std::string input;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  double tol = 1e-9;
  double eps = 1e-3;
  std::int64_t max_iter = 10000;
};

void add_common(CLI::App* cmd, GlobalFlags& g, bool with_input = true) {
  if (with_input) cmd->add_option("--input", g.input, "input JSON path");
  cmd->add_option("--out", g.out, "output path (default stdout)");
  cmd->add_option("--format", g.format, "json|table")
      ->check(CLI::IsMember({"json", "table"}));
  cmd->add_option("--seed", g.seed, "random seed (default 0)");
  cmd->add_option("--tol", g.tol, "PSD/self-adjointness tolerance (default 1e-9)");
  cmd->add_option("--eps", g.eps, "decomposition target residual (default 1e-3)");
  cmd->add_option("--max-iter", g.max_iter, "decomposition budget (default 10000)");
}

Json report_header(const std::string& command, const GlobalFlags& g) {
  Json j;
  j["tool"] = "opalg";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = g.seed;
  j["tol"] = g.tol;
  j["eps"] = g.eps;
  j["max_iter"] = g.max_iter;
  return j;
}

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items())
      flatten(value, prefix.empty() ? key : prefix + "." + key, os);
  } else if (j.is_array()) {
    if (j.size() > 8) {
      os << prefix << " = <array of " << j.size() << ">\n";
    } else {
      int i = 0;
      for (const auto& value : j)
        flatten(value, prefix + "[" + std::to_string(i++) + "]", os);
    }
  } else {
    os << prefix << " = " << j.dump() << "\n";
  }
}

void emit(const Json& report, const GlobalFlags& g) {
  if (g.format == "table") {
    if (g.out.empty()) {
      flatten(report, "", std::cout);
    } else {
      std::ofstream out(g.out);
      if (!out) throw ValidationError("cannot open output file: " + g.out);
      flatten(report, "", out);
    }
    return;
  }
  if (g.out.empty())
    std::cout << report.dump(2) << "\n";
  else
    write_json_file(g.out, report);
}

SepOptions sep_options(const GlobalFlags& g) {
  SepOptions opts;
  opts.tol = g.tol;
  opts.decompose.eps = g.eps;
  opts.decompose.max_iter = g.max_iter;
  opts.decompose.seed = g.seed;
  return opts;
}

Json residual_entry(const char* name, double value) {
  Json j;
  j["name"] = name;
  j["value"] = value;
  return j;
}

int run_choi(const GlobalFlags& g) {
  const LinMap phi = linmap_from_json(parse_json_file(g.input));
  Json rep = report_header("choi", g);
  rep["dim_in"] = phi.dim_in();
  rep["dim_out"] = phi.dim_out();
  rep["hermiticity_preserving"] = phi.is_hermiticity_preserving(g.tol);
  rep["completely_positive"] = is_cp(phi, g.tol);
  rep["unital"] = phi.is_unital(g.tol);
  rep["trace_preserving"] = phi.is_trace_preserving(g.tol);
  if (is_cp(phi, g.tol)) {
    const HermEig eig = herm_eig(phi.choi(), 1e-8);
    Index rank = 0;
    Json values = Json::array();
    for (Index i = 0; i < eig.values.size(); ++i) {
      values.push_back(eig.values(i));
      if (eig.values(i) > 1e-9) ++rank;
    }
    rep["kraus_rank"] = rank;
    rep["choi_eigenvalues"] = std::move(values);
  }
  const PositivityVerdict pos = is_positive(phi, 50, g.tol, substream(g.seed, 0xc11));
  rep["positivity"] =
      pos.certified_not_positive ? "CertifiedNotPositive" : "ProbablyPositive";
  if (pos.witness) rep["positivity_witness_value"] = pos.witness->value;
  emit(rep, g);
  return 0;
}

int run_dual(const GlobalFlags& g) {
  const LinMap phi = linmap_from_json(parse_json_file(g.input));
  const Functional dual = dual_functional(phi);
  double worst = 0.0;
  for (Index i = 0; i < phi.dim_in(); ++i)
    for (Index j = 0; j < phi.dim_in(); ++j)
      for (Index k = 0; k < phi.dim_out(); ++k)
        for (Index l = 0; l < phi.dim_out(); ++l) {
          const Mat a = matrix_unit(phi.dim_in(), i, j);
          const Mat b = matrix_unit(phi.dim_out(), k, l);
          const Complex lhs = dual.value(tensor(a, b));
          const Complex rhs = (phi.apply(a) * b.transpose()).trace();
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  Json rep = report_header("dual", g);
  rep["functional"] = functional_to_json(dual);
  rep["residuals"] =
      Json::array({residual_entry("duality_identity_basis_exhaustive", worst)});
  emit(rep, g);
  return 0;
}

int run_definite_set(const GlobalFlags& g) {
  const LinMap phi = linmap_from_json(parse_json_file(g.input));
  const DefiniteSetReport ds = definite_set(phi);
  Json rep = report_header("definite-set", g);
  rep["algebra"] = algebra_to_json(ds.algebra);
  rep["algebra_dim"] = ds.algebra.dim();
  rep["is_multiplicatively_closed"] = ds.is_multiplicatively_closed;
  rep["image_dim"] = ds.image_dim;
  rep["image_equals_image_of_definite"] = ds.image_equals_image_of_definite;
  rep["abelian_image"] = ds.abelian_image;
  rep["residuals"] = Json::array({
      residual_entry("multiplicative_closure", ds.closure_residual),
      residual_entry("definite_membership", ds.membership_residual),
  });
  emit(rep, g);
  return 0;
}

int run_theorem4(const GlobalFlags& g) {
  const LinMap phi = linmap_from_json(parse_json_file(g.input));
  const Theorem4Report t4 = theorem4_harness(phi, sep_options(g));
  Json rep = report_header("theorem4", g);
  rep["used_lemma2_route"] = t4.used_lemma2_route;
  rep["definite_set_approximate"] = t4.definite_set_approximate;
  rep["definite_set_dim"] = t4.definite_algebra.dim();
  rep["hypothesis_holds"] = t4.hypothesis_holds;
  rep["verdict_i_entanglement_breaking"] = sep_verdict_to_json(t4.verdict_i);
  rep["verdict_ii_abelian_image"] = t4.verdict_ii;
  rep["verdict_iii_dual_separable"] = sep_verdict_to_json(t4.verdict_iii);
  rep["i_equals_iii"] = t4.i_equals_iii;
  rep["consistent"] = t4.consistent;
  emit(rep, g);
  return 0;
}

int run_average(const GlobalFlags& g) {
  const LinMap phi = linmap_from_json(parse_json_file(g.input));
  const Corollary5Report c5 = corollary5_harness(phi, sep_options(g));
  Json rep = report_header("average", g);
  rep["invariant_state"] = functional_to_json(c5.averaging.invariant_state);
  rep["faithful"] = c5.averaging.faithful;
  rep["projection"] = linmap_to_json(c5.averaging.projection);
  rep["cesaro_steps"] = c5.averaging.cesaro_steps;
  rep["cesaro_converged"] = c5.averaging.cesaro_converged;
  rep["fixed_algebra_dim"] = c5.averaging.fixed_algebra.dim();
  rep["jordan_closed"] = c5.averaging.jordan_closed;
  rep["range_equals_fixed_algebra"] = c5.averaging.range_equals_fixed_algebra;
  rep["residuals"] = Json::array({
      residual_entry("idempotency", c5.averaging.idempotency_residual),
      residual_entry("state_invariance", c5.averaging.state_invariance_residual),
      residual_entry("cesaro_spectral_agreement", c5.averaging.cesaro_agreement),
  });
  rep["verdict_i_projection_eb"] = sep_verdict_to_json(c5.verdict_i);
  rep["verdict_ii_fixed_algebra_abelian"] = c5.verdict_ii;
  rep["verdict_iii_dual_separable"] = sep_verdict_to_json(c5.verdict_iii);
  rep["consistent"] = c5.consistent;
  emit(rep, g);
  return 0;
}

int run_prop7(const GlobalFlags& g, const std::string& rho_path,
              const std::string& projections_path) {
  const Functional rho = functional_from_json(parse_json_file(rho_path));
  const Json pj = parse_json_file(projections_path);
  std::vector<Mat> projections;
  try {
    for (const auto& entry : pj.at("projections"))
      projections.push_back(matrix_from_json(entry).mat);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("projections file: malformed JSON: ") + e.what());
  }
  const AbelianProjectionData data = build_projection(rho, projections);
  Json rep = report_header("prop7-verify", g);
  rep["blocks"] = projections.size();
  Json weights = Json::array();
  for (Index i = 0; i < data.weights.size(); ++i) weights.push_back(data.weights(i));
  rep["weights"] = std::move(weights);
  rep["residuals"] = Json::array({
      residual_entry("centralizer", centralizer_check(data.rho, data.projections)),
      residual_entry("unitality", data.unitality_residual),
      residual_entry("idempotency", data.idempotency_residual),
      residual_entry("state_invariance", data.invariance_residual),
      residual_entry("state_support_delta", data.state_support_residual),
      residual_entry("dual_identity_basis_exhaustive", dual_identity_check(data)),
  });
  emit(rep, g);
  return 0;
}

int run_sep_check(const GlobalFlags& g, const std::string& dims_flag,
                  const std::string& criteria) {
  Functional h = functional_from_json(parse_json_file(g.input));
  if (!dims_flag.empty()) {
    const auto comma = dims_flag.find(',');
    if (comma == std::string::npos)
      throw ValidationError("sep-check: --dims expects dA,dB");
    h.dims = Dims{std::stoll(dims_flag.substr(0, comma)),
                  std::stoll(dims_flag.substr(comma + 1))};
    if (h.dims->total() != h.density.rows())
      throw ValidationError("sep-check: --dims do not match the density size");
  }

  Json rep = report_header("sep-check", g);
  const SepOptions opts = sep_options(g);
  Json checks = Json::array();
  const bool all = criteria == "all";
  const auto wants = [&](const std::string& name) {
    return all || criteria.find(name) != std::string::npos;
  };

  if (wants("ppt")) {
    const PptResult r = ppt_check(h, g.tol);
    Json c;
    c["criterion"] = "ppt";
    c["pass"] = r.pass;
    c["min_eigenvalue"] = r.min_eigenvalue;
    checks.push_back(std::move(c));
  }
  if (wants("realign")) {
    const RealignmentResult r = realignment_check(h, g.tol);
    Json c;
    c["criterion"] = "realign";
    c["pass"] = r.pass;
    c["value"] = r.value;
    checks.push_back(std::move(c));
  }
  if (wants("witness")) {
    const PsiFamily fam = default_psi_family(h.dims->b, substream(g.seed, 0x517),
                                             opts.n_decomposable, opts.n_hardened);
    const SweepResult r = witness_sweep(h, fam, g.tol);
    Json c;
    c["criterion"] = "witness";
    c["pass"] = r.pass;
    c["family_size"] = fam.maps.size();
    c["worst_value"] = r.worst_value;
    if (r.failing_index)
      c["failing_psi"] = fam.labels[static_cast<size_t>(*r.failing_index)];
    checks.push_back(std::move(c));
  }
  if (wants("decompose")) {
    Functional normalized = h;
    normalized.density /= normalized.density.trace().real();
    const SepVerdict r = decompose_separable(normalized, opts.decompose);
    Json c;
    c["criterion"] = "decompose";
    c["result"] = sep_verdict_to_json(r);
    checks.push_back(std::move(c));
  }
  rep["checks"] = std::move(checks);
  rep["verdict"] = sep_verdict_to_json(separability_verdict(h, opts));
  emit(rep, g);
  return 0;
}

int run_lemma9(const GlobalFlags& g, const std::string& algebra_path, Index dim_h,
               int samples) {
  const StarAlgebra a = algebra_from_json(parse_json_file(algebra_path));
  SepOptions opts = sep_options(g);
  opts.n_decomposable = 16;
  opts.n_hardened = 4;
  const Lemma9Report r = lemma9_harness(a, dim_h, samples, g.seed, opts);
  Json rep = report_header("lemma9", g);
  rep["algebra_dim"] = a.dim();
  rep["dim_h"] = dim_h;
  rep["cone_samples"] = r.cone_samples;
  rep["worst_cone_violation"] = r.worst_cone_violation;
  rep["psd_samples"] = r.psd_samples;
  rep["sweep_passes"] = r.sweep_passes;
  rep["decomposed"] = r.decomposed;
  rep["worst_projected_residual"] = r.worst_projected_residual;
  rep["consistent"] = r.consistent;
  emit(rep, g);
  return 0;
}

int run_tower_scan(const GlobalFlags& g, Index a_dim, int levels,
                   const std::string& kind) {
  TowerState state = [&] {
    if (!g.input.empty()) return tower_state_from_json(parse_json_file(g.input));
    const TowerStateKind k = kind == "bell"     ? TowerStateKind::BellFirstFactor
                             : kind == "random" ? TowerStateKind::Random
                                                : TowerStateKind::SeparableMix;
    return random_tower_state(g.seed, a_dim, levels, k);
  }();

  TowerScanOptions opts;
  opts.sep = sep_options(g);
  opts.seed = g.seed;
  const TowerScanReport r = theorem8_scan(state, opts);

  Json rep = report_header("tower-scan", g);
  rep["a_dim"] = state.a_dim;
  rep["level_K"] = state.level;
  Json levels_json = Json::array();
  for (const TowerLevelReport& lr : r.levels) {
    Json l;
    l["level"] = lr.level;
    l["witness_pass"] = lr.sweep_pass;
    l["witness_worst_value"] = lr.sweep_worst_value;
    l["decomposition"] = sep_verdict_to_json(lr.decomposition);
    levels_json.push_back(std::move(l));
  }
  rep["levels"] = std::move(levels_json);
  rep["monotone"] = r.monotone;
  rep["note"] =
      "finite-level surrogate: Separable-at-all-levels with uniform eps, not "
      "the w*-limit statement";
  emit(rep, g);
  return 0;
}

int run_random_map(const GlobalFlags& g, const std::string& kind, Index dim_in,
                   Index dim_out, int size, bool unital) {
  LinMap map = [&] {
    if (kind == "cp")
      return unital ? random_unital_cp(g.seed, dim_in, dim_out, size)
                    : random_cp(g.seed, dim_in, dim_out, size);
    if (kind == "eb") return random_eb(g.seed, dim_in, dim_out, size, unital);
    if (kind == "eb-projective") return random_eb_projective(g.seed, dim_in);
    if (kind == "copositive") return random_copositive(g.seed, dim_in, dim_out, size);
    if (kind == "decomposable")
      return random_decomposable(g.seed, dim_in, dim_out, size);
    if (kind == "positive-hardened") return random_positive_hardened(g.seed, dim_in);
    throw ValidationError("random-map: unknown kind " + kind);
  }();
  Json rep = report_header("random-map", g);
  rep["kind"] = kind;
  rep["generator"] = "mt19937_64+box-muller";
  rep["map"] = linmap_to_json(map);
  emit(rep, g);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "operator-algebra toolkit: positive maps, definite sets, averaging "
      "projections, separability"};
  app.require_subcommand(1);
  GlobalFlags g;

  auto* choi = app.add_subcommand("choi", "map diagnostics from a LinMap JSON");
  add_common(choi, g);

  auto* dual = app.add_subcommand("dual", "dual functional of a map");
  add_common(dual, g);

  auto* dset = app.add_subcommand("definite-set", "definite set of a unital CP map");
  add_common(dset, g);

  auto* t4 = app.add_subcommand("theorem4", "abelian-range / separability equivalence");
  add_common(t4, g);

  auto* avg = app.add_subcommand("average", "averaging projection and its verdicts");
  add_common(avg, g);

  auto* p7 = app.add_subcommand("prop7-verify", "projection onto an abelian algebra");
  std::string rho_path, projections_path;
  p7->add_option("--rho", rho_path, "state JSON")->required();
  p7->add_option("--projections", projections_path, "projections JSON")->required();
  add_common(p7, g, false);

  auto* sep = app.add_subcommand("sep-check", "separability verdict for a density");
  std::string dims_flag, criteria = "all";
  sep->add_option("--dims", dims_flag, "dA,dB override");
  sep->add_option("--criteria", criteria, "comma list: ppt,realign,witness,decompose");
  add_common(sep, g);

  auto* l9 = app.add_subcommand("lemma9", "cone equality harness");
  std::string algebra_path;
  Index dim_h = 2;
  int samples = 10;
  l9->add_option("--algebra", algebra_path, "StarAlgebra JSON")->required();
  l9->add_option("--dim-h", dim_h, "dimension of H");
  l9->add_option("--samples", samples, "samples per direction");
  add_common(l9, g, false);

  auto* tower = app.add_subcommand("tower-scan", "per-level Theorem-8 scan");
  Index a_dim = 2;
  int levels = 3;
  std::string state_kind = "separable";
  tower->add_option("--a-dim", a_dim, "dimension of the A factor");
  tower->add_option("--K", levels, "truncation level");
  tower->add_option("--kind", state_kind, "separable|bell|random (when no --input)");
  add_common(tower, g);

  auto* rmap = app.add_subcommand("random-map", "seeded map ensembles");
  std::string map_kind = "cp";
  Index dim_in = 2, dim_out = 2;
  int size = 2;
  bool unital = false;
  rmap->add_option("--kind", map_kind,
                   "cp|eb|eb-projective|copositive|decomposable|positive-hardened");
  rmap->add_option("--dim-in", dim_in, "input dimension");
  rmap->add_option("--dim-out", dim_out, "output dimension");
  rmap->add_option("--size", size, "ensemble size parameter");
  rmap->add_flag("--unital", unital, "normalize to a unital map");
  add_common(rmap, g, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (choi->parsed()) return run_choi(g);
    if (dual->parsed()) return run_dual(g);
    if (dset->parsed()) return run_definite_set(g);
    if (t4->parsed()) return run_theorem4(g);
    if (avg->parsed()) return run_average(g);
    if (p7->parsed()) return run_prop7(g, rho_path, projections_path);
    if (sep->parsed()) return run_sep_check(g, dims_flag, criteria);
    if (l9->parsed()) return run_lemma9(g, algebra_path, dim_h, samples);
    if (tower->parsed()) return run_tower_scan(g, a_dim, levels, state_kind);
    if (rmap->parsed())
      return run_random_map(g, map_kind, dim_in, dim_out, size, unital);
  } catch (const ValidationError& e) {
    std::cerr << "input validation failure: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
