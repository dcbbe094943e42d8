#include "opalg/json_io.hpp"

#include <fstream>

namespace opalg {

Json matrix_to_json(const Mat& m, std::optional<Dims> dims) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  if (dims)
    j["dims"] = Json::array({dims->a, dims->b});
  else
    j["dims"] = nullptr;
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k)
      data.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
  j["data"] = std::move(data);
  return j;
}

MatrixRecord matrix_from_json(const Json& j) {
  try {
    MatrixRecord rec;
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    if (rows < 1 || cols < 1)
      throw ValidationError("matrix: rows and cols must be >= 1");
    const auto& data = j.at("data");
    if (static_cast<Index>(data.size()) != rows * cols)
      throw ValidationError("matrix: entry count must equal rows*cols");
    rec.mat.resize(rows, cols);
    Index idx = 0;
    for (Index i = 0; i < rows; ++i)
      for (Index k = 0; k < cols; ++k) {
        const auto& e = data.at(static_cast<size_t>(idx++));
        rec.mat(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
      }
    if (j.contains("dims") && !j.at("dims").is_null()) {
      const auto& d = j.at("dims");
      if (d.size() == 2) {
        rec.dims = Dims{d.at(0).get<Index>(), d.at(1).get<Index>()};
        if (rows != cols || rec.dims->total() != rows)
          throw ValidationError("matrix: dims annotation requires a square matrix "
                                "with rows = dimA*dimB");
      } else if (d.size() == 1) {
        rec.dims = std::nullopt;  // single-space annotation carries no split
      } else {
        throw ValidationError("matrix: dims must be null, [n] or [dA, dB]");
      }
    }
    return rec;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("matrix: malformed JSON: ") + e.what());
  }
}

Json linmap_to_json(const LinMap& m) {
  Json j;
  j["dim_in"] = m.dim_in();
  j["dim_out"] = m.dim_out();
  j["choi"] = matrix_to_json(m.choi(), m.choi_dims());
  return j;
}

LinMap linmap_from_json(const Json& j) {
  try {
    const Index n = j.at("dim_in").get<Index>();
    const Index m = j.at("dim_out").get<Index>();
    const MatrixRecord rec = matrix_from_json(j.at("choi"));
    return LinMap::from_choi(n, m, rec.mat);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("linmap: malformed JSON: ") + e.what());
  }
}

Json functional_to_json(const Functional& f) {
  Json j;
  if (f.dims)
    j["dims"] = Json::array({f.dims->a, f.dims->b});
  else
    j["dims"] = Json::array({f.dim()});
  j["density"] = matrix_to_json(f.density, f.dims);
  return j;
}

Functional functional_from_json(const Json& j) {
  try {
    Functional f;
    const MatrixRecord rec = matrix_from_json(j.at("density"));
    f.density = rec.mat;
    f.dims = rec.dims;
    if (j.contains("dims") && j.at("dims").is_array() && j.at("dims").size() == 2)
      f.dims = Dims{j.at("dims").at(0).get<Index>(), j.at("dims").at(1).get<Index>()};
    if (f.dims && f.dims->total() != f.density.rows())
      throw ValidationError("functional: dims do not match density size");
    if (f.density.rows() != f.density.cols())
      throw ValidationError("functional: density must be square");
    return f;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("functional: malformed JSON: ") + e.what());
  }
}

Json algebra_to_json(const StarAlgebra& a) {
  Json j;
  j["ambient_dim"] = a.ambient_dim;
  Json basis = Json::array();
  for (const Mat& b : a.basis) basis.push_back(matrix_to_json(b));
  j["basis"] = std::move(basis);
  return j;
}

StarAlgebra algebra_from_json(const Json& j) {
  try {
    StarAlgebra a;
    a.ambient_dim = j.at("ambient_dim").get<Index>();
    for (const auto& b : j.at("basis")) {
      const MatrixRecord rec = matrix_from_json(b);
      if (rec.mat.rows() != a.ambient_dim || rec.mat.cols() != a.ambient_dim)
        throw ValidationError("algebra: basis element dimension mismatch");
      a.basis.push_back(rec.mat);
    }
    if (a.basis.empty()) throw ValidationError("algebra: empty basis");
    a.contains_unit =
        span_contains(a, Mat::Identity(a.ambient_dim, a.ambient_dim), 1e-8);
    return a;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("algebra: malformed JSON: ") + e.what());
  }
}

Json sep_verdict_to_json(const SepVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.verdict);
  if (const auto* dec = std::get_if<ProductDecomposition>(&v.certificate)) {
    Json c;
    c["type"] = "product-decomposition";
    c["weights"] = dec->weights;
    Json fa = Json::array(), fb = Json::array();
    for (const Mat& m : dec->factors_a) fa.push_back(matrix_to_json(m));
    for (const Mat& m : dec->factors_b) fb.push_back(matrix_to_json(m));
    c["factors_a"] = std::move(fa);
    c["factors_b"] = std::move(fb);
    c["residual"] = dec->residual;
    j["certificate"] = std::move(c);
  } else if (const auto* wit = std::get_if<WitnessViolation>(&v.certificate)) {
    Json c;
    c["type"] = "witness-violation";
    c["kind"] = wit->kind;
    c["value"] = wit->value;
    if (wit->psi) c["psi"] = linmap_to_json(*wit->psi);
    if (wit->eigenvector.size()) {
      Json w = Json::array();
      for (Index i = 0; i < wit->eigenvector.size(); ++i)
        w.push_back(Json::array(
            {wit->eigenvector(i).real(), wit->eigenvector(i).imag()}));
      c["eigenvector"] = std::move(w);
    }
    j["certificate"] = std::move(c);
  } else if (const auto* bud = std::get_if<BudgetExhausted>(&v.certificate)) {
    Json c;
    c["type"] = "budget-exhausted";
    c["iterations"] = bud->iterations;
    c["best_residual"] = bud->best_residual;
    j["certificate"] = std::move(c);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

Json tower_state_to_json(const TowerState& s) {
  Json j;
  j["a_dim"] = s.a_dim;
  j["level_K"] = s.level;
  j["h"] = functional_to_json(s.h);
  return j;
}

TowerState tower_state_from_json(const Json& j) {
  try {
    const Index a_dim = j.at("a_dim").get<Index>();
    const int level = j.at("level_K").get<int>();
    Functional f = functional_from_json(j.at("h"));
    return TowerState::make(a_dim, level, f.density);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("tower state: malformed JSON: ") + e.what());
  }
}

Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open input file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace opalg
