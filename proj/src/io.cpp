#include "framelab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "framelab/error.hpp"

namespace framelab::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) fail(std::string("missing field '") + name + "'");
  return doc.at(name);
}

void expect_kind(const Json& doc, const char* kind) {
  const Json& k = field(doc, "kind");
  if (!k.is_string() || k.get<std::string>() != kind) {
    fail(std::string("expected a document of kind '") + kind + "'");
  }
}

Eigen::Index read_dim(const Json& doc) {
  const Json& d = field(doc, "dim");
  if (!d.is_number_integer() || d.get<long long>() < 1) fail("'dim' must be a positive integer");
  return static_cast<Eigen::Index>(d.get<long long>());
}

double read_number(const Json& v) {
  if (!v.is_number()) fail("expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("numbers must be finite");
  return x;
}

// Rows of length `dim`, returned as columns of a dim x rows matrix.
Matrix read_columns(const Json& rows, Eigen::Index dim, const char* name) {
  if (!rows.is_array()) fail(std::string("'") + name + "' must be an array of arrays");
  Matrix m(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const Json& row = rows[j];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      fail(std::string("'") + name + "' row " + std::to_string(j) + " does not have length " +
           std::to_string(dim));
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      m(i, static_cast<Eigen::Index>(j)) = read_number(row[static_cast<std::size_t>(i)]);
    }
  }
  return m;
}

Json columns_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

double read_p(const Json& doc) {
  const Json& p = field(doc, "p");
  if (p.is_string()) {
    if (p.get<std::string>() == "inf") return kInfinity;
    fail("'p' must be a number or \"inf\"");
  }
  const double v = read_number(p);
  if (v < 1.0) fail("'p' must be >= 1");
  return v;
}

Json p_to_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Frame frame_from_json(const Json& doc) {
  expect_kind(doc, "hilbert_frame");
  const Eigen::Index dim = read_dim(doc);
  Matrix m = read_columns(field(doc, "vectors"), dim, "vectors");
  if (m.cols() == 0) fail("a frame needs at least one vector");
  return Frame(std::move(m));
}

Json frame_to_json(const Frame& frame) {
  return Json{{"kind", "hilbert_frame"},
              {"dim", frame.dim()},
              {"vectors", columns_to_json(frame.synthesis_matrix())}};
}

ASF asf_from_json(const Json& doc) {
  expect_kind(doc, "asf");
  const Eigen::Index dim = read_dim(doc);
  const double p = read_p(doc);
  Matrix f = read_columns(field(doc, "functionals"), dim, "functionals");
  Matrix v = read_columns(field(doc, "vectors"), dim, "vectors");
  if (f.cols() != v.cols() || v.cols() == 0) fail("functionals and vectors must be equally many and non-empty");
  return ASF(PNormSpace(dim, p), std::move(f), std::move(v));
}

Json asf_to_json(const ASF& asf) {
  return Json{{"kind", "asf"},
              {"p", p_to_json(asf.space().p())},
              {"dim", asf.dim()},
              {"functionals", columns_to_json(asf.functionals())},
              {"vectors", columns_to_json(asf.vectors())}};
}

Matrix projection_matrix_from_json(const Json& doc) {
  expect_kind(doc, "projection");
  const Eigen::Index dim = read_dim(doc);
  const Matrix cols = read_columns(field(doc, "matrix"), dim, "matrix");
  if (cols.cols() != dim) fail("'matrix' must have dim rows");
  return cols.transpose();  // rows were read as columns
}

Json projection_to_json(const Matrix& m) {
  return Json{{"kind", "projection"}, {"dim", m.rows()}, {"matrix", columns_to_json(m.transpose())}};
}

AuerbachSystem auerbach_from_json(const Json& doc) {
  expect_kind(doc, "auerbach");
  const Eigen::Index dim = read_dim(doc);
  const double p = read_p(doc);
  Matrix basis = read_columns(field(doc, "basis_vectors"), dim, "basis_vectors");
  Matrix duals = read_columns(field(doc, "dual_functionals"), dim, "dual_functionals");
  return AuerbachSystem(PNormSpace(dim, p), std::move(basis), std::move(duals));
}

Json auerbach_to_json(const AuerbachSystem& sys) {
  return Json{{"kind", "auerbach"},
              {"p", p_to_json(sys.space().p())},
              {"dim", sys.space().dim()},
              {"basis_vectors", columns_to_json(sys.basis_vectors())},
              {"dual_functionals", columns_to_json(sys.dual_functionals())}};
}

Json report_to_json(const FrameReport& r) {
  return Json{{"frame_bounds", {r.lower_bound, r.upper_bound}},
              {"is_frame", r.is_frame()},
              {"eps_parseval", optional_json(r.eps_parseval)},
              {"eps_equal_norm", optional_json(r.eps_equal_norm)},
              {"tightness_defect_hs", r.tightness_defect_hs},
              {"unit_defect_hs", r.unit_defect_hs},
              {"frame_potential", r.frame_potential},
              {"norms_sq", r.norms_sq}};
}

Json report_to_json(const ASFReport& r) {
  return Json{{"S", columns_to_json(r.S.transpose())},
              {"invertible", r.invertible},
              {"min_singular_value", r.min_singular_value},
              {"tight_lambda", optional_json(r.tight_lambda)},
              {"parseval", r.parseval},
              {"funtf", r.funtf},
              {"eps_parseval", optional_json(r.eps_parseval)},
              {"spectrum_real", r.spectrum_real},
              {"eps_equal_norm", optional_json(r.eps_equal_norm)},
              {"norm_triple_defect", r.norm_triple_defect},
              {"vector_norms_sq", r.vector_norms_sq},
              {"functional_norms_sq", r.functional_norms_sq},
              {"pairings", r.pairings}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace framelab::io
