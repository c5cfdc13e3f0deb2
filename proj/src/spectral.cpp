#include "framelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framelab/error.hpp"

namespace framelab {

namespace {

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(op) + " needs a square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

double ComplexSpectrum::max_abs_imag() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
  return m;
}

double hs_norm(const Matrix& a) { return a.norm(); }

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).norm() <= tol * std::max(1.0, a.norm());
}

SpectralDecomposition sym_eig(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::AsymmetricInput, "sym_eig: matrix is not square");
  }
  if (!is_symmetric(a, tol)) {
    throw Error(ErrorCode::AsymmetricInput,
                "sym_eig: ||A - A^T||_HS = " +
                    std::to_string((a - a.transpose()).norm()));
  }
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "sym_eig: eigensolver failed");
  }
  // Eigen already returns ascending eigenvalues.
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix inv_sqrt_psd(const Matrix& a, double floor) {
  const auto eig = sym_eig(a);
  if (eig.eigenvalues.size() > 0 && eig.eigenvalues(0) <= floor) {
    throw Error(ErrorCode::SingularOperator,
                "smallest eigenvalue " + std::to_string(eig.eigenvalues(0)) +
                    " is not above " + std::to_string(floor));
  }
  const Vector scale = eig.eigenvalues.array().rsqrt();
  return eig.eigenvectors * scale.asDiagonal() * eig.eigenvectors.transpose();
}

ComplexSpectrum general_spectrum(const Matrix& a) {
  require_square(a, "general_spectrum");
  ComplexSpectrum out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "general_spectrum: eigensolver failed");
  }
  const auto& ev = solver.eigenvalues();
  out.values.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.values.begin(), out.values.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

MatrixFunctionals matrix_functionals(const Matrix& a, double sym_tol) {
  MatrixFunctionals f;
  f.hs_norm = a.norm();
  if (a.rows() == a.cols()) {
    f.trace = a.trace();
    if (is_symmetric(a, sym_tol)) {
      const auto eig = sym_eig(a, sym_tol);
      f.op_norm_sym = eig.eigenvalues.size() == 0 ? 0.0 : eig.eigenvalues.cwiseAbs().maxCoeff();
    }
  }
  return f;
}

double trace_of_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows() || a.rows() != a.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "trace_of_product: incompatible shapes");
  }
  // Pair the (i,j) and (j,i) products so swapping the arguments only swaps
  // the operands of each commutative floating-point operation.
  const Eigen::Index m = a.rows();
  double t = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    t += a(i, i) * b(i, i);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      t += a(i, j) * b(j, i) + a(j, i) * b(i, j);
    }
  }
  return t;
}

}  // namespace framelab
