#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace framelab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdFloor = 1e-12;

struct SpectralDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // column i pairs with eigenvalues[i]
};

struct ComplexSpectrum {
  // Sorted by (real, imag) so reports are reproducible.
  std::vector<std::complex<double>> values;

  double max_abs_imag() const;
};

struct MatrixFunctionals {
  double hs_norm = 0.0;
  std::optional<double> trace;        // square input only
  std::optional<double> op_norm_sym;  // symmetric input only
};

double hs_norm(const Matrix& a);

// Requires a square matrix with ||A - A^T||_HS <= tol * max(1, ||A||_HS).
// The symmetric part is diagonalized.
SpectralDecomposition sym_eig(const Matrix& a, double tol = kSymmetryTol);

// A^{-1/2} for symmetric positive definite A. Throws SingularOperator when the
// smallest eigenvalue is <= floor.
Matrix inv_sqrt_psd(const Matrix& a, double floor = kPsdFloor);

ComplexSpectrum general_spectrum(const Matrix& a);

MatrixFunctionals matrix_functionals(const Matrix& a, double sym_tol = kSymmetryTol);

bool is_symmetric(const Matrix& a, double tol = kSymmetryTol);

// trace(A*B) evaluated so that trace_of_product(A, B) == trace_of_product(B, A)
// bit for bit.
double trace_of_product(const Matrix& a, const Matrix& b);

}  // namespace framelab
