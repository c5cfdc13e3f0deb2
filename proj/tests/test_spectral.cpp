#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "framelab/error.hpp"
#include "framelab/spectral.hpp"
#include "test_support.hpp"

using namespace framelab;
using namespace framelab::testing;

TEST_CASE("sym_eig on small fixed matrices") {
  SUBCASE("diagonal") {
    const auto r = sym_eig(vec({2, 5}).asDiagonal().toDenseMatrix());
    CHECK(r.eigenvalues(0) == doctest::Approx(2.0));
    CHECK(r.eigenvalues(1) == doctest::Approx(5.0));
    CHECK(std::abs(r.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(r.eigenvectors(1, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("swap matrix") {
    const auto r = sym_eig(mat({{0, 1}, {1, 0}}));
    CHECK(r.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(r.eigenvalues(1) == doctest::Approx(1.0));
  }
  SUBCASE("identity") {
    const auto r = sym_eig(Matrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(r.eigenvalues(i) == doctest::Approx(1.0));
  }
}

TEST_CASE("sym_eig rejects asymmetric or non-square input") {
  CHECK_THROWS_AS(sym_eig(mat({{1, 2}, {0, 1}})), Error);
  try {
    sym_eig(Matrix::Zero(2, 3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetricInput);
  }
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  Sampler s(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = s.integer(1, 8);
    const Matrix a = s.symmetric(d);
    const auto r = sym_eig(a);
    const Matrix back = r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.transpose();
    CHECK((back - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
    for (Eigen::Index i = 1; i < d; ++i) CHECK(r.eigenvalues(i - 1) <= r.eigenvalues(i));
  }
}

TEST_CASE("inv_sqrt_psd examples") {
  CHECK((inv_sqrt_psd(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm() < 1e-14);
  const Matrix b = inv_sqrt_psd(vec({4, 9}).asDiagonal().toDenseMatrix());
  CHECK(b(0, 0) == doctest::Approx(0.5));
  CHECK(b(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(b(0, 1)) < 1e-15);
  const Matrix c = inv_sqrt_psd(1.5 * Matrix::Identity(2, 2));
  CHECK(c(0, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(c(1, 1) == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("inv_sqrt_psd rejects singular input") {
  try {
    inv_sqrt_psd(vec({1, 0}).asDiagonal().toDenseMatrix());
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularOperator);
  }
}

TEST_CASE("inv_sqrt_psd whitens random PSD matrices") {
  Sampler s(202);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = s.integer(1, 8);
    const Matrix g = s.gaussian(d, d + 2);
    const Matrix a = g * g.transpose();
    const Matrix b = inv_sqrt_psd(a);
    CHECK((b - b.transpose()).norm() < 1e-12);
    CHECK((b * a * b - Matrix::Identity(d, d)).norm() <= 1e-10 * static_cast<double>(d));
    const Matrix w = b * a * b;
    const Matrix w2 = inv_sqrt_psd(w);
    CHECK((w2 * w * w2 - Matrix::Identity(d, d)).norm() <= 1e-9);
  }
}

TEST_CASE("general_spectrum examples") {
  const auto jordan = general_spectrum(mat({{1, 1}, {0, 1}}));
  REQUIRE(jordan.values.size() == 2);
  for (auto v : jordan.values) CHECK(std::abs(v - 1.0) < 1e-7);

  const auto rot = general_spectrum(mat({{0, -1}, {1, 0}}));
  REQUIRE(rot.values.size() == 2);
  CHECK(std::abs(rot.values[0] - std::complex<double>(0, -1)) < 1e-12);
  CHECK(std::abs(rot.values[1] - std::complex<double>(0, 1)) < 1e-12);
  CHECK(rot.max_abs_imag() == doctest::Approx(1.0));

  const auto diag = general_spectrum(vec({1.1, 0.9}).asDiagonal().toDenseMatrix());
  CHECK(diag.values[0].real() == doctest::Approx(0.9));
  CHECK(diag.values[1].real() == doctest::Approx(1.1));
  CHECK(diag.max_abs_imag() == 0.0);

  try {
    general_spectrum(Matrix::Zero(2, 3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("general_spectrum agrees with the characteristic polynomial and with sym_eig") {
  Sampler s(303);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = s.gaussian(2, 2);
    auto expect = eig2x2(a);
    auto got = general_spectrum(a).values;
    // match by pairing each oracle root with its nearest computed value
    for (const auto& e : expect) {
      double best = 1e300;
      for (const auto& g : got) best = std::min(best, std::abs(g - e));
      CHECK(best < 1e-9);
    }
    std::complex<double> sum = 0;
    for (const auto& g : got) sum += g;
    CHECK(std::abs(sum.real() - a.trace()) <= 1e-8 * std::max(1.0, std::abs(a.trace())));
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = s.integer(1, 7);
    const Matrix a = s.symmetric(d);
    const auto gs = general_spectrum(a);
    const auto se = sym_eig(a);
    CHECK(gs.max_abs_imag() <= 1e-9);
    for (Eigen::Index i = 0; i < d; ++i)
      CHECK(gs.values[static_cast<std::size_t>(i)].real() == doctest::Approx(se.eigenvalues(i)).epsilon(1e-9));
  }
}

TEST_CASE("matrix_functionals examples") {
  auto f = matrix_functionals(Matrix::Identity(3, 3));
  CHECK(f.hs_norm == doctest::Approx(std::sqrt(3.0)));
  CHECK(*f.trace == doctest::Approx(3.0));
  CHECK(*f.op_norm_sym == doctest::Approx(1.0));

  f = matrix_functionals(vec({-1.5, 1.5}).asDiagonal().toDenseMatrix());
  CHECK(f.hs_norm == doctest::Approx(1.5 * std::sqrt(2.0)));
  CHECK(*f.trace == doctest::Approx(0.0));
  CHECK(*f.op_norm_sym == doctest::Approx(1.5));

  f = matrix_functionals(mat({{1, 2}, {3, 4}}));
  CHECK(f.hs_norm == doctest::Approx(std::sqrt(30.0)));
  CHECK(*f.trace == doctest::Approx(5.0));
  CHECK_FALSE(f.op_norm_sym.has_value());

  f = matrix_functionals(Matrix::Ones(2, 3));
  CHECK(f.hs_norm == doctest::Approx(std::sqrt(6.0)));
  CHECK_FALSE(f.trace.has_value());
}

TEST_CASE("trace_of_product is symmetric in its arguments") {
  Sampler s(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = s.integer(1, 8);
    const Matrix p = s.gaussian(d, d);
    const Matrix q = s.gaussian(d, d);
    CHECK(trace_of_product(p, q) == trace_of_product(q, p));
    CHECK(std::abs(trace_of_product(p, q) - (p * q).trace()) <= 1e-10 * std::max(1.0, std::abs((p * q).trace())));
  }
}
