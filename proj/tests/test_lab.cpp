#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "framelab/lab.hpp"
#include "test_support.hpp"

using namespace framelab;
using namespace framelab::testing;

namespace {

InstanceSpec spec_of(InstanceKind kind, Eigen::Index d, Eigen::Index n, double eps, std::uint64_t seed,
                     double p = 2.0) {
  InstanceSpec s;
  s.kind = kind;
  s.d = d;
  s.n = n;
  s.epsilon_target = eps;
  s.seed = seed;
  s.p = p;
  return s;
}

// Fresh certificate of an ENP frame, independent of the solver's own check.
void check_enp(const Frame& f, double tol) {
  const Matrix s = f.synthesis_matrix() * f.synthesis_matrix().transpose();
  CHECK((s - Matrix::Identity(f.dim(), f.dim())).cwiseAbs().maxCoeff() <= 2 * tol);
  const double target = static_cast<double>(f.dim()) / f.size();
  for (Eigen::Index j = 0; j < f.size(); ++j)
    CHECK(std::abs(f.vector(j).squaredNorm() - target) <= 2 * tol);
}

}  // namespace

TEST_CASE("instance kinds and validation") {
  CHECK(parse_instance_kind("perturbed_enp") == InstanceKind::PerturbedEnp);
  CHECK(parse_instance_kind("scaled_enp") == InstanceKind::ScaledEnp);
  CHECK(parse_instance_kind("perturbed_asf") == InstanceKind::PerturbedAsf);
  CHECK(to_string(InstanceKind::ScaledEnp) == "scaled_enp");
  CHECK(error_code_of([] { parse_instance_kind("other"); }) == ErrorCode::InvalidArgument);

  CHECK(error_code_of([] { validate(spec_of(InstanceKind::PerturbedEnp, 2, 3, 0.0, 1)); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { validate(spec_of(InstanceKind::PerturbedEnp, 2, 3, 1.0, 1)); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { validate(spec_of(InstanceKind::PerturbedEnp, 3, 2, 0.1, 1)); }) ==
        ErrorCode::Infeasible);
  CHECK(error_code_of([] { validate(spec_of(InstanceKind::PerturbedAsf, 2, 3, 0.1, 1, 1.5)); }) ==
        ErrorCode::Infeasible);
  CHECK_NOTHROW(validate(spec_of(InstanceKind::PerturbedAsf, 2, 4, 0.1, 1, 1.5)));
}

TEST_CASE("certify tolerance from the environment") {
  ::unsetenv("FRAMELAB_TOL");
  CHECK(certify_tol_from_env() == kDefaultCertifyTol);
  ::setenv("FRAMELAB_TOL", "1e-6", 1);
  CHECK(certify_tol_from_env() == 1e-6);
  ::setenv("FRAMELAB_TOL", "abc", 1);
  CHECK(error_code_of([] { certify_tol_from_env(); }) == ErrorCode::InvalidArgument);
  ::unsetenv("FRAMELAB_TOL");
}

TEST_CASE("generate_instance examples") {
  const auto scaled = generate_instance(spec_of(InstanceKind::ScaledEnp, 2, 3, 0.2, 0));
  const auto r = analyze_frame(*scaled.frame);
  CHECK(r.lower_bound == doctest::Approx(1.2));
  CHECK(r.upper_bound == doctest::Approx(1.2));
  CHECK(scaled.eps_parseval == doctest::Approx(0.2));
  CHECK(scaled.eps_equal_norm == doctest::Approx(0.2));

  double previous = 1.0;
  for (double eps : {0.2, 0.02, 0.002, 0.0002}) {
    const auto p = generate_instance(spec_of(InstanceKind::PerturbedEnp, 3, 5, eps, 4));
    CHECK(p.eps_parseval <= eps);
    CHECK(p.eps_equal_norm <= eps);
    CHECK(std::max(p.eps_parseval, p.eps_equal_norm) <= previous);
    previous = std::max(p.eps_parseval, p.eps_equal_norm);
  }

  const auto a = generate_instance(spec_of(InstanceKind::PerturbedAsf, 2, 4, 0.1, 3, 1.5));
  REQUIRE(a.asf);
  const auto ar = analyze_asf(*a.asf);
  REQUIRE(ar.eps_parseval);
  CHECK(*ar.eps_parseval == doctest::Approx(a.eps_parseval));
  CHECK(a.eps_parseval <= 0.1);
  CHECK(a.eps_equal_norm <= 0.1);
}

TEST_CASE("generate_instance is deterministic per seed") {
  const auto s = spec_of(InstanceKind::PerturbedEnp, 3, 7, 0.05, 12);
  CHECK(frame_dist(*generate_instance(s).frame, *generate_instance(s).frame) == 0.0);
  const auto a = spec_of(InstanceKind::PerturbedAsf, 2, 4, 0.05, 12, 3.0);
  CHECK(asf_dist(*generate_instance(a).asf, *generate_instance(a).asf) == 0.0);
}

TEST_CASE("nearest_enp_alternating examples") {
  const Frame h = harmonic_frame(2, 3);
  const auto same = nearest_enp_alternating(h);
  CHECK(same.dist_sq == 0.0);
  CHECK(same.rounds == 0);

  const auto scaled = nearest_enp_alternating(*generate_instance(spec_of(InstanceKind::ScaledEnp, 2, 3, 0.2, 0)).frame);
  CHECK(scaled.dist_sq <= 16.0);
  CHECK(scaled.dist_sq == doctest::Approx(2.0 * sq(std::sqrt(1.2) - 1.0)).epsilon(1e-6));
  check_enp(scaled.frame, kDefaultCertifyTol);

  const auto mb = nearest_enp_alternating(mercedes_benz());
  CHECK(mb.rounds == 1);
  CHECK(mb.dist_sq == doctest::Approx(3.0 * sq(1.0 - std::sqrt(2.0 / 3.0))).epsilon(1e-9));
  CHECK(frame_dist(mb.frame, mercedes_benz().scaled(std::sqrt(2.0 / 3.0))) <= 1e-8);

  CHECK(error_code_of([] { nearest_enp_alternating(Frame(mat({{1, 1, 1}, {0, 0, 0}}))); }) ==
        ErrorCode::SingularOperator);
  CHECK(error_code_of([] { nearest_enp_alternating(Frame(mat({{1}, {0}}))); }) == ErrorCode::UnsupportedShape);
}

TEST_CASE("nearest_enp_alternating certifies and never loses to the base point by much") {
  for (auto [d, n] : {std::pair<Eigen::Index, Eigen::Index>{2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 6}, {5, 10}}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      INFO("d=" << d << " n=" << n << " seed=" << seed);
      const auto inst = generate_instance(spec_of(InstanceKind::PerturbedEnp, d, n, 0.1, seed));
      const auto sol = nearest_enp_alternating(*inst.frame);
      check_enp(sol.frame, kDefaultCertifyTol);
      CHECK(sol.dist_sq == doctest::Approx(sq(frame_dist(sol.frame, *inst.frame))).epsilon(1e-9));
      CHECK(sol.dist_sq <= 20.0 * 0.1 * d * d);
    }
  }
}

TEST_CASE("refine_enp reaches a certified nearby point") {
  const Frame h = harmonic_frame(3, 5);
  const Frame moved = perturb_frame(h, 1e-3, 8);
  const auto out = refine_enp(moved, moved, 1e-10);
  REQUIRE(out);
  check_enp(*out, 1e-10);
  CHECK(frame_dist(*out, moved) <= frame_dist(h, moved) + 1e-9);
}

TEST_CASE("nearest_enp_asf_search examples") {
  const ASF rb = repeated_basis_asf(PNormSpace(2, 3.0), 4);
  const auto same = nearest_enp_asf_search(rb);
  CHECK(same.certified);
  CHECK(same.dist_sq == 0.0);

  CHECK(error_code_of([&] { nearest_enp_asf_search(repeated_basis_asf(PNormSpace(2, 1.0), 4)); }) ==
        ErrorCode::UnsupportedExponent);
  CHECK(error_code_of([&] { nearest_enp_asf_search(repeated_basis_asf(PNormSpace(2, kInfinity), 4)); }) ==
        ErrorCode::UnsupportedExponent);
  CHECK(error_code_of([&] { nearest_enp_asf_search(random_asf(PNormSpace(2, 1.5), 3, 1)); }) ==
        ErrorCode::Infeasible);

  const auto inst = generate_instance(spec_of(InstanceKind::PerturbedAsf, 2, 4, 0.05, 7, 1.5));
  const auto r = nearest_enp_asf_search(*inst.asf);
  CHECK(r.certified);
  CHECK(r.residual <= kDefaultCertifyTol);
  CHECK(enp_residual(r.asf).max_abs <= kDefaultCertifyTol);
  CHECK(r.dist_sq == doctest::Approx(sq(asf_dist(r.asf, *inst.asf))).epsilon(1e-9));
  CHECK(r.dist_sq <= sq(asf_dist(*inst.asf, *inst.asf_base)) + 1e-6);
}

TEST_CASE("perturbed asf instances are genuinely perturbed and the search beats the base point") {
  for (double p : {1.5, 3.0}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      CAPTURE(p);
      CAPTURE(seed);
      const auto inst = generate_instance(spec_of(InstanceKind::PerturbedAsf, seed % 2 ? 3 : 2, 6, 0.05, seed, p));
      const auto report = analyze_asf(*inst.asf);
      REQUIRE(report.spectrum_real);
      CHECK(inst.delta > 0.0);
      const double base = sq(asf_dist(*inst.asf, *inst.asf_base));
      CHECK(base > 0.0);
      const auto r = nearest_enp_asf_search(*inst.asf);
      REQUIRE(r.certified);
      CHECK(enp_residual(r.asf).max_abs <= kDefaultCertifyTol);
      CHECK(r.dist_sq <= base + 1e-9);
    }
  }
}

TEST_CASE("asf search at p = 2 agrees with the Hilbert solver") {
  // Lift a Hilbert instance; both solvers must find the same nearest ENP point.
  const auto inst = generate_instance(spec_of(InstanceKind::PerturbedEnp, 2, 4, 0.05, 3));
  const auto hilbert = nearest_enp_alternating(*inst.frame);
  const auto banach = nearest_enp_asf_search(from_hilbert(*inst.frame));
  CHECK(banach.certified);
  CHECK(std::abs(banach.dist_sq - hilbert.dist_sq) <= 1e-6);
}

TEST_CASE("estimate_paulsen examples") {
  const auto result = estimate_paulsen({spec_of(InstanceKind::PerturbedEnp, 2, 3, 0.1, 42)}, 5);
  REQUIRE(result.records.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& r = result.records[i];
    CHECK(r.spec.seed == 42 + i);
    CHECK(r.certified);
    CHECK(r.error.empty());
    CHECK(r.achieved_dist_sq <= 8.0);
    CHECK(r.achieved_dist_sq <= r.base_dist_sq + 1e-8);
    CHECK(r.bound_hm == doctest::Approx(8.0));
    CHECK(r.bound_bc == doctest::Approx(29.0 / 8.0 * 4 * 3 * 256 * 0.1));
    CHECK(r.lower_ref == doctest::Approx(0.02));
  }
  CHECK(result.hm_violations == 0);
  REQUIRE(result.summary.size() == 1);
  CHECK(result.summary[0].trials == 5);
  CHECK(result.summary[0].fraction_certified == 1.0);
  CHECK(result.summary[0].max_dist_sq >= result.summary[0].median_dist_sq);

  for (double eps : {0.05, 0.2}) {
    const auto scaled = estimate_paulsen({spec_of(InstanceKind::ScaledEnp, 3, 5, eps, 1)}, 2);
    for (const auto& r : scaled.records) {
      CHECK(r.certified);
      CHECK(r.achieved_dist_sq <= 3.0 * sq(std::sqrt(1.0 + eps) - 1.0) + 1e-8);
    }
  }

  CHECK(error_code_of([] { estimate_paulsen({spec_of(InstanceKind::PerturbedEnp, 2, 3, 0.1, 1)}, 0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { estimate_paulsen({}, 3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("estimate_paulsen isolates failing trials") {
  auto bad = spec_of(InstanceKind::PerturbedAsf, 2, 3, 0.1, 1, 1.5);
  const auto result = estimate_paulsen({bad, spec_of(InstanceKind::PerturbedEnp, 2, 3, 0.1, 1)}, 2);
  REQUIRE(result.records.size() == 4);
  CHECK_FALSE(result.records[0].certified);
  CHECK_FALSE(result.records[0].error.empty());
  CHECK(result.records[2].certified);
}

TEST_CASE("estimate_paulsen output does not depend on the thread count") {
  std::vector<InstanceSpec> grid = {spec_of(InstanceKind::PerturbedEnp, 2, 5, 0.05, 9),
                                    spec_of(InstanceKind::ScaledEnp, 3, 4, 0.1, 9)};
  const auto one = records_csv(estimate_paulsen(grid, 4, kDefaultCertifyTol, 1).records);
  const auto four = records_csv(estimate_paulsen(grid, 4, kDefaultCertifyTol, 4).records);
  CHECK(one == four);
}

TEST_CASE("records_csv layout") {
  const auto result = estimate_paulsen({spec_of(InstanceKind::PerturbedEnp, 2, 3, 0.1, 1)}, 1);
  std::istringstream in(records_csv(result.records));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header ==
        "d,n,p,kind,eps_target,eps_measured_parseval,eps_measured_equalnorm,dist_sq,certified,rounds,"
        "bound_hm,bound_bc,lower_ref");
  CHECK(row.rfind("2,3,2,perturbed_enp,0.1,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 12);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
}
