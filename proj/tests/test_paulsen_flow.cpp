#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "framelab/paulsen_flow.hpp"
#include "test_support.hpp"

using namespace framelab;
using namespace framelab::testing;

namespace {

Frame skewed_pair() {
  const double r = std::sqrt(0.5);
  return Frame(mat({{1, r}, {0, r}}));
}

FlowConfig config_with(double t) {
  FlowConfig c;
  c.step_t = t;
  return c;
}

Frame perturbed_unit(Eigen::Index d, Eigen::Index n, double delta, std::uint64_t seed) {
  const Frame h = harmonic_frame(d, n).scaled(std::sqrt(static_cast<double>(n) / d));
  return normalize_columns(perturb_frame(h, delta, seed));
}

}  // namespace

TEST_CASE("tangent_family examples") {
  CHECK(tangent_family(mercedes_benz()).max_norm() < 1e-15);
  CHECK(tangent_family(standard_basis(2)).max_norm() == 0.0);
  const auto t = tangent_family(skewed_pair());
  CHECK(t.vectors(0, 0) == doctest::Approx(0.0));
  CHECK(t.vectors(1, 0) == doctest::Approx(0.5));
  CHECK(error_code_of([] { tangent_family(Frame(mat({{2, 0}, {0, 1}}))); }) == ErrorCode::NotUnitNorm);
}

TEST_CASE("tangent vectors are orthogonal to unit-norm inputs") {
  Sampler s(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = s.integer(1, 5);
    const auto n = s.integer(1, 10);
    Matrix m = s.gaussian(d, n);
    m.colwise().normalize();
    const Frame f(m);
    const auto t = tangent_family(f);
    for (Eigen::Index j = 0; j < n; ++j) CHECK(std::abs(t.vectors.col(j).dot(m.col(j))) <= 1e-12);
  }
}

TEST_CASE("flow_step examples") {
  const Frame mb = mercedes_benz();
  CHECK(frame_dist(flow_step(mb, config_with(0.1)), mb) < 1e-15);

  const Frame out = flow_step(skewed_pair(), config_with(0.1));
  CHECK(out.vector(0)(0) == doctest::Approx(0.9987503).epsilon(1e-7));
  CHECK(out.vector(0)(1) == doctest::Approx(-0.0499792).epsilon(1e-6));
  CHECK(out.vector(0)(0) == doctest::Approx(std::cos(0.05)).epsilon(1e-14));
  CHECK(out.vector(0)(1) == doctest::Approx(-std::sin(0.05)).epsilon(1e-14));

  const Frame id = standard_basis(2);
  CHECK(frame_dist(flow_step(id, config_with(0.2)), id) == 0.0);
}

TEST_CASE("flow_step validates the step and the input") {
  CHECK(error_code_of([] { flow_step(mercedes_benz(), config_with(1.0 / 6.0)); }) == ErrorCode::StepTooLarge);
  CHECK(error_code_of([] { flow_step(mercedes_benz(), config_with(0.0)); }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { flow_step(mercedes_benz().scaled(2.0), config_with(0.1)); }) ==
        ErrorCode::NotUnitNorm);
  CHECK(error_code_of([] { run_flow(mercedes_benz(), config_with(1.0 / 6.0)); }) == ErrorCode::StepTooLarge);
}

TEST_CASE("flow_step preserves norms and fixes exactly the tangent-free frames") {
  Sampler s(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = s.integer(1, 5);
    const auto n = s.integer(1, 10);
    Matrix m = s.gaussian(d, n);
    m.colwise().normalize();
    const Frame f(m);
    const Frame g = flow_step(f, config_with(s.uniform(0.01, 0.99) / (2.0 * n)));
    for (Eigen::Index j = 0; j < n; ++j) CHECK(std::abs(g.vector(j).norm() - 1.0) <= 1e-12);
    const bool fixed = frame_dist(f, g) == 0.0;
    CHECK(fixed == (tangent_family(f).max_norm() <= FlowConfig{}.zero_threshold));
  }
}

TEST_CASE("run_flow examples") {
  FlowConfig c = config_with(0.1);
  c.stop_defect = 1e-8;
  const auto mb = run_flow(mercedes_benz(), c);
  CHECK(mb.trace.termination == FlowTermination::Converged);
  CHECK(mb.trace.final_iteration == 0);
  REQUIRE(mb.trace.records.size() == 1);
  CHECK(mb.trace.records[0].unit_defect_hs < 1e-14);

  const Frame start = perturbed_unit(2, 3, 0.01, 5);
  FlowConfig c2 = config_with(1.0 / 12.0);
  c2.stop_defect = 1e-6;
  const auto r = run_flow(start, c2);
  CHECK(r.trace.termination == FlowTermination::Converged);
  CHECK(r.trace.records.back().unit_defect_hs <= 1e-6);
  CHECK(r.relatively_prime);
  CHECK(r.max_norm_drift <= 1e-9);
  CHECK(r.displacement_hs <= r.displacement_bound);
  CHECK(static_cast<long>(r.trace.records.size()) == r.trace.final_iteration + 1);
  for (std::size_t k = 1; k < r.trace.records.size(); ++k) {
    CHECK(r.trace.records[k].iter == static_cast<long>(k));
    CHECK(r.trace.records[k].frame_potential <= r.trace.records[k - 1].frame_potential + 1e-10);
  }
}

TEST_CASE("run_flow stops at max_iters") {
  FlowConfig c = config_with(1.0 / 12.0);
  c.max_iters = 3;
  c.stop_defect = 0.0;
  const auto r = run_flow(perturbed_unit(2, 3, 0.1, 1), c);
  CHECK(r.trace.termination == FlowTermination::MaxIters);
  CHECK(r.trace.final_iteration == 3);
  CHECK(r.trace.records.size() == 4);
  CHECK(to_string(r.trace.termination) == "max_iters");
  CHECK(to_string(FlowTermination::Converged) == "converged");
}

TEST_CASE("run_flow on coprime shapes drives the defect down") {
  for (auto [d, n] : {std::pair<Eigen::Index, Eigen::Index>{2, 5}, {3, 4}, {3, 5}, {4, 7}}) {
    FlowConfig c = config_with(1.0 / (4.0 * n));
    const auto r = run_flow(perturbed_unit(d, n, 0.01, 77), c);
    INFO("d=" << d << " n=" << n);
    CHECK(std::gcd(d, n) == 1);
    CHECK(r.trace.termination == FlowTermination::Converged);
    CHECK(r.max_norm_drift <= 1e-12);
  }
}

TEST_CASE("renormalize_every keeps norms exact") {
  FlowConfig c = config_with(1.0 / 20.0);
  c.renormalize_every = 2;
  c.max_iters = 7;
  c.stop_defect = 0.0;
  const auto r = run_flow(perturbed_unit(2, 5, 0.05, 3), c);
  CHECK(r.max_norm_drift <= 1e-15);
}

TEST_CASE("flow_trace_csv layout") {
  FlowConfig c = config_with(1.0 / 12.0);
  c.max_iters = 2;
  c.stop_defect = 0.0;
  const auto r = run_flow(perturbed_unit(2, 3, 0.1, 1), c);
  std::istringstream in(flow_trace_csv(r.trace));
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,unit_defect_hs,frame_potential,max_tangent_norm");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("normalize_columns rejects zero vectors") {
  CHECK(error_code_of([] { normalize_columns(Frame(mat({{1, 0}, {0, 0}}))); }) == ErrorCode::ZeroVector);
}
