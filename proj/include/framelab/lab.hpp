#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "framelab/banach_asf.hpp"
#include "framelab/hilbert_frames.hpp"

namespace framelab {

inline constexpr double kDefaultCertifyTol = 1e-8;

/// Default certification tolerance, overridable through FRAMELAB_TOL.
double certify_tol_from_env();

enum class InstanceKind { PerturbedEnp, ScaledEnp, PerturbedAsf };

std::string_view to_string(InstanceKind kind) noexcept;
InstanceKind parse_instance_kind(std::string_view name);

struct InstanceSpec {
  InstanceKind kind = InstanceKind::PerturbedEnp;
  Eigen::Index d = 2;
  Eigen::Index n = 3;
  double epsilon_target = 0.1;
  double p = 2.0;  // perturbed_asf only
  std::uint64_t seed = 0;

  bool is_asf() const noexcept { return kind == InstanceKind::PerturbedAsf; }
};

void validate(const InstanceSpec& spec);

/// A generated near-ENP family together with the exact equal-norm Parseval
/// point it was generated from and its measured nearness.
struct Instance {
  InstanceSpec spec;
  std::optional<Frame> frame;
  std::optional<Frame> frame_base;
  std::optional<ASF> asf;
  std::optional<ASF> asf_base;
  double eps_parseval = 0.0;
  double eps_equal_norm = 0.0;
  double delta = 0.0;  // perturbation magnitude actually used
};

Instance generate_instance(const InstanceSpec& spec);

/// eps_parseval <= tol and max_j |(n/d) ||tau_j||^2 - 1| <= tol, recomputed from scratch.
bool enp_certified(const Frame& frame, double tol);

struct EnpSolution {
  Frame frame;
  double dist_sq = 0.0;
  long rounds = 0;
  bool refined = false;  // the local refinement produced the returned point
};

/// Alternates closest_parseval and closest_equal_norm(target sqrt(d/n)) until
/// certified, then refines to a first-order nearest point of the ENP set.
EnpSolution nearest_enp_alternating(const Frame& input, double certify_tol = kDefaultCertifyTol,
                                    long max_rounds = 20000);

/// Gauss-Newton refinement toward the nearest ENP frame to `target`, started
/// from the nearly feasible `start`. Returns nullopt if it fails to certify.
std::optional<Frame> refine_enp(const Frame& target, const Frame& start, double certify_tol);

struct PenaltySchedule {
  double initial_mu = 1.0;
  double growth = 10.0;
  int max_rounds = 8;
  long iters_per_round = 3000;
};

struct AsfSearchResult {
  ASF asf;
  double dist_sq = 0.0;
  bool certified = false;
  double residual = 0.0;  // largest single ENP constraint violation
  long iterations = 0;
};

/// Penalty search for the nearest equal-norm Parseval ASF over smooth l^p (1 < p < inf).
AsfSearchResult nearest_enp_asf_search(const ASF& input, double certify_tol = kDefaultCertifyTol,
                                       long max_iters = 30000, const PenaltySchedule& schedule = {});

struct ExperimentRecord {
  InstanceSpec spec;
  double measured_eps_parseval = 0.0;
  double measured_eps_equal_norm = 0.0;
  double achieved_dist_sq = 0.0;
  double base_dist_sq = 0.0;  // distance back to the generating ENP point
  bool certified = false;
  bool used_base = false;
  double bound_hm = 0.0;   // 20 eps d^2
  double bound_bc = 0.0;   // (29/8) d^2 n (n-1)^8 eps
  double lower_ref = 0.0;  // eps^2 d
  long iterations = 0;
  double wall_time_s = 0.0;
  std::string error;  // non-empty for failed trials
};

struct SummaryRow {
  InstanceKind kind;
  Eigen::Index d, n;
  double p, epsilon;
  std::size_t trials = 0;
  double fraction_certified = 0.0;
  double max_dist_sq = 0.0, mean_dist_sq = 0.0, median_dist_sq = 0.0;
  double max_ratio_hm = 0.0;     // max dist_sq / bound_hm
  double max_ratio_lower = 0.0;  // max dist_sq / lower_ref
};

struct EstimateResult {
  std::vector<ExperimentRecord> records;  // grid order, then trial order
  std::vector<SummaryRow> summary;
  std::size_t hm_violations = 0;  // certified Hilbert records above bound_hm
  std::size_t bc_violations = 0;
};

ExperimentRecord run_trial(const InstanceSpec& spec, double certify_tol);

/// Trial t of a grid point uses seed spec.seed + t. Records are independent
/// of `threads`.
EstimateResult estimate_paulsen(const std::vector<InstanceSpec>& grid, long trials,
                                double certify_tol = kDefaultCertifyTol, unsigned threads = 1);

std::string records_csv(const std::vector<ExperimentRecord>& records);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace framelab
