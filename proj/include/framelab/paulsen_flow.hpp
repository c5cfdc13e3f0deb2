#pragma once

#include <string_view>
#include <vector>

#include "framelab/hilbert_frames.hpp"

namespace framelab {

struct FlowConfig {
  double step_t = 0.0;           // must satisfy 0 < t < 1/(2n)
  long max_iters = 100000;
  double stop_defect = 1e-6;     // target ||S - (n/d) I||_HS
  double zero_threshold = 1e-14; // ||omega_j|| at or below this counts as zero
  long renormalize_every = 0;    // 0 disables maintenance renormalization
};

/// Columns omega_j = S tau_j - <S tau_j, tau_j> tau_j.
struct TangentFamily {
  Matrix vectors;

  double max_norm() const;
};

struct FlowRecord {
  long iter = 0;
  double unit_defect_hs = 0.0;
  double frame_potential = 0.0;
  double max_tangent_norm = 0.0;
};

enum class FlowTermination { Converged, MaxIters };

std::string_view to_string(FlowTermination t) noexcept;

struct FlowTrace {
  std::vector<FlowRecord> records;
  long final_iteration = 0;
  FlowTermination termination = FlowTermination::MaxIters;
};

struct FlowResult {
  Frame frame;
  FlowTrace trace;
  bool relatively_prime = false;       // gcd(n, d) == 1
  bool initial_defect_hypothesis = false;  // ||S0 - (n/d) I||^2 <= 2/d^3
  double displacement_hs = 0.0;        // ||S_final - S_0||_HS
  double displacement_bound = 0.0;     // 4 d^20 n^8.5 / (1 - 2nt) * ||S_0 - (n/d) I||_HS
  double max_norm_drift = 0.0;         // max_j | ||tau_j|| - 1 | at the end
};

inline constexpr double kUnitNormTol = 1e-9;

TangentFamily tangent_family(const Frame& frame);

Frame flow_step(const Frame& frame, const FlowConfig& config);

FlowResult run_flow(const Frame& frame, const FlowConfig& config);

/// Renormalizes every vector to unit length; throws ZeroVector on zero columns.
Frame normalize_columns(const Frame& frame);

/// One CSV line per record with header iter,unit_defect_hs,frame_potential,max_tangent_norm.
std::string flow_trace_csv(const FlowTrace& trace);

}  // namespace framelab
