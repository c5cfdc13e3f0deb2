#include "framelab/paulsen_flow.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "framelab/error.hpp"

namespace framelab {

namespace {

void require_unit_norm(const Frame& frame) {
  const Vector norms = frame.synthesis_matrix().colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (std::abs(norms(j) - 1.0) > kUnitNormTol) {
      throw Error(ErrorCode::NotUnitNorm,
                  "vector " + std::to_string(j) + " has norm " + std::to_string(norms(j)));
    }
  }
}

void validate(const FlowConfig& config, Eigen::Index n) {
  const double limit = 1.0 / (2.0 * static_cast<double>(n));
  if (!(config.step_t > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "step t must be positive");
  }
  if (config.step_t >= limit) {
    throw Error(ErrorCode::StepTooLarge,
                "step t = " + std::to_string(config.step_t) + " must be below 1/(2n) = " +
                    std::to_string(limit));
  }
  if (config.max_iters < 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 0");
}

// Unchecked update shared by flow_step and run_flow.
Matrix rotate(const Matrix& tau, const FlowConfig& config) {
  const Matrix s = tau * tau.transpose();
  const Matrix st = s * tau;
  Matrix out = tau;
  for (Eigen::Index j = 0; j < tau.cols(); ++j) {
    const auto t = tau.col(j);
    const Vector omega = st.col(j) - st.col(j).dot(t) * t;
    const double omega_norm = omega.norm();
    if (omega_norm <= config.zero_threshold) continue;
    // omega is orthogonal to tau only up to the norm error of tau, and the
    // displayed update amplifies that error geometrically. Rotating in the
    // plane of the re-orthogonalized pair keeps ||tau_j|| fixed instead.
    const double tnorm_sq = t.squaredNorm();
    const Vector u = omega - (omega.dot(t) / tnorm_sq) * t;
    const double u_norm = u.norm();
    if (u_norm == 0.0) continue;
    const double angle = omega_norm * config.step_t;
    out.col(j) = std::cos(angle) * t - std::sin(angle) * std::sqrt(tnorm_sq) / u_norm * u;
  }
  return out;
}

FlowRecord measure(const Matrix& tau, long iter) {
  const double d = static_cast<double>(tau.rows());
  const double n = static_cast<double>(tau.cols());
  const Matrix s = tau * tau.transpose();
  const Matrix st = s * tau;
  double max_tangent = 0.0;
  for (Eigen::Index j = 0; j < tau.cols(); ++j) {
    const Vector omega = st.col(j) - st.col(j).dot(tau.col(j)) * tau.col(j);
    max_tangent = std::max(max_tangent, omega.norm());
  }
  FlowRecord r;
  r.iter = iter;
  r.unit_defect_hs = (s - (n / d) * Matrix::Identity(tau.rows(), tau.rows())).norm();
  r.frame_potential = s.squaredNorm();
  r.max_tangent_norm = max_tangent;
  return r;
}

}  // namespace

double TangentFamily::max_norm() const {
  return vectors.cols() == 0 ? 0.0 : vectors.colwise().norm().maxCoeff();
}

std::string_view to_string(FlowTermination t) noexcept {
  return t == FlowTermination::Converged ? "converged" : "max_iters";
}

TangentFamily tangent_family(const Frame& frame) {
  require_unit_norm(frame);
  const Matrix& tau = frame.synthesis_matrix();
  const Matrix st = frame_operator(frame) * tau;
  Matrix omega(tau.rows(), tau.cols());
  for (Eigen::Index j = 0; j < tau.cols(); ++j) {
    omega.col(j) = st.col(j) - st.col(j).dot(tau.col(j)) * tau.col(j);
  }
  return {std::move(omega)};
}

Frame flow_step(const Frame& frame, const FlowConfig& config) {
  validate(config, frame.size());
  require_unit_norm(frame);
  return Frame(rotate(frame.synthesis_matrix(), config));
}

Frame normalize_columns(const Frame& frame) {
  Matrix m = frame.synthesis_matrix();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm == 0.0) throw Error(ErrorCode::ZeroVector, "vector " + std::to_string(j) + " is zero");
    m.col(j) /= norm;
  }
  return Frame(std::move(m));
}

FlowResult run_flow(const Frame& frame, const FlowConfig& config) {
  validate(config, frame.size());
  require_unit_norm(frame);

  const Eigen::Index d = frame.dim();
  const Eigen::Index n = frame.size();
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const Matrix s0 = frame_operator(frame);

  Matrix tau = frame.synthesis_matrix();
  FlowTrace trace;
  long iter = 0;
  for (;; ++iter) {
    trace.records.push_back(measure(tau, iter));
    if (trace.records.back().unit_defect_hs <= config.stop_defect) {
      trace.termination = FlowTermination::Converged;
      break;
    }
    if (iter >= config.max_iters) {
      trace.termination = FlowTermination::MaxIters;
      break;
    }
    tau = rotate(tau, config);
    if (config.renormalize_every > 0 && (iter + 1) % config.renormalize_every == 0) {
      tau.colwise().normalize();
    }
  }
  trace.final_iteration = iter;

  FlowResult result{Frame(tau), std::move(trace)};
  const double initial_defect = result.trace.records.front().unit_defect_hs;
  result.relatively_prime = std::gcd(n, d) == 1;
  result.initial_defect_hypothesis = initial_defect * initial_defect <= 2.0 / (dd * dd * dd);
  result.displacement_hs = (frame_operator(result.frame) - s0).norm();
  result.displacement_bound = 4.0 * std::pow(dd, 20.0) * std::pow(nn, 8.5) /
                              (1.0 - 2.0 * nn * config.step_t) * initial_defect;
  result.max_norm_drift = (tau.colwise().norm().array() - 1.0).abs().maxCoeff();
  return result;
}

std::string flow_trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iter,unit_defect_hs,frame_potential,max_tangent_norm\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << r.unit_defect_hs << ',' << r.frame_potential << ','
        << r.max_tangent_norm << '\n';
  }
  return out.str();
}

}  // namespace framelab
