#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "framelab/spectral.hpp"

namespace framelab {

/// A finite family tau_1..tau_n in R^d, stored as the d x n synthesis matrix
/// whose j-th column is tau_j. Whether the family actually spans R^d is a
/// property certified by analyze_frame, not an invariant of the type.
class Frame {
 public:
  explicit Frame(Matrix vectors);

  static Frame from_vectors(const std::vector<std::vector<double>>& vectors, Eigen::Index dim);

  Eigen::Index dim() const noexcept { return vectors_.rows(); }
  Eigen::Index size() const noexcept { return vectors_.cols(); }

  auto vector(Eigen::Index j) const { return vectors_.col(j); }
  const Matrix& synthesis_matrix() const noexcept { return vectors_; }
  Matrix analysis_matrix() const { return vectors_.transpose(); }

  Frame scaled(double alpha) const { return Frame(alpha * vectors_); }

 private:
  Matrix vectors_;
};

struct FrameReport {
  double lower_bound = 0.0;  // lambda_min(S)
  double upper_bound = 0.0;  // lambda_max(S)
  std::optional<double> eps_parseval;
  std::optional<double> eps_equal_norm;
  double tightness_defect_hs = 0.0;  // ||S - (tr S / d) I||_HS
  double unit_defect_hs = 0.0;       // ||S - (n / d) I||_HS
  double frame_potential = 0.0;      // tr(S^2)
  std::vector<double> norms_sq;

  bool is_frame(double floor = kPsdFloor) const { return lower_bound > floor; }
};

Vector analysis(const Frame& frame, const Vector& x);
Vector synthesis(const Frame& frame, const Vector& coefficients);
Matrix frame_operator(const Frame& frame);

FrameReport analyze_frame(const Frame& frame);

/// max_j |(n/d) ||tau_j||^2 - 1|, uncapped.
double equal_norm_deviation(const Frame& frame);

double frame_dist(const Frame& a, const Frame& b);

struct NearestFrame {
  Frame frame;
  double dist_sq;
};

/// S^{-1/2} tau_j, the unique nearest Parseval frame.
NearestFrame closest_parseval(const Frame& frame);

/// c * tau_j / ||tau_j|| with c = target, or the mean norm when absent.
NearestFrame closest_equal_norm(const Frame& frame, std::optional<double> target = std::nullopt);

/// Parseval frame for R^{n-d} whose Gram projection complements the input's.
Frame naimark_complement(const Frame& frame, double tol = 1e-9);

// Generators. All randomness comes from a stream seeded only by `seed`.
Frame random_frame(Eigen::Index d, Eigen::Index n, std::uint64_t seed);
Frame random_parseval_frame(Eigen::Index d, Eigen::Index n, std::uint64_t seed);
Frame harmonic_frame(Eigen::Index d, Eigen::Index n);
/// Displaces each vector by an independent random vector of norm <= delta.
Frame perturb_frame(const Frame& base, double delta, std::uint64_t seed);
/// sqrt(1 + eps) * base.
Frame scaled_frame(const Frame& base, double eps);

enum class FrameKind { Random, RandomParseval, Harmonic, Perturb, Scaled };

struct GenerateParams {
  std::optional<Frame> base;  // Perturb, Scaled
  double delta = 0.0;         // Perturb
  double epsilon = 0.0;       // Scaled
};

Frame generate(FrameKind kind, Eigen::Index d, Eigen::Index n, std::uint64_t seed,
               const GenerateParams& params = {});

}  // namespace framelab
