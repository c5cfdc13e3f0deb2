#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "framelab/hilbert_frames.hpp"

namespace framelab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// l^p on R^d, 1 <= p <= infinity.
class PNormSpace {
 public:
  PNormSpace(Eigen::Index dim, double p);

  Eigen::Index dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  /// Conjugate exponent, 1/p + 1/q = 1.
  double q() const noexcept;

  double norm(const Vector& x) const;       // ||x||_p
  double dual_norm(const Vector& f) const;  // ||f||_q

  bool operator==(const PNormSpace&) const = default;

 private:
  Eigen::Index dim_;
  double p_;
};

double p_norm(const Vector& x, double p);

inline double dual_norm(const PNormSpace& space, const Vector& f) { return space.dual_norm(f); }

/// Paired functionals f_j (columns, acting by the Euclidean pairing) and
/// vectors tau_j (columns) over an l^p space.
class ASF {
 public:
  ASF(PNormSpace space, Matrix functionals, Matrix vectors);

  const PNormSpace& space() const noexcept { return space_; }
  Eigen::Index dim() const noexcept { return space_.dim(); }
  Eigen::Index size() const noexcept { return vectors_.cols(); }
  const Matrix& functionals() const noexcept { return functionals_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  /// S = sum_j tau_j f_j^T.
  Matrix frame_operator() const { return vectors_ * functionals_.transpose(); }

 private:
  PNormSpace space_;
  Matrix functionals_;
  Matrix vectors_;
};

inline constexpr double kSpectrumRealTol = 1e-9;

struct ASFReport {
  Matrix S;
  bool invertible = false;
  double min_singular_value = 0.0;
  std::optional<double> tight_lambda;
  bool parseval = false;
  bool funtf = false;
  std::optional<double> eps_parseval;
  bool spectrum_real = false;
  std::optional<double> eps_equal_norm;
  double norm_triple_defect = 0.0;
  /// max over j and over the three quantities of |(n/d) v - 1|; diagnostic
  /// for families whose triple chain does not hold.
  double equal_norm_spread = 0.0;
  std::vector<double> vector_norms_sq;      // ||tau_j||_p^2
  std::vector<double> functional_norms_sq;  // ||f_j||_q^2
  std::vector<double> pairings;             // f_j(tau_j)
};

ASFReport analyze_asf(const ASF& asf, double tol = 1e-10);

/// Sum of squared constraint violations for an equal-norm Parseval ASF and
/// the largest single violation.
struct FeasibilityResidual {
  double sum_sq = 0.0;
  double max_abs = 0.0;
};
FeasibilityResidual enp_residual(const ASF& asf);

struct DistanceVariant {
  enum class Kind { Default, Star, Power };
  Kind kind = Kind::Default;
  double exponent = 2.0;  // Power only

  static DistanceVariant standard() { return {}; }
  static DistanceVariant star() { return {Kind::Star, 2.0}; }
  static DistanceVariant power(double p) { return {Kind::Power, p}; }
};

double asf_dist(const ASF& a, const ASF& b, DistanceVariant variant = {});

ASF from_hilbert(const Frame& frame);

ASF canonical_asf(const PNormSpace& space);
/// Each (e_k, e_k^*) repeated n/d times, both sides scaled sqrt(d/n).
ASF repeated_basis_asf(const PNormSpace& space, Eigen::Index n);
ASF random_asf(const PNormSpace& space, Eigen::Index n, std::uint64_t seed);
/// Moves each vector within the p-ball and each functional within the q-ball of radius delta.
ASF perturb_asf(const ASF& base, double delta, std::uint64_t seed);

enum class ASFKind { Canonical, RepeatedBasis, Random, Perturb };

struct ASFGenerateParams {
  std::optional<ASF> base;
  double delta = 0.0;
};

ASF generate_asf(ASFKind kind, const PNormSpace& space, Eigen::Index n, std::uint64_t seed,
                 const ASFGenerateParams& params = {});

}  // namespace framelab
