#pragma once

#include <optional>
#include <string>
#include <vector>

#include "framelab/banach_asf.hpp"

namespace framelab {

inline constexpr double kProjectionTol = 1e-10;
inline constexpr double kRankTol = 1e-8;

/// A certified idempotent matrix.
struct ProjectionOp {
  Eigen::Index dim = 0;
  Matrix matrix;
  double idempotency_defect = 0.0;  // ||P^2 - P||_HS
  Eigen::Index rank = 0;
  bool self_adjoint = false;        // ||P - P^T||_HS <= proj_tol
};

ProjectionOp certify_projection(const Matrix& m, bool orthogonal_required = false,
                                double proj_tol = kProjectionTol);

/// Normalized basis u_k (columns) with normalized biorthogonal functionals zeta_k (columns).
class AuerbachSystem {
 public:
  AuerbachSystem(PNormSpace space, Matrix basis_vectors, Matrix dual_functionals,
                 double tol = 1e-10);

  static AuerbachSystem canonical(const PNormSpace& space);

  const PNormSpace& space() const noexcept { return space_; }
  const Matrix& basis_vectors() const noexcept { return basis_; }
  const Matrix& dual_functionals() const noexcept { return duals_; }

 private:
  PNormSpace space_;
  Matrix basis_;
  Matrix duals_;
};

/// max_k |(d/n) ||P u_k||^2 - 1| when below one. Columns of `onb` must be orthonormal.
std::optional<double> balance_epsilon_hilbert(const ProjectionOp& p, const Matrix& onb);

struct BalanceEntry {
  double vector_norm_sq = 0.0;      // ||P u_k||_p^2
  double functional_norm_sq = 0.0;  // ||zeta_k P||_q^2
  double pairing = 0.0;             // |zeta_k(P u_k)|
  bool chain_holds = false;
  std::string failure;              // empty when chain_holds
};

struct BanachBalance {
  std::optional<double> epsilon;
  std::vector<BalanceEntry> entries;
};

BanachBalance balance_epsilon_banach(const ProjectionOp& p, const AuerbachSystem& sys,
                                     double tol = 1e-10);

double projection_pair_distance(const ProjectionOp& p, const ProjectionOp& q,
                                const AuerbachSystem& sys);

/// (m - tr(PQ))^{1/2}; values of m - tr(PQ) in [-tol, 0] map to zero.
double chordal_distance(const ProjectionOp& p, const ProjectionOp& q, double tol = 1e-10);

}  // namespace framelab
