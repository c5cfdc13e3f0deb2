#include "framelab/projections.hpp"

#include <cmath>
#include <sstream>

#include "framelab/error.hpp"

namespace framelab {

ProjectionOp certify_projection(const Matrix& m, bool orthogonal_required, double proj_tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "a projection must be a non-empty square matrix");
  }
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "projection entries must be finite");

  ProjectionOp op;
  op.dim = m.rows();
  op.matrix = m;
  op.idempotency_defect = (m * m - m).norm();
  if (op.idempotency_defect > proj_tol) {
    throw Error(ErrorCode::NotIdempotent,
                "||P^2 - P||_HS = " + std::to_string(op.idempotency_defect));
  }
  op.self_adjoint = (m - m.transpose()).norm() <= proj_tol;
  if (orthogonal_required && !op.self_adjoint) {
    throw Error(ErrorCode::NotSelfAdjoint,
                "||P - P^T||_HS = " + std::to_string((m - m.transpose()).norm()));
  }

  Eigen::Index ones = 0;
  for (const auto& v : general_spectrum(m).values) {
    const double to_one = std::abs(v - 1.0);
    const double to_zero = std::abs(v);
    if (to_one <= kRankTol) {
      ++ones;
    } else if (to_zero > kRankTol) {
      throw Error(ErrorCode::NotIdempotent, "eigenvalue away from {0, 1}");
    }
  }
  // Nonzero singular values of an idempotent are >= 1, so the count is robust.
  Eigen::JacobiSVD<Matrix> svd(m);
  const Eigen::Index sv_rank = (svd.singularValues().array() > 0.5).count();
  if (sv_rank != ones) {
    throw Error(ErrorCode::NotIdempotent, "eigenvalue and singular-value ranks disagree");
  }
  op.rank = ones;
  return op;
}

AuerbachSystem::AuerbachSystem(PNormSpace space, Matrix basis_vectors, Matrix dual_functionals,
                               double tol)
    : space_(space), basis_(std::move(basis_vectors)), duals_(std::move(dual_functionals)) {
  const Eigen::Index d = space_.dim();
  if (basis_.rows() != d || basis_.cols() != d || duals_.rows() != d || duals_.cols() != d) {
    throw Error(ErrorCode::ShapeMismatch, "Auerbach system needs d basis vectors and d functionals");
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(space_.norm(basis_.col(k)) - 1.0) > tol) {
      throw Error(ErrorCode::NotAuerbach, "basis vector " + std::to_string(k) + " is not normalized");
    }
    if (std::abs(space_.dual_norm(duals_.col(k)) - 1.0) > tol) {
      throw Error(ErrorCode::NotAuerbach, "functional " + std::to_string(k) + " is not normalized");
    }
  }
  if ((duals_.transpose() * basis_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) {
    throw Error(ErrorCode::NotAuerbach, "functionals are not biorthogonal to the basis");
  }
}

AuerbachSystem AuerbachSystem::canonical(const PNormSpace& space) {
  const Matrix id = Matrix::Identity(space.dim(), space.dim());
  return AuerbachSystem(space, id, id);
}

std::optional<double> balance_epsilon_hilbert(const ProjectionOp& p, const Matrix& onb) {
  if (!p.self_adjoint) throw Error(ErrorCode::NotSelfAdjoint, "balance needs an orthogonal projection");
  if (p.rank == 0) throw Error(ErrorCode::RankZero, "balance needs rank >= 1");
  const Eigen::Index d = p.dim;
  if (onb.rows() != d || onb.cols() != d) {
    throw Error(ErrorCode::ShapeMismatch, "orthonormal system must be d x d");
  }
  if ((onb.transpose() * onb - Matrix::Identity(d, d)).norm() > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "system is not orthonormal");
  }
  const double ratio = static_cast<double>(d) / static_cast<double>(p.rank);
  const Vector norms_sq = (p.matrix * onb).colwise().squaredNorm();
  const double eps = (ratio * norms_sq.array() - 1.0).abs().maxCoeff();
  if (eps < 1.0) return eps;
  return std::nullopt;
}

BanachBalance balance_epsilon_banach(const ProjectionOp& p, const AuerbachSystem& sys, double tol) {
  if (p.rank == 0) throw Error(ErrorCode::RankZero, "balance needs rank >= 1");
  const Eigen::Index d = p.dim;
  if (sys.space().dim() != d) throw Error(ErrorCode::ShapeMismatch, "system dimension differs from P");

  const double ratio = static_cast<double>(d) / static_cast<double>(p.rank);
  BanachBalance out;
  bool all_hold = true;
  double eps = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const Vector pu = p.matrix * sys.basis_vectors().col(k);
    const Vector zp = p.matrix.transpose() * sys.dual_functionals().col(k);
    BalanceEntry e;
    const double a = sys.space().norm(pu);
    const double b = sys.space().dual_norm(zp);
    e.vector_norm_sq = a * a;
    e.functional_norm_sq = b * b;
    e.pairing = std::abs(sys.dual_functionals().col(k).dot(pu));
    std::ostringstream why;
    if (std::abs(e.vector_norm_sq - e.functional_norm_sq) > tol) {
      why << "||P u_k||^2 != ||zeta_k P||^2; ";
    }
    if (std::abs(e.vector_norm_sq - e.pairing) > tol) why << "||P u_k||^2 != |zeta_k(P u_k)|; ";
    if (std::abs(e.functional_norm_sq - e.pairing) > tol) why << "||zeta_k P||^2 != |zeta_k(P u_k)|; ";
    e.failure = why.str();
    e.chain_holds = e.failure.empty();
    all_hold = all_hold && e.chain_holds;
    eps = std::max(eps, std::abs(ratio * e.vector_norm_sq - 1.0));
    out.entries.push_back(std::move(e));
  }
  if (all_hold && eps < 1.0) out.epsilon = eps;
  return out;
}

double projection_pair_distance(const ProjectionOp& p, const ProjectionOp& q,
                                const AuerbachSystem& sys) {
  if (p.dim != q.dim || sys.space().dim() != p.dim) {
    throw Error(ErrorCode::ShapeMismatch, "projection_pair_distance: dimensions differ");
  }
  const Matrix diff = p.matrix - q.matrix;
  double total = 0.0;
  for (Eigen::Index k = 0; k < p.dim; ++k) {
    const double a = sys.space().norm(diff * sys.basis_vectors().col(k));
    const double b = sys.space().dual_norm(diff.transpose() * sys.dual_functionals().col(k));
    total += 0.5 * (a * a + b * b);
  }
  return total;
}

double chordal_distance(const ProjectionOp& p, const ProjectionOp& q, double tol) {
  if (p.dim != q.dim) throw Error(ErrorCode::ShapeMismatch, "chordal_distance: dimensions differ");
  if (p.rank != q.rank) {
    throw Error(ErrorCode::RankMismatch, "ranks " + std::to_string(p.rank) + " and " +
                                             std::to_string(q.rank) + " differ");
  }
  if (p.rank == 0) throw Error(ErrorCode::RankZero, "chordal distance needs rank >= 1");
  // For idempotents tr(P^2) = tr(Q^2) = m, so m - tr(PQ) = tr((P - Q)^2) / 2.
  // This form avoids cancellation and is exactly zero for P = Q.
  const Matrix diff = p.matrix - q.matrix;
  const double s = 0.5 * trace_of_product(diff, diff);
  if (s < -tol) {
    throw Error(ErrorCode::NegativeChordal, "m - tr(PQ) = " + std::to_string(s));
  }
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

}  // namespace framelab
