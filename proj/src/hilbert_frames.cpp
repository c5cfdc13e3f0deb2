#include "framelab/hilbert_frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "framelab/error.hpp"
#include "framelab/random.hpp"

namespace framelab {

namespace {

void require_same_shape(const Frame& a, const Frame& b, const char* op) {
  if (a.dim() != b.dim() || a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": frames differ in d or n");
  }
}

std::optional<double> below_one(double eps) {
  if (eps < 1.0) return eps;
  return std::nullopt;
}

}  // namespace

Frame::Frame(Matrix vectors) : vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "a frame needs d >= 1 and n >= 1");
  }
  if (!vectors_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "frame entries must be finite");
  }
}

Frame Frame::from_vectors(const std::vector<std::vector<double>>& vectors, Eigen::Index dim) {
  Matrix m(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (static_cast<Eigen::Index>(vectors[j].size()) != dim) {
      throw Error(ErrorCode::ShapeMismatch,
                  "vector " + std::to_string(j) + " has length " + std::to_string(vectors[j].size()) +
                      ", expected " + std::to_string(dim));
    }
    for (Eigen::Index i = 0; i < dim; ++i) m(i, static_cast<Eigen::Index>(j)) = vectors[j][i];
  }
  return Frame(std::move(m));
}

Vector analysis(const Frame& frame, const Vector& x) {
  if (x.size() != frame.dim()) {
    throw Error(ErrorCode::ShapeMismatch, "analysis: vector length differs from d");
  }
  return frame.synthesis_matrix().transpose() * x;
}

Vector synthesis(const Frame& frame, const Vector& coefficients) {
  if (coefficients.size() != frame.size()) {
    throw Error(ErrorCode::ShapeMismatch, "synthesis: coefficient count differs from n");
  }
  return frame.synthesis_matrix() * coefficients;
}

Matrix frame_operator(const Frame& frame) {
  const Matrix& t = frame.synthesis_matrix();
  Matrix s = t * t.transpose();
  // Rounding in the product can break exact symmetry.
  return 0.5 * (s + s.transpose());
}

double equal_norm_deviation(const Frame& frame) {
  const double ratio = static_cast<double>(frame.size()) / static_cast<double>(frame.dim());
  const Vector norms_sq = frame.synthesis_matrix().colwise().squaredNorm();
  return (ratio * norms_sq.array() - 1.0).abs().maxCoeff();
}

FrameReport analyze_frame(const Frame& frame) {
  const double d = static_cast<double>(frame.dim());
  const double n = static_cast<double>(frame.size());
  const Matrix s = frame_operator(frame);
  const auto eig = sym_eig(s);
  const Matrix id = Matrix::Identity(frame.dim(), frame.dim());

  FrameReport r;
  r.lower_bound = eig.eigenvalues(0);
  r.upper_bound = eig.eigenvalues(eig.eigenvalues.size() - 1);
  r.eps_parseval = below_one(std::max(1.0 - r.lower_bound, r.upper_bound - 1.0));
  r.eps_equal_norm = below_one(equal_norm_deviation(frame));
  r.tightness_defect_hs = (s - (s.trace() / d) * id).norm();
  r.unit_defect_hs = (s - (n / d) * id).norm();
  r.frame_potential = s.squaredNorm();
  const Vector norms_sq = frame.synthesis_matrix().colwise().squaredNorm();
  r.norms_sq.assign(norms_sq.data(), norms_sq.data() + norms_sq.size());
  return r;
}

double frame_dist(const Frame& a, const Frame& b) {
  require_same_shape(a, b, "frame_dist");
  return (a.synthesis_matrix() - b.synthesis_matrix()).norm();
}

NearestFrame closest_parseval(const Frame& frame) {
  const Matrix root = inv_sqrt_psd(frame_operator(frame));
  Frame out(root * frame.synthesis_matrix());
  const double dist_sq = (out.synthesis_matrix() - frame.synthesis_matrix()).squaredNorm();
  return {std::move(out), dist_sq};
}

NearestFrame closest_equal_norm(const Frame& frame, std::optional<double> target) {
  const Vector norms = frame.synthesis_matrix().colwise().norm();
  for (Eigen::Index j = 0; j < norms.size(); ++j) {
    if (norms(j) == 0.0) {
      throw Error(ErrorCode::ZeroVector, "vector " + std::to_string(j) + " is zero");
    }
  }
  if (target && !(*target > 0.0 && std::isfinite(*target))) {
    throw Error(ErrorCode::InvalidArgument, "target norm must be positive");
  }
  const double c = target.value_or(norms.mean());
  Matrix out = frame.synthesis_matrix();
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) *= c / norms(j);
  const double dist_sq = (norms.array() - c).square().sum();
  return {Frame(std::move(out)), dist_sq};
}

Frame naimark_complement(const Frame& frame, double tol) {
  const Eigen::Index d = frame.dim();
  const Eigen::Index n = frame.size();
  if (n == d) {
    throw Error(ErrorCode::NoComplement, "n = d leaves a zero-dimensional complement");
  }
  const auto report = analyze_frame(frame);
  if (!report.eps_parseval || *report.eps_parseval > tol) {
    throw Error(ErrorCode::NotParseval, "naimark_complement needs a Parseval frame");
  }
  // Columns of the analysis matrix, made exactly orthonormal, then extended to
  // an orthonormal basis of R^n. The extension columns are the complement.
  const Matrix isometry = frame.analysis_matrix() * inv_sqrt_psd(frame_operator(frame));
  Eigen::HouseholderQR<Matrix> qr(isometry);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return Frame(q.rightCols(n - d).transpose());
}

Frame random_frame(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  if (d < 1 || n < 1) throw Error(ErrorCode::UnsupportedShape, "random_frame needs d, n >= 1");
  auto rng = make_rng(seed);
  return Frame(gaussian_matrix(d, n, rng));
}

Frame random_parseval_frame(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  if (d < 1 || n < d) throw Error(ErrorCode::UnsupportedShape, "Parseval frames need n >= d >= 1");
  return closest_parseval(random_frame(d, n, seed)).frame;
}

Frame harmonic_frame(Eigen::Index d, Eigen::Index n) {
  if (d < 1 || n < d) throw Error(ErrorCode::UnsupportedShape, "harmonic frames need n >= d >= 1");
  // Rows are orthonormal real DFT rows: a (cos, sin) pair per frequency
  // 0 < k < n/2, plus the constant row and, for even n, the alternating row.
  // Each pair adds 2/n to every squared column norm and each single row adds
  // 1/n, so any such choice of d rows is an equal-norm Parseval frame.
  const double nn = static_cast<double>(n);
  std::vector<Vector> rows;
  auto add_pair = [&](Eigen::Index k) {
    Vector c(n), s(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k * (j + 1)) / nn;
      c(j) = std::sqrt(2.0 / nn) * std::cos(angle);
      s(j) = std::sqrt(2.0 / nn) * std::sin(angle);
    }
    rows.push_back(std::move(c));
    rows.push_back(std::move(s));
  };
  const Vector constant = Vector::Constant(n, 1.0 / std::sqrt(nn));
  if (d % 2 == 1) {
    rows.push_back(constant);
    for (Eigen::Index k = 1; k <= (d - 1) / 2; ++k) add_pair(k);
  } else if (d < n) {
    for (Eigen::Index k = 1; k <= d / 2; ++k) add_pair(k);
  } else {
    // n = d even: frequency n/2 has a vanishing sine row.
    for (Eigen::Index k = 1; k < d / 2; ++k) add_pair(k);
    rows.push_back(constant);
    Vector alternating(n);
    for (Eigen::Index j = 0; j < n; ++j) alternating(j) = ((j + 1) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(nn);
    rows.push_back(std::move(alternating));
  }
  Matrix m(d, n);
  for (Eigen::Index i = 0; i < d; ++i) m.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  return Frame(std::move(m));
}

Frame perturb_frame(const Frame& base, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation magnitude must be >= 0");
  if (delta == 0.0) return base;
  auto rng = make_rng(seed);
  Matrix out = base.synthesis_matrix();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    Vector dir = gaussian_matrix(out.rows(), 1, rng);
    while (dir.norm() == 0.0) dir = gaussian_matrix(out.rows(), 1, rng);
    out.col(j) += delta * uniform01(rng) * dir.normalized();
  }
  return Frame(std::move(out));
}

Frame scaled_frame(const Frame& base, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling epsilon must be >= 0");
  return base.scaled(std::sqrt(1.0 + eps));
}

Frame generate(FrameKind kind, Eigen::Index d, Eigen::Index n, std::uint64_t seed,
               const GenerateParams& params) {
  switch (kind) {
    case FrameKind::Random: return random_frame(d, n, seed);
    case FrameKind::RandomParseval: return random_parseval_frame(d, n, seed);
    case FrameKind::Harmonic: return harmonic_frame(d, n);
    case FrameKind::Perturb:
    case FrameKind::Scaled:
      break;
  }
  if (!params.base) throw Error(ErrorCode::InvalidArgument, "perturb/scaled need a base frame");
  return kind == FrameKind::Perturb ? perturb_frame(*params.base, params.delta, seed)
                                    : scaled_frame(*params.base, params.epsilon);
}

}  // namespace framelab
