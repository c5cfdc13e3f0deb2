#include "framelab/banach_asf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framelab/error.hpp"
#include "framelab/random.hpp"

namespace framelab {

double p_norm(const Vector& x, double p) {
  if (x.size() == 0) return 0.0;
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((x.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
}

PNormSpace::PNormSpace(Eigen::Index dim, double p) : dim_(dim), p_(p) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "space dimension must be >= 1");
  if (!(p >= 1.0)) throw Error(ErrorCode::UnsupportedExponent, "p must lie in [1, inf]");
}

double PNormSpace::q() const noexcept {
  if (std::isinf(p_)) return 1.0;
  if (p_ == 1.0) return kInfinity;
  return p_ / (p_ - 1.0);
}

double PNormSpace::norm(const Vector& x) const { return p_norm(x, p_); }
double PNormSpace::dual_norm(const Vector& f) const { return p_norm(f, q()); }

ASF::ASF(PNormSpace space, Matrix functionals, Matrix vectors)
    : space_(space), functionals_(std::move(functionals)), vectors_(std::move(vectors)) {
  if (functionals_.rows() != space_.dim() || vectors_.rows() != space_.dim()) {
    throw Error(ErrorCode::ShapeMismatch, "ASF members must have length d");
  }
  if (functionals_.cols() != vectors_.cols() || vectors_.cols() < 1) {
    throw Error(ErrorCode::ShapeMismatch, "ASF needs n >= 1 functionals and n vectors");
  }
  if (!functionals_.allFinite() || !vectors_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "ASF entries must be finite");
  }
}

ASFReport analyze_asf(const ASF& asf, double tol) {
  const Eigen::Index d = asf.dim();
  const Eigen::Index n = asf.size();
  const double ratio = static_cast<double>(n) / static_cast<double>(d);
  const Matrix id = Matrix::Identity(d, d);

  ASFReport r;
  r.S = asf.frame_operator();

  Eigen::JacobiSVD<Matrix> svd(r.S);
  r.min_singular_value = svd.singularValues().minCoeff();
  r.invertible = r.min_singular_value > kPsdFloor;

  const double lambda = r.S.trace() / static_cast<double>(d);
  if ((r.S - lambda * id).norm() <= tol && std::abs(lambda) > tol) r.tight_lambda = lambda;
  r.parseval = (r.S - id).norm() <= tol;

  const auto spectrum = general_spectrum(r.S);
  r.spectrum_real = spectrum.max_abs_imag() <= kSpectrumRealTol;
  if (r.spectrum_real) {
    double eps = 0.0;
    for (const auto& v : spectrum.values) eps = std::max(eps, std::abs(v.real() - 1.0));
    if (eps < 1.0) r.eps_parseval = eps;
  }

  bool unit_triple = true;
  double eq_dev = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector tau = asf.vectors().col(j);
    const Vector f = asf.functionals().col(j);
    const double vn = asf.space().norm(tau);
    const double fn = asf.space().dual_norm(f);
    const double pair = f.dot(tau);
    r.vector_norms_sq.push_back(vn * vn);
    r.functional_norms_sq.push_back(fn * fn);
    r.pairings.push_back(pair);
    const double hi = std::max({vn * vn, fn * fn, pair});
    const double lo = std::min({vn * vn, fn * fn, pair});
    r.norm_triple_defect = std::max(r.norm_triple_defect, hi - lo);
    eq_dev = std::max(eq_dev, std::abs(ratio * vn * vn - 1.0));
    for (double v : {vn * vn, fn * fn, pair}) {
      r.equal_norm_spread = std::max(r.equal_norm_spread, std::abs(ratio * v - 1.0));
    }
    unit_triple = unit_triple && std::abs(vn - 1.0) <= tol && std::abs(fn - 1.0) <= tol &&
                  std::abs(pair - 1.0) <= tol;
  }
  if (r.norm_triple_defect <= tol && eq_dev < 1.0) r.eps_equal_norm = eq_dev;
  r.funtf = r.tight_lambda.has_value() && unit_triple;
  return r;
}

FeasibilityResidual enp_residual(const ASF& asf) {
  const Eigen::Index d = asf.dim();
  const double target = static_cast<double>(d) / static_cast<double>(asf.size());
  FeasibilityResidual out;
  auto add = [&](double v) {
    out.sum_sq += v * v;
    out.max_abs = std::max(out.max_abs, std::abs(v));
  };
  const Matrix defect = asf.frame_operator() - Matrix::Identity(d, d);
  for (Eigen::Index k = 0; k < defect.size(); ++k) add(defect.data()[k]);
  for (Eigen::Index j = 0; j < asf.size(); ++j) {
    const double vn = asf.space().norm(asf.vectors().col(j));
    const double fn = asf.space().dual_norm(asf.functionals().col(j));
    add(vn * vn - target);
    add(fn * fn - target);
    add(asf.functionals().col(j).dot(asf.vectors().col(j)) - target);
  }
  return out;
}

double asf_dist(const ASF& a, const ASF& b, DistanceVariant variant) {
  if (!(a.space() == b.space()) || a.size() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, "asf_dist: families live in different spaces or sizes");
  }
  const Eigen::Index n = a.size();
  Vector vec_dist(n), fun_dist(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    vec_dist(j) = a.space().norm(a.vectors().col(j) - b.vectors().col(j));
    fun_dist(j) = a.space().dual_norm(a.functionals().col(j) - b.functionals().col(j));
  }
  switch (variant.kind) {
    case DistanceVariant::Kind::Default:
      return std::sqrt(0.5 * (vec_dist.squaredNorm() + fun_dist.squaredNorm()));
    case DistanceVariant::Kind::Star:
      return 0.5 * (vec_dist.norm() + fun_dist.norm());
    case DistanceVariant::Kind::Power: {
      const double e = variant.exponent;
      if (!(e > 0.0) || std::isinf(e)) {
        throw Error(ErrorCode::InvalidArgument, "distance exponent must be a positive number");
      }
      const double sum = 0.5 * (vec_dist.array().pow(e).sum() + fun_dist.array().pow(e).sum());
      return std::pow(sum, 1.0 / e);
    }
  }
  return 0.0;
}

ASF from_hilbert(const Frame& frame) {
  return ASF(PNormSpace(frame.dim(), 2.0), frame.synthesis_matrix(), frame.synthesis_matrix());
}

ASF canonical_asf(const PNormSpace& space) {
  const Matrix id = Matrix::Identity(space.dim(), space.dim());
  return ASF(space, id, id);
}

ASF repeated_basis_asf(const PNormSpace& space, Eigen::Index n) {
  const Eigen::Index d = space.dim();
  if (n < d || n % d != 0) {
    throw Error(ErrorCode::IndivisibleRepeat,
                "repeated basis needs d | n, got d = " + std::to_string(d) + ", n = " + std::to_string(n));
  }
  const Eigen::Index copies = n / d;
  const double c = std::sqrt(static_cast<double>(d) / static_cast<double>(n));
  Matrix m = Matrix::Zero(d, n);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index r = 0; r < copies; ++r) m(k, k * copies + r) = c;
  return ASF(space, m, m);
}

ASF random_asf(const PNormSpace& space, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "random_asf needs n >= 1");
  auto rng = make_rng(seed);
  Matrix f = gaussian_matrix(space.dim(), n, rng);
  Matrix v = gaussian_matrix(space.dim(), n, rng);
  return ASF(space, std::move(f), std::move(v));
}

ASF perturb_asf(const ASF& base, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation magnitude must be >= 0");
  if (delta == 0.0) return base;
  auto vec_rng = make_rng(seed, 1);
  auto fun_rng = make_rng(seed, 2);
  const Eigen::Index d = base.dim();
  auto displace = [&](Matrix m, Rng& rng, double exponent) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      Vector dir = gaussian_matrix(d, 1, rng);
      while (p_norm(dir, exponent) == 0.0) dir = gaussian_matrix(d, 1, rng);
      m.col(j) += delta * uniform01(rng) / p_norm(dir, exponent) * dir;
    }
    return m;
  };
  Matrix v = displace(base.vectors(), vec_rng, base.space().p());
  Matrix f = displace(base.functionals(), fun_rng, base.space().q());
  return ASF(base.space(), std::move(f), std::move(v));
}

ASF generate_asf(ASFKind kind, const PNormSpace& space, Eigen::Index n, std::uint64_t seed,
                 const ASFGenerateParams& params) {
  switch (kind) {
    case ASFKind::Canonical:
      if (n != space.dim()) throw Error(ErrorCode::UnsupportedShape, "canonical ASF has n = d");
      return canonical_asf(space);
    case ASFKind::RepeatedBasis: return repeated_basis_asf(space, n);
    case ASFKind::Random: return random_asf(space, n, seed);
    case ASFKind::Perturb:
      if (!params.base) throw Error(ErrorCode::InvalidArgument, "perturb needs a base ASF");
      return perturb_asf(*params.base, params.delta, seed);
  }
  return canonical_asf(space);
}

}  // namespace framelab
