#include "framelab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "framelab/detail/lbfgs.hpp"
#include "framelab/error.hpp"

namespace framelab {

namespace {

constexpr int kMaxRetunes = 60;
constexpr std::uint64_t kAsfDraws = 32;

}  // namespace

double certify_tol_from_env() {
  const char* raw = std::getenv("FRAMELAB_TOL");
  if (raw == nullptr || *raw == '\0') return kDefaultCertifyTol;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string("FRAMELAB_TOL is not a positive number: ") + raw);
  }
  return v;
}

std::string_view to_string(InstanceKind kind) noexcept {
  switch (kind) {
    case InstanceKind::PerturbedEnp: return "perturbed_enp";
    case InstanceKind::ScaledEnp: return "scaled_enp";
    case InstanceKind::PerturbedAsf: return "perturbed_asf";
  }
  return "unknown";
}

InstanceKind parse_instance_kind(std::string_view name) {
  if (name == "perturbed_enp") return InstanceKind::PerturbedEnp;
  if (name == "scaled_enp") return InstanceKind::ScaledEnp;
  if (name == "perturbed_asf") return InstanceKind::PerturbedAsf;
  throw Error(ErrorCode::InvalidArgument, "unknown instance kind '" + std::string(name) + "'");
}

void validate(const InstanceSpec& spec) {
  if (!(spec.epsilon_target > 0.0 && spec.epsilon_target < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon_target must lie in (0, 1)");
  }
  if (spec.d < 1 || spec.n < spec.d) {
    throw Error(ErrorCode::Infeasible, "instances need n >= d >= 1");
  }
  if (spec.is_asf()) {
    if (!(spec.p >= 1.0)) throw Error(ErrorCode::UnsupportedExponent, "p must lie in [1, inf]");
    if (spec.n % spec.d != 0) {
      throw Error(ErrorCode::Infeasible, "equal-norm Parseval ASF base needs d | n");
    }
  }
}

// ---------------------------------------------------------------------------
// Instances

Instance generate_instance(const InstanceSpec& spec) {
  validate(spec);
  Instance inst;
  inst.spec = spec;
  const double eps = spec.epsilon_target;
  const double base_norm = std::sqrt(static_cast<double>(spec.d) / static_cast<double>(spec.n));

  switch (spec.kind) {
    case InstanceKind::ScaledEnp: {
      const Frame base = harmonic_frame(spec.d, spec.n);
      inst.frame_base = base;
      inst.frame = scaled_frame(base, eps);
      const auto report = analyze_frame(*inst.frame);
      inst.eps_parseval = report.eps_parseval.value_or(1.0);
      inst.eps_equal_norm = report.eps_equal_norm.value_or(1.0);
      return inst;
    }
    case InstanceKind::PerturbedEnp: {
      const Frame base = harmonic_frame(spec.d, spec.n);
      inst.frame_base = base;
      double delta = eps * base_norm;
      for (int i = 0; i < kMaxRetunes; ++i, delta *= 0.5) {
        Frame candidate = perturb_frame(base, delta, spec.seed);
        const auto report = analyze_frame(candidate);
        if (report.eps_parseval && report.eps_equal_norm && *report.eps_parseval <= eps &&
            *report.eps_equal_norm <= eps) {
          inst.frame = std::move(candidate);
          inst.eps_parseval = *report.eps_parseval;
          inst.eps_equal_norm = *report.eps_equal_norm;
          inst.delta = delta;
          return inst;
        }
      }
      throw Error(ErrorCode::Infeasible, "could not tune the perturbation below epsilon_target");
    }
    case InstanceKind::PerturbedAsf: {
      const ASF base = repeated_basis_asf(PNormSpace(spec.d, spec.p), spec.n);
      inst.asf_base = base;
      // S = T F^T is not symmetric, and whether its spectrum is real does not
      // change when delta shrinks, so non-real draws are redrawn instead.
      double delta = eps * base_norm;
      for (int i = 0; i < kMaxRetunes; ++i, delta *= 0.5) {
        for (std::uint64_t draw = 0; draw < kAsfDraws; ++draw) {
          ASF candidate = perturb_asf(base, delta, spec.seed + draw * 0x9E3779B97F4A7C15ULL);
          const auto report = analyze_asf(candidate);
          if (!report.spectrum_real) continue;
          if (report.eps_parseval && *report.eps_parseval <= eps && report.equal_norm_spread <= eps) {
            inst.asf = std::move(candidate);
            inst.eps_parseval = *report.eps_parseval;
            inst.eps_equal_norm = report.equal_norm_spread;
            inst.delta = delta;
            return inst;
          }
          break;
        }
      }
      throw Error(ErrorCode::Infeasible, "could not tune the perturbation below epsilon_target");
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown instance kind");
}

// ---------------------------------------------------------------------------
// Hilbert solver

bool enp_certified(const Frame& frame, double tol) {
  if (frame.size() < frame.dim()) return false;
  const auto report = analyze_frame(frame);
  return report.eps_parseval && *report.eps_parseval <= tol && equal_norm_deviation(frame) <= tol;
}

namespace {

// Constraints of the ENP set: upper triangle of Y Y^T - I, then ||y_j||^2 - d/n.
Vector enp_constraints(const Matrix& y) {
  const Eigen::Index d = y.rows();
  const Eigen::Index n = y.cols();
  const Matrix s = y * y.transpose();
  Vector c(d * (d + 1) / 2 + n);
  Eigen::Index row = 0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = a; b < d; ++b) c(row++) = s(a, b) - (a == b ? 1.0 : 0.0);
  const double target = static_cast<double>(d) / static_cast<double>(n);
  for (Eigen::Index j = 0; j < n; ++j) c(row++) = y.col(j).squaredNorm() - target;
  return c;
}

// Jacobian with respect to the column-major vectorization of y.
Matrix enp_jacobian(const Matrix& y) {
  const Eigen::Index d = y.rows();
  const Eigen::Index n = y.cols();
  Matrix jac = Matrix::Zero(d * (d + 1) / 2 + n, d * n);
  Eigen::Index row = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b, ++row) {
      for (Eigen::Index k = 0; k < n; ++k) {
        jac(row, a + k * d) += y(b, k);
        jac(row, b + k * d) += y(a, k);
      }
    }
  }
  for (Eigen::Index j = 0; j < n; ++j, ++row)
    for (Eigen::Index c = 0; c < d; ++c) jac(row, c + j * d) = 2.0 * y(c, j);
  return jac;
}

}  // namespace

std::optional<Frame> refine_enp(const Frame& target, const Frame& start, double certify_tol) {
  const Eigen::Index d = start.dim();
  const Eigen::Index n = start.size();
  const Eigen::Map<const Vector> x(target.synthesis_matrix().data(), d * n);
  Matrix y = start.synthesis_matrix();
  // Each step solves min ||y + step - x|| subject to the linearized
  // constraints J step = -c; the fixed points are first-order nearest points.
  for (int it = 0; it < 200; ++it) {
    const Eigen::Map<const Vector> yv(y.data(), d * n);
    const Vector c = enp_constraints(y);
    const Matrix jac = enp_jacobian(y);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac);
    cod.setThreshold(1e-10);
    const Vector g = yv - x;
    const Vector step = -g + cod.solve(Vector(jac * g - c));
    if (!step.allFinite()) return std::nullopt;
    Vector next = yv + step;
    y = Eigen::Map<Matrix>(next.data(), d, n);
    if (step.norm() <= 1e-15 * std::max(1.0, yv.norm())) break;
  }
  Frame out(y);
  if (!enp_certified(out, certify_tol)) return std::nullopt;
  return out;
}

EnpSolution nearest_enp_alternating(const Frame& input, double certify_tol, long max_rounds) {
  const Eigen::Index d = input.dim();
  const Eigen::Index n = input.size();
  if (n < d) throw Error(ErrorCode::UnsupportedShape, "ENP frames need n >= d");
  if (!analyze_frame(input).is_frame()) {
    throw Error(ErrorCode::SingularOperator, "input is numerically not a frame");
  }
  if (enp_certified(input, certify_tol)) return {input, 0.0, 0, false};

  const double c = std::sqrt(static_cast<double>(d) / static_cast<double>(n));
  // Alternation stalls sublinearly near non-smooth points of the ENP set, so
  // refinement is also attempted at these round counts before certification.
  constexpr long kEarlyRefine[] = {200, 2000};

  Frame x = input;
  long rounds = 0;
  bool certified = false;
  std::optional<Frame> refined;
  while (rounds < max_rounds) {
    x = closest_equal_norm(closest_parseval(x).frame, c).frame;
    ++rounds;
    if (enp_certified(x, certify_tol)) {
      certified = true;
      break;
    }
    if (std::find(std::begin(kEarlyRefine), std::end(kEarlyRefine), rounds) != std::end(kEarlyRefine)) {
      refined = refine_enp(input, x, certify_tol);
      if (refined) break;
    }
  }
  if (certified) refined = refine_enp(input, x, certify_tol);
  if (!certified && !refined) {
    throw Error(ErrorCode::NoConvergence,
                "alternating projections did not certify within " + std::to_string(max_rounds) + " rounds");
  }

  EnpSolution out{x, std::pow(frame_dist(input, x), 2), rounds, false};
  if (refined) {
    const double refined_sq = std::pow(frame_dist(input, *refined), 2);
    if (!certified || refined_sq <= out.dist_sq) {
      out.frame = *refined;
      out.dist_sq = refined_sq;
      out.refined = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Banach search

namespace {

struct AsfLayout {
  PNormSpace space;
  Eigen::Index d, n;

  ASF unpack(const Vector& x) const {
    return ASF(space, Eigen::Map<const Matrix>(x.data(), d, n),
               Eigen::Map<const Matrix>(x.data() + d * n, d, n));
  }
  Vector pack(const ASF& a) const {
    Vector x(2 * d * n);
    x.head(d * n) = Eigen::Map<const Vector>(a.functionals().data(), d * n);
    x.tail(d * n) = Eigen::Map<const Vector>(a.vectors().data(), d * n);
    return x;
  }
};

Vector asf_constraints(const AsfLayout& layout, const Vector& x) {
  const Eigen::Index d = layout.d;
  const Eigen::Index n = layout.n;
  const Eigen::Map<const Matrix> f(x.data(), d, n);
  const Eigen::Map<const Matrix> t(x.data() + d * n, d, n);
  const double target = static_cast<double>(d) / static_cast<double>(n);
  Vector c(d * d + 3 * n);
  const Matrix defect = t * f.transpose() - Matrix::Identity(d, d);
  c.head(d * d) = Eigen::Map<const Vector>(defect.data(), d * d);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double vn = layout.space.norm(t.col(j));
    const double fn = layout.space.dual_norm(f.col(j));
    c(d * d + 3 * j) = vn * vn - target;
    c(d * d + 3 * j + 1) = fn * fn - target;
    c(d * d + 3 * j + 2) = f.col(j).dot(t.col(j)) - target;
  }
  return c;
}

double asf_dist_sq(const AsfLayout& layout, const Vector& x, const Vector& x0) {
  const Eigen::Index d = layout.d;
  const Eigen::Index n = layout.n;
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double fd = layout.space.dual_norm(x.segment(j * d, d) - x0.segment(j * d, d));
    const double td = layout.space.norm(x.segment(d * n + j * d, d) - x0.segment(d * n + j * d, d));
    total += 0.5 * (fd * fd + td * td);
  }
  return total;
}

// The unique functional with f(v) = ||v||_p^2 and ||f||_q = ||v||_p.
Vector duality_map(const Vector& v, double p) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return Vector::Zero(v.size());
  const Vector u = v / m;
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::copysign(std::pow(std::abs(u(i)), p - 1.0), u(i));
  return m * std::pow(p_norm(u, p), 2.0 - p) * out;
}

// Hoelder's equality f_j(tau_j) = ||f_j||_q ||tau_j||_p holds on the ENP set,
// which forces f_j = J_p(tau_j). The full-variable constraints meet tangentially
// there (residual r allows ||f_j - J_p(tau_j)|| ~ sqrt(r)), so this refinement
// works over one side only. J_p is not differentiable at zero entries when
// p < 2; then the free side is f and tau = J_q(f). Each step is a min-norm
// restoration plus a Newton step for the distance on the constraint null space.
std::optional<Vector> refine_asf(const AsfLayout& layout, const Vector& x0, const Vector& start,
                                 double certify_tol) {
  const Eigen::Index d = layout.d;
  const Eigen::Index n = layout.n;
  const double p = layout.space.p();
  const double target = static_cast<double>(d) / static_cast<double>(n);
  const bool free_vectors = p >= 2.0;
  const double exponent = free_vectors ? p : p / (p - 1.0);

  auto lift = [&](const Vector& z) {
    Vector x(2 * d * n);
    Vector other(d * n);
    for (Eigen::Index j = 0; j < n; ++j) other.segment(j * d, d) = duality_map(z.segment(j * d, d), exponent);
    x.head(d * n) = free_vectors ? other : z;
    x.tail(d * n) = free_vectors ? z : other;
    return x;
  };
  const detail::Objective distance = [&](const Vector& z) { return asf_dist_sq(layout, lift(z), x0); };
  const std::function<Vector(const Vector&)> constraints = [&](const Vector& z) {
    const Vector x = lift(z);
    const Eigen::Map<const Matrix> f(x.data(), d, n);
    const Eigen::Map<const Matrix> t(x.data() + d * n, d, n);
    Vector c(d * d + n);
    const Matrix defect = t * f.transpose() - Matrix::Identity(d, d);
    c.head(d * d) = Eigen::Map<const Vector>(defect.data(), d * d);
    for (Eigen::Index j = 0; j < n; ++j) c(d * d + j) = std::pow(p_norm(t.col(j), p), 2) - target;
    return c;
  };

  struct Linearization {
    Matrix range;  // orthonormal basis of the row space of the constraint Jacobian
    Matrix null;
    Matrix jac;
    Vector sv;
    Matrix u;
  };
  auto linearize = [&](const Vector& z) {
    const Matrix jac = detail::central_difference_jacobian(constraints, z, 1e-7);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-8 * std::max(1.0, sv(0))) ++rank;
    return Linearization{svd.matrixV().leftCols(rank), svd.matrixV().rightCols(z.size() - rank), jac,
                         sv.head(rank), svd.matrixU().leftCols(rank)};
  };
  // Min-norm Gauss-Newton onto the constraint set; stops once the violation
  // no longer halves.
  auto restore = [&](Vector z) {
    double violation = constraints(z).lpNorm<Eigen::Infinity>();
    for (int k = 0; k < 30 && violation > 1e-15; ++k) {
      const Linearization lin = linearize(z);
      const Vector next = z - lin.range * (lin.u.transpose() * constraints(z)).cwiseQuotient(lin.sv);
      const double v = constraints(next).lpNorm<Eigen::Infinity>();
      if (!(v < violation)) break;
      const bool stalled = v > 0.5 * violation;
      z = next;
      violation = v;
      if (stalled) break;
    }
    return z;
  };

  Vector z = restore(free_vectors ? Vector(start.tail(d * n)) : Vector(start.head(d * n)));
  double value = distance(z);
  for (int it = 0; it < 100; ++it) {
    const Linearization lin = linearize(z);
    if (lin.null.cols() == 0) break;
    const Vector grad = detail::central_difference_gradient(distance, z, 1e-6);
    // Least-squares multipliers; the Lagrangian Hessian carries the curvature
    // of the constraint set.
    const Vector lambda = lin.u * (lin.range.transpose() * grad).cwiseQuotient(lin.sv);
    const detail::Objective lagrangian = [&](const Vector& y) { return distance(y) - lambda.dot(constraints(y)); };
    const Matrix hess = detail::central_difference_hessian(lagrangian, z, 1e-4);
    const Vector reduced_grad = lin.null.transpose() * grad;
    Eigen::LDLT<Matrix> ldlt(lin.null.transpose() * hess * lin.null);
    const bool newton = ldlt.info() == Eigen::Success && ldlt.isPositive();
    const Vector direction = lin.null * (newton ? Vector(ldlt.solve(-reduced_grad)) : Vector(-reduced_grad));
    if (!direction.allFinite()) return std::nullopt;

    // Past convergence the gradient is finite-difference noise and each step
    // gains only rounding, hence the relative cutoff.
    bool progress = false;
    for (double alpha = 1.0; alpha > 1e-8; alpha *= 0.5) {
      const Vector trial = restore(z + alpha * direction);
      const double v = distance(trial);
      if (v < value) {
        progress = value - v > 1e-12 * value;
        z = trial;
        value = v;
        break;
      }
    }
    if (!progress) break;
  }
  Vector x = lift(z);
  if (asf_constraints(layout, x).lpNorm<Eigen::Infinity>() > certify_tol) return std::nullopt;
  return x;
}

bool smooth_exponent(double p) { return p > 1.0 && std::isfinite(p); }

}  // namespace

AsfSearchResult nearest_enp_asf_search(const ASF& input, double certify_tol, long max_iters,
                                       const PenaltySchedule& schedule) {
  const Eigen::Index d = input.dim();
  const Eigen::Index n = input.size();
  if (!smooth_exponent(input.space().p())) {
    throw Error(ErrorCode::UnsupportedExponent, "the local search needs 1 < p < inf");
  }
  if (n % d != 0) throw Error(ErrorCode::Infeasible, "ENP ASF search is restricted to d | n");

  const AsfLayout layout{input.space(), d, n};
  const Vector x0 = layout.pack(input);
  auto residual_of = [&](const Vector& x) { return asf_constraints(layout, x).lpNorm<Eigen::Infinity>(); };

  AsfSearchResult best{input, 0.0, false, residual_of(x0), 0};
  if (best.residual <= certify_tol) {
    best.certified = true;
    return best;
  }
  best.dist_sq = std::numeric_limits<double>::infinity();

  // Near frames with repeated vectors the ENP set has several basins, and the
  // penalty path alone can settle in the wrong one. The Hilbert solution for
  // the midpoint (T + F) / 2 is an extra start; at p = 2 it is the answer.
  {
    const Matrix mid = 0.5 * (input.vectors() + input.functionals());
    const Matrix h = nearest_enp_alternating(Frame(mid), certify_tol).frame.synthesis_matrix();
    if (const auto refined = refine_asf(layout, x0, layout.pack(ASF(input.space(), h, h)), certify_tol)) {
      best = {layout.unpack(*refined), asf_dist_sq(layout, *refined, x0), true, residual_of(*refined), 0};
    }
  }

  Vector x = x0;
  double mu = schedule.initial_mu;
  long used = 0;
  std::optional<double> previous_candidate;
  for (int round = 0; round < schedule.max_rounds && used < max_iters; ++round, mu *= schedule.growth) {
    const detail::Objective objective = [&](const Vector& v) {
      return asf_dist_sq(layout, v, x0) + mu * asf_constraints(layout, v).squaredNorm();
    };
    const detail::Gradient gradient = [&](const Vector& v) {
      return detail::central_difference_gradient(objective, v, 1e-6);
    };
    detail::LbfgsOptions options;
    options.max_iters = std::min(schedule.iters_per_round, max_iters - used);
    const auto solved = detail::minimize_lbfgs(objective, gradient, x, options);
    used += solved.iterations;
    x = solved.x;

    const auto refined = refine_asf(layout, x0, x, certify_tol);
    const Vector candidate = refined ? *refined : x;
    const double residual = residual_of(candidate);
    const double dist_sq = asf_dist_sq(layout, candidate, x0);
    if (refined) {
      if (!best.certified || dist_sq < best.dist_sq) {
        best = {layout.unpack(candidate), dist_sq, true, residual, used};
      }
      if (previous_candidate && std::abs(*previous_candidate - dist_sq) <= 1e-11) break;
      previous_candidate = dist_sq;
    } else if (!best.certified && residual < best.residual) {
      best = {layout.unpack(candidate), dist_sq, false, residual, used};
    }
  }
  best.iterations = used;
  return best;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

double bound_hm(const InstanceSpec& s) {
  const double d = static_cast<double>(s.d);
  return 20.0 * s.epsilon_target * d * d;
}

double bound_bc(const InstanceSpec& s) {
  const double d = static_cast<double>(s.d);
  const double n = static_cast<double>(s.n);
  return 29.0 / 8.0 * d * d * n * std::pow(n - 1.0, 8.0) * s.epsilon_target;
}

// Ties within rounding keep the solver's point.
bool base_is_closer(const ExperimentRecord& rec) {
  return rec.base_dist_sq < rec.achieved_dist_sq - 1e-12 * std::max(1.0, rec.achieved_dist_sq);
}

void solve_hilbert(const Instance& inst, double tol, ExperimentRecord& rec) {
  const Frame& input = *inst.frame;
  rec.base_dist_sq = std::pow(frame_dist(input, *inst.frame_base), 2);
  const auto solution = nearest_enp_alternating(input, tol);
  rec.iterations = solution.rounds;
  Frame chosen = solution.frame;
  rec.achieved_dist_sq = solution.dist_sq;
  if (base_is_closer(rec)) {
    chosen = *inst.frame_base;
    rec.achieved_dist_sq = rec.base_dist_sq;
    rec.used_base = true;
  }
  rec.certified = enp_certified(chosen, tol);
}

void solve_banach(const Instance& inst, double tol, ExperimentRecord& rec) {
  const ASF& input = *inst.asf;
  rec.base_dist_sq = std::pow(asf_dist(input, *inst.asf_base), 2);
  const auto result = nearest_enp_asf_search(input, tol);
  rec.iterations = result.iterations;
  rec.achieved_dist_sq = result.dist_sq;
  if (!result.certified) {
    rec.error = "search did not reach residual " + format_double(tol);
    return;
  }
  ASF chosen = result.asf;
  if (base_is_closer(rec)) {
    chosen = *inst.asf_base;
    rec.achieved_dist_sq = rec.base_dist_sq;
    rec.used_base = true;
  }
  rec.certified = enp_residual(chosen).max_abs <= tol;
}

}  // namespace

ExperimentRecord run_trial(const InstanceSpec& spec, double certify_tol) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  rec.spec = spec;
  rec.bound_hm = bound_hm(spec);
  rec.bound_bc = bound_bc(spec);
  rec.lower_ref = spec.epsilon_target * spec.epsilon_target * static_cast<double>(spec.d);
  rec.achieved_dist_sq = std::numeric_limits<double>::quiet_NaN();
  try {
    const Instance inst = generate_instance(spec);
    rec.measured_eps_parseval = inst.eps_parseval;
    rec.measured_eps_equal_norm = inst.eps_equal_norm;
    if (spec.is_asf()) {
      solve_banach(inst, certify_tol, rec);
    } else {
      solve_hilbert(inst, certify_tol, rec);
    }
  } catch (const Error& e) {
    rec.certified = false;
    rec.error = e.what();
  }
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

EstimateResult estimate_paulsen(const std::vector<InstanceSpec>& grid, long trials,
                                double certify_tol, unsigned threads) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "estimate needs a non-empty grid");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "estimate needs at least one trial");

  std::vector<InstanceSpec> jobs;
  for (const auto& spec : grid) {
    for (long t = 0; t < trials; ++t) {
      InstanceSpec s = spec;
      s.seed = spec.seed + static_cast<std::uint64_t>(t);
      jobs.push_back(s);
    }
  }

  EstimateResult result;
  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      result.records[i] = run_trial(jobs[i], certify_tol);
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  }

  using Key = std::tuple<int, Eigen::Index, Eigen::Index, double, double>;
  std::map<Key, std::vector<const ExperimentRecord*>> groups;
  std::vector<Key> order;
  for (const auto& rec : result.records) {
    const Key key{static_cast<int>(rec.spec.kind), rec.spec.d, rec.spec.n,
                  rec.spec.is_asf() ? rec.spec.p : 2.0, rec.spec.epsilon_target};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&rec);
    if (rec.certified && !rec.spec.is_asf()) {
      if (rec.achieved_dist_sq > rec.bound_hm) ++result.hm_violations;
      if (rec.achieved_dist_sq > rec.bound_bc) ++result.bc_violations;
    }
  }
  for (const auto& key : order) {
    const auto& recs = groups[key];
    SummaryRow row{static_cast<InstanceKind>(std::get<0>(key)), std::get<1>(key), std::get<2>(key),
                   std::get<3>(key), std::get<4>(key)};
    row.trials = recs.size();
    std::vector<double> dists;
    for (const auto* r : recs) {
      if (!r->certified) continue;
      dists.push_back(r->achieved_dist_sq);
      row.max_ratio_hm = std::max(row.max_ratio_hm, r->achieved_dist_sq / r->bound_hm);
      row.max_ratio_lower = std::max(row.max_ratio_lower, r->achieved_dist_sq / r->lower_ref);
    }
    row.fraction_certified = static_cast<double>(dists.size()) / static_cast<double>(recs.size());
    if (!dists.empty()) {
      std::sort(dists.begin(), dists.end());
      row.max_dist_sq = dists.back();
      row.mean_dist_sq = std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
      const std::size_t mid = dists.size() / 2;
      row.median_dist_sq = dists.size() % 2 == 1 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
    }
    result.summary.push_back(row);
  }
  return result;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  out << "d,n,p,kind,eps_target,eps_measured_parseval,eps_measured_equalnorm,dist_sq,certified,"
         "rounds,bound_hm,bound_bc,lower_ref\n";
  for (const auto& r : records) {
    const double p = r.spec.is_asf() ? r.spec.p : 2.0;
    out << r.spec.d << ',' << r.spec.n << ',' << format_double(p) << ',' << to_string(r.spec.kind) << ','
        << format_double(r.spec.epsilon_target) << ',' << format_double(r.measured_eps_parseval) << ','
        << format_double(r.measured_eps_equal_norm) << ',' << format_double(r.achieved_dist_sq) << ','
        << (r.certified ? "true" : "false") << ',' << r.iterations << ',' << format_double(r.bound_hm)
        << ',' << format_double(r.bound_bc) << ',' << format_double(r.lower_ref) << '\n';
  }
  return out.str();
}

}  // namespace framelab
