#include "framelab/detail/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace framelab::detail {

Vector central_difference_gradient(const Objective& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + step;
    const double up = f(probe);
    probe(i) = x(i) - step;
    const double down = f(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * step);
  }
  return g;
}

Matrix central_difference_jacobian(const std::function<Vector(const Vector&)>& c, const Vector& x,
                                   double h) {
  Vector probe = x;
  Matrix jac;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + step;
    const Vector up = c(probe);
    probe(i) = x(i) - step;
    const Vector down = c(probe);
    probe(i) = x(i);
    if (i == 0) jac.resize(up.size(), x.size());
    jac.col(i) = (up - down) / (2.0 * step);
  }
  return jac;
}

Matrix central_difference_hessian(const Objective& f, const Vector& x, double h) {
  const Eigen::Index k = x.size();
  Vector steps(k);
  for (Eigen::Index i = 0; i < k; ++i) steps(i) = h * std::max(1.0, std::abs(x(i)));
  const double f0 = f(x);
  Vector probe = x;
  Matrix hess(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    probe(i) = x(i) + steps(i);
    const double up = f(probe);
    probe(i) = x(i) - steps(i);
    const double down = f(probe);
    probe(i) = x(i);
    hess(i, i) = (up - 2.0 * f0 + down) / (steps(i) * steps(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      double corner[4];
      int c = 0;
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          probe(i) = x(i) + si * steps(i);
          probe(j) = x(j) + sj * steps(j);
          corner[c++] = f(probe);
        }
      probe(i) = x(i);
      probe(j) = x(j);
      hess(i, j) = hess(j, i) = (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * steps(i) * steps(j));
    }
  }
  return hess;
}

LbfgsResult minimize_lbfgs(const Objective& f, const Gradient& grad, Vector x0,
                           const LbfgsOptions& options) {
  struct Pair {
    Vector s, y;
    double rho;
  };
  std::deque<Pair> history;

  LbfgsResult r;
  r.x = std::move(x0);
  r.value = f(r.x);
  Vector g = grad(r.x);

  for (r.iterations = 0; r.iterations < options.max_iters; ++r.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) break;

    // Two-loop recursion.
    Vector q = g;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * history[k].s.dot(q);
      q -= alpha[k] * history[k].y;
    }
    if (!history.empty()) {
      const auto& last = history.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    } else {
      q /= std::max(1.0, g.norm());
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * history[k].y.dot(q);
      q += (alpha[k] - beta) * history[k].s;
    }
    Vector dir = -q;
    double slope = g.dot(dir);
    if (slope >= 0.0) {
      history.clear();
      dir = -g / std::max(1.0, g.norm());
      slope = g.dot(dir);
    }

    // Backtracking Armijo search.
    double step = 1.0;
    Vector next;
    double next_value = r.value;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      next = r.x + step * dir;
      next_value = f(next);
      if (next_value <= r.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vector next_g = grad(next);
    Pair p{next - r.x, next_g - g, 0.0};
    const double sy = p.s.dot(p.y);
    const double decrease = r.value - next_value;
    r.x = std::move(next);
    g = next_g;
    const double previous = r.value;
    r.value = next_value;
    if (sy > 1e-300) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > options.memory) history.pop_front();
    }
    if (decrease <= options.rel_tol * std::max(1.0, std::abs(previous))) break;
  }
  return r;
}

}  // namespace framelab::detail
