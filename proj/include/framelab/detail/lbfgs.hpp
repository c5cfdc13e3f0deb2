#pragma once

#include <functional>

#include "framelab/spectral.hpp"

namespace framelab::detail {

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

struct LbfgsOptions {
  int memory = 10;
  long max_iters = 2000;
  double grad_tol = 1e-10;
  double rel_tol = 1e-15;  // stop when relative decrease stalls
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  long iterations = 0;
};

LbfgsResult minimize_lbfgs(const Objective& f, const Gradient& grad, Vector x0,
                           const LbfgsOptions& options = {});

/// Central differences with step h * max(1, |x_i|).
Vector central_difference_gradient(const Objective& f, const Vector& x, double h);

/// Symmetric second differences with step h * max(1, |x_i|).
Matrix central_difference_hessian(const Objective& f, const Vector& x, double h);

/// Columns are central-difference derivatives of a vector-valued map.
Matrix central_difference_jacobian(const std::function<Vector(const Vector&)>& c, const Vector& x,
                                   double h);

}  // namespace framelab::detail
