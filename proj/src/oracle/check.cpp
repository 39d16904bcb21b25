// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "dualgrad/error.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/oracle.hpp"

namespace dualgrad {

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

FiniteDiff jacobian_fd(const Program& p, const Value& x, double h) {
  if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");
  std::vector<double> xs = real_leaves(x);
  Value y0 = eval_source(p, x).value;
  std::size_t m = count_reals(y0);
  FiniteDiff fd;
  fd.jacobian.assign(m, std::vector<double>(xs.size(), 0.0));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double step = h * std::max(1.0, std::abs(xs[i]));
    std::vector<double> hi = xs, lo = xs;
    hi[i] += step;
    lo[i] -= step;
    std::vector<double> yp = real_leaves(eval_source(p, with_reals(x, hi)).value);
    std::vector<double> ym = real_leaves(eval_source(p, with_reals(x, lo)).value);
    for (std::size_t k = 0; k < m; ++k) {
      double d = std::numeric_limits<double>::quiet_NaN();
      if (yp.size() == m && ym.size() == m) d = (yp[k] - ym[k]) / (hi[i] - lo[i]);
      if (std::isnan(d)) ++fd.nan_entries;
      fd.jacobian[k][i] = d;
    }
  }
  return fd;
}

Value finite_diff_grad(const Program& p, const Value& x, double h, const Value& dy) {
  Value y0 = eval_source(p, x).value;
  std::vector<double> w;
  if (dy) {
    w = real_leaves_at(y0, dy);
  } else {
    if (!get_if<RealV>(y0)) throw UsageError("finite_diff_grad needs an output cotangent for non-scalar outputs");
    w = {1.0};
  }
  FiniteDiff fd = jacobian_fd(p, x, h);
  if (fd.nan_entries) throw EvalError("finite differences produced NaN (a probe left the domain of a primitive)");
  std::vector<double> g(count_reals(x), 0.0);
  for (std::size_t k = 0; k < fd.jacobian.size(); ++k)
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += w[k] * fd.jacobian[k][i];
  return cotangent_with_reals(x, g);
}

GradCheckReport grad_check(const Program& p, const Value& x, StageSpec stage, double tol_fd, double tol_forward,
                           const RunOptions& opts) {
  GradCheckReport r;
  Value y = eval_source(p, x).value;
  r.inputs = count_reals(x);
  r.outputs = count_reals(y);
  Matrix fwd = jacobian_forward(p, x);
  FiniteDiff fd = jacobian_fd(p, x);
  r.fd_nan = fd.nan_entries;

  auto pb = differentiate(compile(p, stage), x, opts);
  r.primal_ok = identical(pb->primal(), y);
  std::vector<double> e(r.outputs, 0.0);
  for (std::size_t j = 0; j < r.outputs; ++j) {
    e[j] = 1.0;
    Value dx = (*pb)(cotangent_with_reals(y, e));
    e[j] = 0.0;
    std::vector<double> row = real_leaves_at(x, dx);
    if (row.size() != r.inputs) throw InvariantViolation("gradient has the wrong number of reals");
    for (std::size_t i = 0; i < r.inputs; ++i) {
      r.max_err_forward = std::max(r.max_err_forward, rel_err(row[i], fwd[j][i]));
      if (!std::isnan(fd.jacobian[j][i])) r.max_err_fd = std::max(r.max_err_fd, rel_err(row[i], fd.jacobian[j][i]));
      if (std::isnan(row[i])) r.max_err_forward = std::numeric_limits<double>::infinity();
    }
  }
  r.pass = r.primal_ok && r.fd_nan == 0 && r.max_err_fd <= tol_fd && r.max_err_forward <= tol_forward;
  if (!r.primal_ok)
    r.message = "primal output differs from the source evaluator";
  else if (r.fd_nan)
    r.message = std::to_string(r.fd_nan) + " finite-difference entries are NaN";
  else if (!r.pass)
    r.message = "gradient disagrees with an oracle";
  return r;
}

}  // namespace dualgrad
