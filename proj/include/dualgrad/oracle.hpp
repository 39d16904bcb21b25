// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dualgrad/ad.hpp"

namespace dualgrad {

// Dual-numbers forward mode over the source AST.
struct ForwardResult {
  Value y;   // primal output
  Value dy;  // directional derivative, shaped like y (ints and units kept as in y)
};

// dir carries one tangent per real of x, in a value shaped like x.
ForwardResult forward_ad(const Program& p, const Value& x, const Value& dir);

using Matrix = std::vector<std::vector<double>>;  // rows: output reals, columns: input reals

Matrix jacobian_forward(const Program& p, const Value& x);

struct FiniteDiff {
  Matrix jacobian;
  std::size_t nan_entries = 0;  // entries where a probe left the domain or changed the output shape
};

inline constexpr double kDefaultStep = 1e-6;

// Central differences with step h * max(1, |x_i|).
FiniteDiff jacobian_fd(const Program& p, const Value& x, double h = kDefaultStep);

// Gradient of <dy, f(x)> by central differences, shaped like the cotangent
// of x. dy defaults to 1.0 for a scalar output. Throws EvalError on NaN.
Value finite_diff_grad(const Program& p, const Value& x, double h = kDefaultStep, const Value& dy = nullptr);

double rel_err(double a, double b);

struct GradCheckReport {
  bool pass = false;
  bool primal_ok = false;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t fd_nan = 0;
  double max_err_fd = 0.0;
  double max_err_forward = 0.0;
  std::string message;
};

// Runs the stage once per output-cotangent basis vector and compares each
// gradient with both oracles.
GradCheckReport grad_check(const Program& p, const Value& x, StageSpec stage, double tol_fd = 1e-4,
                           double tol_forward = 1e-9, const RunOptions& opts = {});

}  // namespace dualgrad
