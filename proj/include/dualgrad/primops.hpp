// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace dualgrad {

enum class Op {
  Neg, Sin, Cos, Exp, Log, Sqrt, Recip,
  Add, Sub, Mul, Div,
  IAdd, ISub, IMul,
};

std::string_view op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);
int op_arity(Op op);
bool op_is_discrete(Op op);

// Scalar operations. Throws EvalError on unknown op or wrong arity.
double apply_primop(Op op, std::span<const double> args);
// d op / d x_i at args, 1-based i.
double primop_partial(Op op, int i, std::span<const double> args);

std::int64_t apply_discrete(Op op, std::span<const std::int64_t> args);

// Name-based entry points used by tests and the CLI.
double apply_primop(std::string_view op, std::span<const double> args);
double primop_partial(std::string_view op, int i, std::span<const double> args);

inline constexpr int kMaxArity = 2;

}  // namespace dualgrad
