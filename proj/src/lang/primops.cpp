// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/primops.hpp"

#include <array>
#include <cmath>
#include <string>

#include "dualgrad/error.hpp"

namespace dualgrad {
namespace {

struct OpInfo {
  Op op;
  std::string_view name;
  int arity;
  bool discrete;
};

constexpr std::array<OpInfo, 14> kOps{{
    {Op::Neg, "neg", 1, false},   {Op::Sin, "sin", 1, false},   {Op::Cos, "cos", 1, false},
    {Op::Exp, "exp", 1, false},   {Op::Log, "log", 1, false},   {Op::Sqrt, "sqrt", 1, false},
    {Op::Recip, "recip", 1, false}, {Op::Add, "add", 2, false}, {Op::Sub, "sub", 2, false},
    {Op::Mul, "mul", 2, false},   {Op::Div, "div", 2, false},   {Op::IAdd, "iadd", 2, true},
    {Op::ISub, "isub", 2, true},  {Op::IMul, "imul", 2, true},
}};

const OpInfo& info(Op op) { return kOps[static_cast<std::size_t>(op)]; }

void check_args(Op op, std::size_t n) {
  if (static_cast<int>(n) != info(op).arity)
    throw EvalError(std::string(info(op).name) + " expects " + std::to_string(info(op).arity) + " arguments, got " +
                    std::to_string(n));
}

Op lookup(std::string_view name) {
  auto o = op_from_name(name);
  if (!o) throw EvalError("unknown operation " + std::string(name));
  return *o;
}

}  // namespace

std::string_view op_name(Op op) { return info(op).name; }

std::optional<Op> op_from_name(std::string_view name) {
  for (const auto& o : kOps)
    if (o.name == name) return o.op;
  return std::nullopt;
}

int op_arity(Op op) { return info(op).arity; }
bool op_is_discrete(Op op) { return info(op).discrete; }

double apply_primop(Op op, std::span<const double> a) {
  if (op_is_discrete(op)) throw EvalError(std::string(op_name(op)) + " is not a scalar operation");
  check_args(op, a.size());
  switch (op) {
    case Op::Neg: return -a[0];
    case Op::Sin: return std::sin(a[0]);
    case Op::Cos: return std::cos(a[0]);
    case Op::Exp: return std::exp(a[0]);
    case Op::Log: return std::log(a[0]);
    case Op::Sqrt: return std::sqrt(a[0]);
    case Op::Recip: return 1.0 / a[0];
    case Op::Add: return a[0] + a[1];
    case Op::Sub: return a[0] - a[1];
    case Op::Mul: return a[0] * a[1];
    case Op::Div: return a[0] / a[1];
    default: break;
  }
  throw EvalError("unknown operation");
}

double primop_partial(Op op, int i, std::span<const double> a) {
  if (op_is_discrete(op)) throw EvalError(std::string(op_name(op)) + " has no derivative");
  check_args(op, a.size());
  if (i < 1 || i > op_arity(op))
    throw EvalError("partial index " + std::to_string(i) + " out of range for " + std::string(op_name(op)));
  switch (op) {
    case Op::Neg: return -1.0;
    case Op::Sin: return std::cos(a[0]);
    case Op::Cos: return -std::sin(a[0]);
    case Op::Exp: return std::exp(a[0]);
    case Op::Log: return 1.0 / a[0];
    case Op::Sqrt: return 0.5 / std::sqrt(a[0]);
    case Op::Recip: return -1.0 / (a[0] * a[0]);
    case Op::Add: return 1.0;
    case Op::Sub: return i == 1 ? 1.0 : -1.0;
    case Op::Mul: return i == 1 ? a[1] : a[0];
    case Op::Div: return i == 1 ? 1.0 / a[1] : -a[0] / (a[1] * a[1]);
    default: break;
  }
  throw EvalError("unknown operation");
}

std::int64_t apply_discrete(Op op, std::span<const std::int64_t> a) {
  if (!op_is_discrete(op)) throw EvalError(std::string(op_name(op)) + " is not an integer operation");
  check_args(op, a.size());
  // Wrap around on overflow instead of invoking undefined behaviour.
  auto x = static_cast<std::uint64_t>(a[0]);
  auto y = static_cast<std::uint64_t>(a[1]);
  switch (op) {
    case Op::IAdd: return static_cast<std::int64_t>(x + y);
    case Op::ISub: return static_cast<std::int64_t>(x - y);
    case Op::IMul: return static_cast<std::int64_t>(x * y);
    default: break;
  }
  throw EvalError("unknown operation");
}

double apply_primop(std::string_view op, std::span<const double> args) { return apply_primop(lookup(op), args); }

double primop_partial(std::string_view op, int i, std::span<const double> args) {
  return primop_partial(lookup(op), i, args);
}

}  // namespace dualgrad
