// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dualgrad/counters.hpp"
#include "dualgrad/term.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad {

// Builtin table of one AD stage.
class StageRuntime {
 public:
  virtual ~StageRuntime() = default;
  virtual Value builtin(Prim p, std::vector<Value>& args) = 0;
};

struct InterpreterOptions {
  // Tag monotonicity and at-most-once assertions.
  bool check_invariants = true;
};

// Call-by-value evaluator for source and target terms. Variables live in
// per-name stacks; closures capture exactly their free variables.
class Interpreter {
 public:
  explicit Interpreter(Counters& counters, InterpreterOptions opts = {});

  void set_runtime(StageRuntime* rt) { runtime_ = rt; }
  // Zeros of this type are counted as zeroAllocationsOfTypeC.
  void set_cotangent_type(Type c) { cot_type_ = std::move(c); }
  const Type& cotangent_type() const { return cot_type_; }

  Value eval(const TermPtr& t, const std::vector<std::pair<Symbol, Value>>& env = {});
  Value apply(const Value& f, Value arg);

  Value zero(const Type& t);
  Value add(const Value& a, const Value& b) { return add_cot(a, b, &counters_); }

  Counters& counters() { return counters_; }
  bool checking() const { return opts_.check_invariants; }

  // Closure creation used by hosts that build linear functions.
  Value host_linear(std::function<Value(Value)> fn, std::int64_t id = -1);

 private:
  Value ev(const TermPtr& tp);
  Value make_closure(const TermPtr& tp, bool linear);
  void push(Symbol s, Value v);
  void pop(Symbol s);
  const Value& lookup(Symbol s) const;
  void tag(const Value& v, std::int64_t id);

  Counters& counters_;
  InterpreterOptions opts_;
  StageRuntime* runtime_ = nullptr;
  Type cot_type_;
  std::vector<std::vector<Value>> env_;
};

}  // namespace dualgrad
