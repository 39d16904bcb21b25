// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "dualgrad/ad.hpp"

namespace dualgrad {

// Staged values represented by updaters Staged -> Staged: zero is the
// identity and plus is composition.
class CayleyRuntime : public StageRuntime {
 public:
  using CotUpdate = std::function<Value(Value)>;

  CayleyRuntime(Interpreter& in, Type c);

  Value identity();
  Value compose(Value f, Value g);
  // Insert (f, x) at id, or add x to the argument already stored there.
  Value staged_call(std::int64_t id, Value f, double x);
  Value map_cot(CotUpdate g);
  Value apply_updater(const Value& u, Value s);
  // k applied to the one zero Staged value of the run.
  Value run_zero(const std::function<Value(Value)>& k);
  // Like the staged resolve, but applies each looked-up updater directly.
  Value resolve(Value s);

  Value builtin(Prim p, std::vector<Value>& args) override;

 private:
  Interpreter& in_;
  Type c_;
  Value identity_;
};

TermPtr transform_cayley(const Program& p);
GradResult wrap_cayley(const Program& p, const Value& x, const Value& dy, const RunOptions& opts = {});

}  // namespace dualgrad
