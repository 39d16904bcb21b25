// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dualgrad/ad.hpp"

namespace dualgrad {

// Builtins of the staged stage and the host side of the Staged monoid:
// a cotangent plus an ordered map id -> (backpropagator, accumulated argument).
class StagedRuntime : public StageRuntime {
 public:
  StagedRuntime(Interpreter& in, Type c);

  Value zero();
  Value plus(Value a, Value b);
  Value call(std::int64_t id, Value f, double x);
  Value init(Value c);
  // Repeatedly takes the highest id, invokes its backpropagator once on the
  // accumulated argument and merges the result. Returns the cotangent.
  Value resolve(Value s);

  Value builtin(Prim p, std::vector<Value>& args) override;

  static StagedV& mut(Value& s);

 private:
  Interpreter& in_;
  Type c_;
};

TermPtr transform_staged(const Program& p);
GradResult wrap_staged(const Program& p, const Value& x, const Value& dy, const RunOptions& opts = {});

}  // namespace dualgrad
