// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/eval.hpp"

#include "dualgrad/interpreter.hpp"

namespace dualgrad {

EvalResult eval_source(const TermPtr& f, const Value& arg) {
  Counters counters;
  Interpreter in(counters);
  Value fn = in.eval(f);
  EvalResult r;
  r.value = in.apply(fn, arg);
  r.primops = counters.forwardPrimops;
  r.nonFinite = counters.nonFiniteResults;
  return r;
}

EvalResult eval_source(const Program& p, const Value& arg) { return eval_source(p.term, arg); }

}  // namespace dualgrad
