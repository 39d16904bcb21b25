// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "dualgrad/ad.hpp"

namespace dualgrad::detail {

// Top-level derivative pieces produced by deinterleaving: output cotangent
// to whatever the stage accumulates into.
using Bp = std::function<Value(const Value&)>;
// Cotangent at one input position to the stage's accumulator.
using Inject = std::function<Value(Value)>;
using Leaf = std::function<Value(const Value& x, Inject inj)>;

// Pairs every real of x with a backpropagator built by leaf from the
// injector for its position.
Value interleave(Interpreter& in, const Type& t, const Value& x, const Inject& inj, const Leaf& leaf);

struct DeinterleaveOps {
  // Splits a dual real into its primal and top-level backpropagator.
  std::function<std::pair<Value, Bp>(const Value&)> leaf;
  std::function<Value()> zero;
  std::function<Value(Value, Value)> combine;
  Counters* counters = nullptr;
  // When set, each produced function may run at most once per epoch.
  const std::uint64_t* epoch = nullptr;
};

std::pair<Value, Bp> deinterleave(const Type& t, const Value& v, const DeinterleaveOps& ops);

std::unique_ptr<Pullback> make_naive(const Compiled& c, const Value& x, const RunOptions& opts);
std::unique_ptr<Pullback> make_staged(const Compiled& c, const Value& x, const RunOptions& opts);
std::unique_ptr<Pullback> make_cayley(const Compiled& c, const Value& x, const RunOptions& opts);
std::unique_ptr<Pullback> make_array(const Compiled& c, const Value& x, const RunOptions& opts);

// Injected cotangent helpers shared by the wrappers.
Value inject_left(const Inject& inj, const Type& right_cot, Interpreter& in, Value z);

}  // namespace dualgrad::detail
