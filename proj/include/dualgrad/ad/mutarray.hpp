// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "dualgrad/ad.hpp"

namespace dualgrad {

struct StageSlot {
  Value f;  // backpropagator; null means the zero backpropagator
  std::shared_ptr<const ContribNode> node;
  double acc = 0.0;
  bool touched = false;
};

// Cotangent array (two-array variant only) and staging array. Index 0 of the
// staging array is a sentinel and is never resolved.
struct ArrayState {
  std::vector<double> cot;
  std::vector<StageSlot> stage;
  std::uint64_t version = 0;
};

class ArrayRuntime : public StageRuntime {
 public:
  ArrayRuntime(Interpreter& in, Variant v);

  Variant variant() const { return variant_; }

  Value state_alloc(std::size_t n_inputs, std::size_t n_backprops);
  Value staged_call(Value state, std::int64_t id, const Value& f, double x);
  Value input_cot(Value state, std::int64_t i, double a);
  // Walks ids from n_backprops - 1 down to 1 and returns the frozen array
  // (the cotangent array, or the accumulated arguments for the variants
  // without one). Consumes the state.
  std::vector<double> resolve(Value state, std::size_t n_backprops);

  // Updaters State -> State used by generated code and the wrapper.
  Value identity();
  Value compose(Value f, Value g);
  Value call_updater(std::int64_t id, Value f, double x);
  Value input_cot_updater(std::int64_t i, double a);
  Value apply_updater(const Value& u, Value state);

  // Contribution lists.
  Value make_contrib(std::vector<ContribEdge> edges);
  void record(std::int64_t id, const Value& contrib);
  const std::vector<std::shared_ptr<const ContribNode>>& tape() const { return tape_; }

  Value builtin(Prim p, std::vector<Value>& args) override;

  // Checks the handle is current, then consumes it.
  ArrayState& take(const Value& state);
  Value handle(const std::shared_ptr<ArrayState>& arr);

 private:
  Interpreter& in_;
  Variant variant_;
  Value identity_;
  std::vector<std::shared_ptr<const ContribNode>> tape_;
  std::int64_t resolving_ = -1;  // id being resolved, for the monotonicity check
};

TermPtr transform_mutarray(const Program& p, Variant v);
GradResult wrap_mutarray(const Program& p, const Value& x, const Value& dy, Variant v,
                         const RunOptions& opts = {});

}  // namespace dualgrad
