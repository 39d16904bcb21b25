// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dualgrad/counters.hpp"
#include "dualgrad/interpreter.hpp"
#include "dualgrad/typecheck.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad {

enum class Stage { Naive, Staged, Cayley, MutArray };
enum class Variant { TwoArray, SingleArray, Contrib, Tape };

struct StageSpec {
  Stage stage = Stage::Naive;
  Variant variant = Variant::TwoArray;

  friend bool operator==(const StageSpec& a, const StageSpec& b) {
    return a.stage == b.stage && (a.stage != Stage::MutArray || a.variant == b.variant);
  }
};

std::string to_string(const StageSpec& s);
// Accepts naive|staged|cayley|mutarray, and the variant names as stage
// shorthands (two-array, single-array, contrib, tape).
StageSpec parse_stage(std::string_view stage, std::string_view variant = "");
// naive, staged, cayley and the four array variants.
std::vector<StageSpec> all_stages();

// A program transformed for one stage.
struct Compiled {
  Program program;
  StageSpec spec;
  TermPtr target;  // closed function term over the stage's dual types
  StageProfile profile;
  Type target_type;
};

// Transforms and, if check is set, typechecks the result under the stage profile.
Compiled compile(const Program& p, StageSpec spec, bool check = true);

struct RunOptions {
  bool check_invariants = true;
};

// Result of one forward pass: the primal output plus a vector-Jacobian
// product that can be applied to any number of output cotangents.
class Pullback {
 public:
  explicit Pullback(const RunOptions& opts);
  virtual ~Pullback() = default;
  Pullback(const Pullback&) = delete;
  Pullback& operator=(const Pullback&) = delete;

  const Value& primal() const { return y_; }
  Value operator()(const Value& dy);

  // Counters of the forward pass plus the most recent reverse pass.
  CounterReport report() const;
  Counters& counters() { return counters_; }

 protected:
  virtual Value pull(const Value& dy) = 0;
  // Invocation counts of the input scalars' backpropagators.
  virtual std::vector<std::uint64_t> input_invocations() const = 0;

  std::uint64_t epoch() const { return epoch_; }
  const std::uint64_t* epoch_ptr() const { return &epoch_; }
  void start_forward();
  void end_forward();

  Counters counters_;
  Interpreter interp_;
  RunOptions opts_;
  Value x_;
  Value y_;
  bool naive_ = false;
  std::uint64_t ids_consumed_ = 0;

 private:
  std::uint64_t epoch_ = 0;
  std::chrono::steady_clock::time_point t0_;
  std::uint64_t forward_nanos_ = 0;
  std::uint64_t reverse_nanos_ = 0;
};

std::unique_ptr<Pullback> differentiate(const Compiled& c, const Value& x, const RunOptions& opts = {});

struct GradResult {
  Value y;
  Value dx;
  CounterReport counters;
};

GradResult wrap(const Compiled& c, const Value& x, const Value& dy, const RunOptions& opts = {});
GradResult wrap(const Program& p, StageSpec spec, const Value& x, const Value& dy, const RunOptions& opts = {});

}  // namespace dualgrad
