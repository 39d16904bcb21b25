// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dualgrad/counters.hpp"
#include "dualgrad/term.hpp"

namespace dualgrad {

struct ValueNode;
// Values are shared and treated as immutable, except Staged objects that are
// updated in place while uniquely owned.
using Value = std::shared_ptr<ValueNode>;

struct RealV { double v; };
struct IntV { std::int64_t v; };
struct UnitV {};
struct PairV { Value a, b; };
struct InlV { Value v; };
struct InrV { Value v; };
// Zero cotangent of a sum type whose branch is not known yet.
struct ZeroSumV {};

// Closure of Lam, LetRec or LinLam. captured lines up with lam->free.
struct ClosureV {
  TermPtr lam;
  std::vector<Value> captured;
  bool linear = false;
  std::int64_t id = -1;  // backpropagator tag, -1 if untagged
  std::uint64_t serial = 0;
};

// Function implemented by the host: injectors, updaters, runtime helpers.
struct HostFnV {
  std::function<Value(Value)> fn;
  bool linear = false;
  std::int64_t id = -1;
  std::uint64_t serial = 0;
};

struct StagedEntry {
  Value f;
  double acc = 0.0;
};

struct StagedV {
  Value cot;
  std::map<std::int64_t, StagedEntry> calls;
};

struct ContribNode;
struct ContribEdge {
  std::int64_t id;
  std::shared_ptr<const ContribNode> node;
  double coeff;
};
struct ContribNode {
  std::vector<ContribEdge> edges;
  std::uint64_t serial = 0;
};
struct ContribV {
  std::shared_ptr<const ContribNode> node;
};

struct ArrayState;
// Handle to array state. A handle is valid only while its version matches
// the state's; every update consumes the handle and returns a fresh one.
struct StateV {
  std::shared_ptr<ArrayState> arr;
  std::uint64_t version = 0;
};

struct ValueNode {
  std::variant<RealV, IntV, UnitV, PairV, InlV, InrV, ZeroSumV, ClosureV, HostFnV, StagedV, ContribV, StateV>
      data;
};

Value make_real(double r);
Value make_int(std::int64_t n);
Value unit_value();
Value zero_sum_value();
Value make_pair(Value a, Value b);
Value make_inl(Value v);
Value make_inr(Value v);
Value make_host(std::function<Value(Value)> fn, bool linear = false, std::int64_t id = -1,
                std::uint64_t serial = 0);

template <class T>
T* get_if(const Value& v) {
  return v ? std::get_if<T>(&v->data) : nullptr;
}

double as_real(const Value& v);
std::int64_t as_int(const Value& v);
const PairV& as_pair(const Value& v);

std::string show(const Value& v);

// Bitwise structural equality of data values (reals compared by bits).
bool identical(const Value& a, const Value& b);

// Shape check of a data value against a type.
bool matches(const Value& v, const Type& t);

// Cotangent monoid.
Value zero_of(const Type& t);
Value add_cot(const Value& a, const Value& b, Counters* counters);

// Real leaves of a data value, left to right.
std::vector<double> real_leaves(const Value& v);
std::size_t count_reals(const Value& v);
// Real leaves of cot at the positions where primal has reals.
std::vector<double> real_leaves_at(const Value& primal, const Value& cot);
// Same shape as primal, with reals replaced in order; ints kept.
Value with_reals(const Value& primal, std::span<const double> xs);
// Cotangent-shaped value for primal (ints become unit) with the given reals.
Value cotangent_with_reals(const Value& primal, std::span<const double> xs);
// Replace undetermined sum zeros by zeros of the branch primal takes.
Value complete_cotangent(const Value& primal, const Value& cot);

}  // namespace dualgrad
