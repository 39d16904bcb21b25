// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dualgrad/term.hpp"

namespace dualgrad {

using TypeEnv = std::vector<std::pair<Symbol, Type>>;
// Type of every checked subterm, keyed by node address.
using TypeMap = std::unordered_map<const Term*, Type>;

Type typecheck_source(const TermPtr& t, const TypeEnv& env = {}, TypeMap* types = nullptr);

// Which builtins exist in the target and how they are typed.
enum class Family { None, Staged, Cayley, Array, Contrib, Tape };

struct StageProfile {
  std::string name = "linear";
  Family family = Family::None;
  Type cot;  // the cotangent type c the backpropagators accumulate into
  // Allow function types on the codomain of the linear arrow (updater stages).
  bool relax_linear_codomain = false;

  static StageProfile plain();
  static StageProfile naive(Type c);
  static StageProfile staged(Type c);
  static StageProfile cayley(Type c);
  static StageProfile array();
  static StageProfile contrib();
  static StageProfile tape();
};

Type typecheck_target(const TermPtr& t, const StageProfile& profile, const TypeEnv& env = {});

// Named runtime types.
Type staged_type(const Type& c);
Type state_type();
Type contrib_type();

// A closed source function after checking.
struct Program {
  TermPtr term;  // Lam(x, domain, body)
  Type domain;
  Type codomain;
  TypeMap types;
};

// Typechecks and requires a top-level lambda.
Program make_program(const TermPtr& t);
Program load_program(std::string_view text);

}  // namespace dualgrad
