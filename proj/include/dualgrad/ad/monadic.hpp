// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dualgrad/typecheck.hpp"

namespace dualgrad {

// The id-threading transformation shared by the staged, updater and array
// stages. Each subterm of type t becomes a function Int -> (D[t], Int); the
// flavour decides the backpropagator type and the emitted builtins.
enum class Flavour {
  Staged,   // zero: ZeroStaged, plus: PlusStaged
  Cayley,   // zero: SId, plus: SCompose over Staged updaters
  Array,    // zero: SId, plus: SCompose over array-state updaters
  Contrib,  // backpropagators are contribution lists
  Tape,     // contribution lists recorded on a tape during the forward pass
};

// Backpropagator type stored next to each id.
Type backprop_type(Flavour f, const Type& c);
// D[t] for the flavour.
Type monadic_type(Flavour f, const Type& t, const Type& c);

TermPtr transform_monadic(Flavour f, const TermPtr& t, const TypeMap& types, const Type& c);
// \(x : D[s]). D[t], of type D[s] -> Int -> (D[t], Int).
TermPtr transform_monadic(Flavour f, const Program& p);

}  // namespace dualgrad
