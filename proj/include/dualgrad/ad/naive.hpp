// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dualgrad/ad.hpp"

namespace dualgrad {

// Dual type with backpropagators into c: R becomes (R, R -o c).
Type naive_type(const Type& t, const Type& c);

// Transforms a subterm whose subterm types are recorded in types.
TermPtr transform_naive(const TermPtr& t, const TypeMap& types, const Type& c);
// Transforms a program \(x : s). t with c the cotangent type of s.
TermPtr transform_naive(const Program& p);

GradResult wrap_naive(const Program& p, const Value& x, const Value& dy, const RunOptions& opts = {});

}  // namespace dualgrad
