// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "dualgrad/typecheck.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad {

struct EvalResult {
  Value value;
  std::uint64_t primops = 0;
  std::uint64_t nonFinite = 0;
};

// Applies the closed function term f to arg.
EvalResult eval_source(const TermPtr& f, const Value& arg);
EvalResult eval_source(const Program& p, const Value& arg);

}  // namespace dualgrad
