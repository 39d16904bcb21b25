// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "dualgrad/term.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad::bench {

// Four backpropagators into (R, (R, R)):
//   f1 z = (0, (z, 0))
//   f2 z = f1 (2z) + f1 (3z)
//   f3 z = f2 (4z) + f1 (5z)
//   f4 z = f2 z + f3 (2z)
struct NetworkRun {
  Value cot;
  std::array<std::uint64_t, 4> invocations{};  // f1..f4
};

// Plain linear closures; evaluates to (f1, (f2, (f3, f4))).
TermPtr network_naive_term();
// Tagged (id, backpropagator) pairs over the staged runtime; same result shape.
TermPtr network_staged_term();

// f4 1.0 by ordinary call-by-value.
NetworkRun run_network_naive();
// {4 -> (f4, 1.0)} resolved by descending id.
NetworkRun run_network_staged();

}  // namespace dualgrad::bench
