// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace dualgrad {

struct Counters {
  std::uint64_t forwardPrimops = 0;
  std::uint64_t backpropsCreated = 0;
  std::uint64_t resolveSteps = 0;
  std::uint64_t scalarAdditions = 0;
  std::uint64_t deinterleaveAdditions = 0;
  std::uint64_t mapOrArrayOps = 0;
  std::uint64_t zeroAllocationsOfTypeC = 0;
  std::uint64_t backpropOps = 0;
  std::uint64_t contribNodes = 0;
  std::uint64_t nonFiniteResults = 0;

  // Invocation count per linear function, by creation serial.
  std::vector<std::uint32_t> invocations;
  // Serials that carry a backpropagator id.
  std::vector<bool> tagged;
  // Invocation count per id for array entries interpreted directly.
  std::vector<std::uint32_t> idInvocations;

  std::uint64_t next_serial = 0;

  std::uint64_t new_serial(bool is_tagged) {
    invocations.push_back(0);
    tagged.push_back(is_tagged);
    return next_serial++;
  }
  void invoked(std::uint64_t serial) { ++invocations[serial]; }
  void invoked_id(std::int64_t id) {
    if (id >= static_cast<std::int64_t>(idInvocations.size())) idInvocations.resize(id + 1, 0);
    ++idInvocations[id];
  }
};

struct CounterReport {
  std::uint64_t forwardPrimops = 0;
  std::uint64_t backpropsCreated = 0;
  std::uint64_t invocationsPerIdMax = 0;
  std::uint64_t resolveSteps = 0;
  std::uint64_t scalarAdditions = 0;
  std::uint64_t mapOrArrayOps = 0;
  std::uint64_t zeroAllocationsOfTypeC = 0;
  std::uint64_t wallTimeNanos = 0;

  std::uint64_t deinterleaveAdditions = 0;
  std::uint64_t backpropOps = 0;
  std::uint64_t contribNodes = 0;
  std::uint64_t idsConsumed = 0;
  std::uint64_t inputScalars = 0;
  std::uint64_t nonFiniteResults = 0;
  std::vector<std::uint64_t> inputBackpropInvocations;

  std::uint64_t forwardWork() const { return forwardPrimops + inputScalars; }
  std::uint64_t reverseWork() const { return backpropOps + resolveSteps; }
};

}  // namespace dualgrad
