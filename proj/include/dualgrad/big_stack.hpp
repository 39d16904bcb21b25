// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace dualgrad {

// Deep programs (long let chains) recurse deeply in the checker, the
// transformations and the interpreter. Runs fn on a thread with a large
// stack and rethrows its exception, if any.
void run_on_big_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t{1} << 30);

}  // namespace dualgrad
