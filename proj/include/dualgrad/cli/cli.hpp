// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>

namespace dualgrad {

// Entry point of the dualgrad tool. Returns 0 on success, 1 on user error
// and 2 on a violated internal invariant.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dualgrad
