// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "dualgrad/big_stack.hpp"
#include "dualgrad/cli/cli.hpp"

int main(int argc, char** argv) {
  int code = 0;
  // Deeply nested generated programs recurse deeply in the evaluator.
  dualgrad::run_on_big_stack([&] { code = dualgrad::run_cli(argc, argv, std::cout, std::cerr); });
  return code;
}
