// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dualgrad {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
  SyntaxError(int line, int column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct TypeError : Error {
  using Error::Error;
};

// Runtime failure of an object program (branch mismatch, bad operand shape).
struct EvalError : Error {
  using Error::Error;
};

// Bad input from the caller: malformed JSON, unsupported type, missing file.
struct UsageError : Error {
  using Error::Error;
};

// Broken internal contract. The CLI maps this to exit code 2.
struct InvariantViolation : Error {
  using Error::Error;
};

}  // namespace dualgrad
