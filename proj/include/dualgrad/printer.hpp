// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "dualgrad/term.hpp"

namespace dualgrad {

// Source terms print in the concrete grammar and parse back to an equal AST.
// Target forms print in a readable but non-parseable notation.
std::string print_term(const Term& t);
std::string print_term(const TermPtr& t);

// Shortest round-trip text for a binary64, always with a decimal point.
std::string format_real(double r);

}  // namespace dualgrad
