// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

#include "dualgrad/term.hpp"

namespace dualgrad {

// Throws SyntaxError with line and column.
TermPtr parse_source(std::string_view text);
Type parse_type(std::string_view text);

}  // namespace dualgrad
