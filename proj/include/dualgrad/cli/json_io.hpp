// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "dualgrad/counters.hpp"
#include "dualgrad/types.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad {

using Json = nlohmann::ordered_json;

// number for R, integer for Int, null for unit, 2-array for pair,
// {"inl": v} / {"inr": v} for sums.
Json to_json(const Value& v);
Value from_json(const Json& j, const Type& t);
Value parse_value(std::string_view text, const Type& t);

Json to_json(const CounterReport& r, bool with_time = true);

}  // namespace dualgrad
