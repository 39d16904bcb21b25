// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gtest/gtest.h>

#include <vector>

#include "dualgrad/ad.hpp"
#include "dualgrad/oracle.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad::test {

inline Value R(double x) { return make_real(x); }
inline Value I(std::int64_t n) { return make_int(n); }
inline Value P(Value a, Value b) { return make_pair(std::move(a), std::move(b)); }

inline ::testing::AssertionResult near_rel(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size())
    return ::testing::AssertionFailure() << "sizes differ: " << a.size() << " vs " << b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(rel_err(a[i], b[i]) <= tol))
      return ::testing::AssertionFailure() << "entry " << i << ": " << a[i] << " vs " << b[i] << " (tol " << tol << ")";
  return ::testing::AssertionSuccess();
}

inline std::vector<double> grad_leaves(const Program& p, StageSpec s, const Value& x, const Value& dy) {
  GradResult r = wrap(p, s, x, dy);
  return real_leaves_at(x, r.dx);
}

}  // namespace dualgrad::test
