// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "dualgrad/typecheck.hpp"
#include "dualgrad/value.hpp"

namespace dualgrad::bench {

// \(x0:R). let x1:R = add(x0,x0) in ... in xn
Program gen_chain(int n);
// Dot product of two n-vectors given as right-nested pairs.
Program gen_dot(int n);
// Sum of the entries of M v for a k x k matrix of row vectors.
Program gen_matvec(int k);
// Rotates a 3-vector by a quaternion (s, u): 7 inputs, 3 outputs.
Program prog_rotate_vec_by_quat();

// Type of an n-vector: R, (R, R), (R, (R, R)), ...
Type vec_type(int n);
// Right-nested pair value of xs.
Value vec_value(const std::vector<double>& xs);

struct CorpusEntry {
  std::string name;
  std::string source;
  Program program;
  Value input;
};

std::vector<CorpusEntry> corpus();
const CorpusEntry& corpus_entry(const std::string& name);

// Reals 1.0, ints 1, unit, left injections.
Value default_input(const Type& t);

// Source text of a generated program.
std::string source_of(const Program& p);

}  // namespace dualgrad::bench
