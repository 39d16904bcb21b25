// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

namespace dualgrad {

// Lin is the monoid-linear arrow of the target language; Opaque names
// stage runtime types (Staged[c], State, Contrib).
enum class TypeKind { Real, Unit, Int, Pair, Fun, Sum, Lin, Opaque };

struct TypeNode;

class Type {
 public:
  Type() = default;

  static Type real();
  static Type unit();
  static Type integer();
  static Type pair(Type a, Type b);
  static Type fun(Type a, Type b);
  static Type sum(Type a, Type b);
  static Type lin(Type a, Type b);
  static Type opaque(std::string name, Type param = {});

  explicit operator bool() const { return node_ != nullptr; }
  TypeKind kind() const;
  const Type& left() const;
  const Type& right() const;
  const std::string& name() const;
  bool is(TypeKind k) const { return node_ && kind() == k; }

  // No function arrow anywhere in the tree. Opaque runtime types count as data.
  bool is_plain_data() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  explicit Type(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TypeNode> node_;
};

struct TypeNode {
  TypeKind kind;
  Type a;
  Type b;
  std::string name;
};

std::string to_string(const Type& t);

// Structural cotangent type: Int positions become unit.
Type cotangent_type(const Type& t);

}  // namespace dualgrad
