// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/types.hpp"

#include "dualgrad/error.hpp"

namespace dualgrad {
namespace {

const Type& null_type() {
  static const Type t;
  return t;
}

const std::string& empty_name() {
  static const std::string s;
  return s;
}

}  // namespace

Type Type::real() {
  static const Type t(std::make_shared<const TypeNode>(TypeNode{TypeKind::Real, {}, {}, {}}));
  return t;
}

Type Type::unit() {
  static const Type t(std::make_shared<const TypeNode>(TypeNode{TypeKind::Unit, {}, {}, {}}));
  return t;
}

Type Type::integer() {
  static const Type t(std::make_shared<const TypeNode>(TypeNode{TypeKind::Int, {}, {}, {}}));
  return t;
}

Type Type::pair(Type a, Type b) {
  return Type(std::make_shared<const TypeNode>(TypeNode{TypeKind::Pair, std::move(a), std::move(b), {}}));
}

Type Type::fun(Type a, Type b) {
  return Type(std::make_shared<const TypeNode>(TypeNode{TypeKind::Fun, std::move(a), std::move(b), {}}));
}

Type Type::sum(Type a, Type b) {
  return Type(std::make_shared<const TypeNode>(TypeNode{TypeKind::Sum, std::move(a), std::move(b), {}}));
}

Type Type::lin(Type a, Type b) {
  return Type(std::make_shared<const TypeNode>(TypeNode{TypeKind::Lin, std::move(a), std::move(b), {}}));
}

Type Type::opaque(std::string name, Type param) {
  return Type(std::make_shared<const TypeNode>(TypeNode{TypeKind::Opaque, std::move(param), {}, std::move(name)}));
}

TypeKind Type::kind() const { return node_->kind; }
const Type& Type::left() const { return node_ ? node_->a : null_type(); }
const Type& Type::right() const { return node_ ? node_->b : null_type(); }
const std::string& Type::name() const { return node_ ? node_->name : empty_name(); }

bool Type::is_plain_data() const {
  if (!node_) return false;
  switch (kind()) {
    case TypeKind::Real:
    case TypeKind::Unit:
    case TypeKind::Int:
    case TypeKind::Opaque:
      return true;
    case TypeKind::Pair:
    case TypeKind::Sum:
      return left().is_plain_data() && right().is_plain_data();
    case TypeKind::Fun:
    case TypeKind::Lin:
      return false;
  }
  return false;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Real:
    case TypeKind::Unit:
    case TypeKind::Int:
      return true;
    case TypeKind::Opaque:
      return a.name() == b.name() && a.left() == b.left();
    default:
      return a.left() == b.left() && a.right() == b.right();
  }
}

namespace {

// prec 0: arrows, 1: sums, 2: atoms
void print(const Type& t, int prec, std::string& out) {
  if (!t) {
    out += "?";
    return;
  }
  switch (t.kind()) {
    case TypeKind::Real: out += "R"; return;
    case TypeKind::Unit: out += "()"; return;
    case TypeKind::Int: out += "Int"; return;
    case TypeKind::Pair:
      out += "(";
      print(t.left(), 0, out);
      out += ", ";
      print(t.right(), 0, out);
      out += ")";
      return;
    case TypeKind::Opaque:
      out += t.name();
      if (t.left()) {
        out += "[";
        print(t.left(), 0, out);
        out += "]";
      }
      return;
    case TypeKind::Sum:
      if (prec > 1) out += "(";
      print(t.left(), 1, out);
      out += " + ";
      print(t.right(), 2, out);
      if (prec > 1) out += ")";
      return;
    case TypeKind::Fun:
    case TypeKind::Lin:
      if (prec > 0) out += "(";
      print(t.left(), 1, out);
      out += t.kind() == TypeKind::Fun ? " -> " : " -o ";
      print(t.right(), 0, out);
      if (prec > 0) out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Type& t) {
  std::string out;
  print(t, 0, out);
  return out;
}

Type cotangent_type(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Real: return t;
    case TypeKind::Unit:
    case TypeKind::Int: return Type::unit();
    case TypeKind::Pair: return Type::pair(cotangent_type(t.left()), cotangent_type(t.right()));
    case TypeKind::Sum: return Type::sum(cotangent_type(t.left()), cotangent_type(t.right()));
    default:
      throw UsageError("no cotangent for type " + to_string(t) + " (function types are not supported here)");
  }
}

}  // namespace dualgrad
