// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/printer.hpp"

#include <charconv>
#include <cmath>

namespace dualgrad {

std::string format_real(double r) {
  if (std::isnan(r)) return "nan";
  if (std::isinf(r)) return r > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, r);
  std::string s(buf, res.ptr);
  if (s.find('.') != std::string::npos) return s;
  auto e = s.find('e');
  if (e == std::string::npos) return s + ".0";
  return s.substr(0, e) + ".0" + s.substr(e);
}

namespace {

// Precedence: 0 binding forms, 1 application, 2 atom.
class Printer {
 public:
  std::string out;

  void print(const Term& t, int prec) {
    switch (t.kind) {
      case TermKind::Var:
      case TermKind::LinVar:
        out += t.name.str();
        return;
      case TermKind::Unit:
      case TermKind::LinUnit:
        out += "()";
        return;
      case TermKind::Real:
        out += format_real(t.real);
        return;
      case TermKind::Int:
        out += std::to_string(t.integer);
        return;
      case TermKind::Pair:
      case TermKind::LinPair:
        out += "(";
        print(*t.kids[0], 0);
        out += ", ";
        print(*t.kids[1], 0);
        out += ")";
        return;
      case TermKind::Fst:
      case TermKind::Snd:
      case TermKind::LinFst:
      case TermKind::LinSnd:
        out += (t.kind == TermKind::Fst || t.kind == TermKind::LinFst) ? "fst " : "snd ";
        print(*t.kids[0], 2);
        return;
      case TermKind::PrimOp:
      case TermKind::DiscreteOp:
        out += op_name(t.op);
        args(t.kids, t.kids.size());
        return;
      case TermKind::Inl:
      case TermKind::Inr:
        out += t.kind == TermKind::Inl ? "inl(" : "inr(";
        print(*t.kids[0], 0);
        out += ") : " + to_string(t.type);
        return;
      case TermKind::Builtin:
        out += prim_name(t.prim);
        args(t.kids, t.kids.size());
        return;
      case TermKind::PartialCoeff:
        out += "d" + std::to_string(t.integer) + std::string(op_name(t.op));
        args(t.kids, t.kids.size());
        out += "(1.0)";
        return;
      case TermKind::PartialOp:
        out += "d" + std::to_string(t.integer) + std::string(op_name(t.op));
        args(t.kids, t.kids.size() - 1);
        out += "(";
        print(*t.kids.back(), 0);
        out += ")";
        return;
      case TermKind::LinZero:
        out += "zero";
        return;
      default:
        break;
    }

    if (t.kind == TermKind::App || t.kind == TermKind::LinApp || t.kind == TermKind::LinAdd) {
      bool paren = prec > 1;
      if (paren) out += "(";
      if (t.kind == TermKind::LinAdd) {
        print(*t.kids[0], 1);
        out += " + ";
        print(*t.kids[1], 2);
      } else {
        print(*t.kids[0], 1);
        out += " ";
        print(*t.kids[1], 2);
      }
      if (paren) out += ")";
      return;
    }

    bool paren = prec > 0;
    if (paren) out += "(";
    switch (t.kind) {
      case TermKind::Lam:
        out += "\\(" + t.name.str() + " : " + to_string(t.type) + "). ";
        print(*t.kids[0], 0);
        break;
      case TermKind::LinLam:
        out += "linear \\(" + t.name.str() + " : " + to_string(t.type) + "). ";
        print(*t.kids[0], 0);
        break;
      case TermKind::Let:
        out += "let " + t.name.str() + " : " + to_string(t.type) + " = ";
        print(*t.kids[0], 0);
        out += " in ";
        print(*t.kids[1], 0);
        break;
      case TermKind::LetRec:
        out += "letrec " + t.name.str() + " : " + to_string(t.type) + " = \\(" + t.name2.str() + " : " +
               to_string(t.type2) + "). ";
        print(*t.kids[0], 0);
        out += " in ";
        print(*t.kids[1], 0);
        break;
      case TermKind::IfZero:
        out += "ifzero ";
        print(*t.kids[0], 0);
        out += " then ";
        print(*t.kids[1], 0);
        out += " else ";
        print(*t.kids[2], 0);
        break;
      case TermKind::Case:
        out += "case ";
        print(*t.kids[0], 0);
        out += " of { inl(" + t.name.str() + ") -> ";
        print(*t.kids[1], 0);
        out += "; inr(" + t.name2.str() + ") -> ";
        print(*t.kids[2], 0);
        out += " }";
        break;
      default:
        out += "<?>";
        break;
    }
    if (paren) out += ")";
  }

 private:
  void args(const std::vector<TermPtr>& kids, std::size_t n) {
    out += "(";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += ", ";
      print(*kids[i], 0);
    }
    out += ")";
  }
};

}  // namespace

std::string print_term(const Term& t) {
  Printer p;
  p.print(t, 0);
  return std::move(p.out);
}

std::string print_term(const TermPtr& t) { return print_term(*t); }

}  // namespace dualgrad
