// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "dualgrad/primops.hpp"
#include "dualgrad/symbol.hpp"
#include "dualgrad/types.hpp"

namespace dualgrad {

enum class TermKind {
  // source language
  Var, Unit, Pair, Fst, Snd, App, Lam, Let, LetRec,
  Real, Int, PrimOp, DiscreteOp, IfZero, Inl, Inr, Case,
  // target language
  LinLam,
  LinVar, LinUnit, LinPair, LinFst, LinSnd, LinApp, PartialOp, LinAdd, LinZero,
  Builtin,
  PartialCoeff,  // d op / d x_i at the given variables, as an ordinary R-valued term
};

// Stage runtime primitives.
enum class Prim {
  ZeroStaged, PlusStaged, StagedCall, InitStaged,
  SId, SCompose,
  MkContrib, TapeRecord,
};

std::string_view prim_name(Prim p);
bool is_linear_kind(TermKind k);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// One node type for source and target terms. Child layout by kind:
//   Pair [a, b]    Fst/Snd [t]    App [f, a]    Lam [body]    Let [rhs, body]
//   LetRec [lambda body, continuation]   PrimOp/DiscreteOp [args...]
//   IfZero [cond, then, else]   Inl/Inr [t]   Case [scrutinee, left, right]
//   LinLam [body]   LinPair [a, b]   LinFst/LinSnd [b]   LinApp [fvar, b]
//   PartialOp [xvars..., b]   LinAdd [a, b]   Builtin [args...]   PartialCoeff [xvars...]
struct Term {
  TermKind kind;
  Symbol name;   // variable, binder, letrec function, linear variable, case left binder
  Symbol name2;  // letrec argument, case right binder
  Type type;     // binder annotation, variable type, sum annotation, zero type, letrec function type
  Type type2;    // letrec argument type
  double real = 0.0;
  std::int64_t integer = 0;  // integer literal, partial index
  Op op = Op::Add;
  Prim prim = Prim::ZeroStaged;
  std::vector<TermPtr> kids;
  // For Lam, LinLam and LetRec: the variables a closure must capture.
  std::vector<Symbol> free;
};

// Builders. They compute the captured-variable lists of binder nodes.
namespace mk {
TermPtr var(Symbol x, Type t = {});
TermPtr unit();
TermPtr pair(TermPtr a, TermPtr b);
TermPtr fst(TermPtr t);
TermPtr snd(TermPtr t);
TermPtr app(TermPtr f, TermPtr a);
TermPtr lam(Symbol x, Type t, TermPtr body);
TermPtr let(Symbol x, Type t, TermPtr rhs, TermPtr body);
TermPtr letrec(Symbol f, Type ft, Symbol x, Type xt, TermPtr body, TermPtr cont);
TermPtr real(double r);
TermPtr integer(std::int64_t n);
TermPtr op(Op o, std::vector<TermPtr> args);  // PrimOp or DiscreteOp by table
TermPtr ifzero(TermPtr c, TermPtr t, TermPtr e);
TermPtr inl(TermPtr t, Type sum);
TermPtr inr(TermPtr t, Type sum);
TermPtr case_of(TermPtr s, Symbol x, TermPtr l, Symbol y, TermPtr r);

TermPtr linlam(Symbol z, Type t, TermPtr body);
TermPtr linvar(Symbol z);
TermPtr linunit();
TermPtr linpair(TermPtr a, TermPtr b);
TermPtr linfst(TermPtr b);
TermPtr linsnd(TermPtr b);
TermPtr linapp(TermPtr fvar, TermPtr b);
TermPtr partial(Op o, int i, std::vector<TermPtr> xvars, TermPtr b);
TermPtr linadd(TermPtr a, TermPtr b);
TermPtr linzero(Type t);
TermPtr builtin(Prim p, std::vector<TermPtr> args);
TermPtr coeff(Op o, int i, std::vector<TermPtr> xvars);
}  // namespace mk

// Structural equality, including variable annotations. Ignores capture lists.
bool equal(const Term& a, const Term& b);

// Number of nodes.
std::size_t term_size(const Term& t);

}  // namespace dualgrad
