// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/term.hpp"

#include <bit>
#include <unordered_map>
#include <unordered_set>

#include "dualgrad/error.hpp"

namespace dualgrad {

std::string_view prim_name(Prim p) {
  switch (p) {
    case Prim::ZeroStaged: return "ZeroStaged";
    case Prim::PlusStaged: return "PlusStaged";
    case Prim::StagedCall: return "StagedCall";
    case Prim::InitStaged: return "InitStaged";
    case Prim::SId: return "SId";
    case Prim::SCompose: return "SCompose";
    case Prim::MkContrib: return "MkContrib";
    case Prim::TapeRecord: return "TapeRecord";
  }
  return "?";
}

bool is_linear_kind(TermKind k) {
  switch (k) {
    case TermKind::LinVar:
    case TermKind::LinUnit:
    case TermKind::LinPair:
    case TermKind::LinFst:
    case TermKind::LinSnd:
    case TermKind::LinApp:
    case TermKind::PartialOp:
    case TermKind::LinAdd:
    case TermKind::LinZero:
      return true;
    default:
      return false;
  }
}

namespace {

class FreeVars {
 public:
  void bind(Symbol s) { ++bound_[s.id()]; }
  void unbind(Symbol s) {
    auto it = bound_.find(s.id());
    if (--it->second == 0) bound_.erase(it);
  }
  void use(Symbol s) {
    if (s.empty() || bound_.count(s.id())) return;
    if (seen_.insert(s.id()).second) out_.push_back(s);
  }

  void walk(const Term& t) {
    switch (t.kind) {
      case TermKind::Var:
      case TermKind::LinVar:
        use(t.name);
        return;
      case TermKind::Lam:
      case TermKind::LinLam:
        for (Symbol s : t.free) use(s);
        return;
      case TermKind::LetRec:
        for (Symbol s : t.free) use(s);
        bind(t.name);
        walk(*t.kids[1]);
        unbind(t.name);
        return;
      case TermKind::Let:
        walk(*t.kids[0]);
        bind(t.name);
        walk(*t.kids[1]);
        unbind(t.name);
        return;
      case TermKind::Case:
        walk(*t.kids[0]);
        bind(t.name);
        walk(*t.kids[1]);
        unbind(t.name);
        bind(t.name2);
        walk(*t.kids[2]);
        unbind(t.name2);
        return;
      default:
        for (const auto& k : t.kids) walk(*k);
        return;
    }
  }

  std::vector<Symbol> take() { return std::move(out_); }

 private:
  std::unordered_map<std::uint32_t, int> bound_;
  std::unordered_set<std::uint32_t> seen_;
  std::vector<Symbol> out_;
};

std::vector<Symbol> captures(const Term& body, std::initializer_list<Symbol> binders) {
  FreeVars fv;
  for (Symbol s : binders) fv.bind(s);
  fv.walk(body);
  return fv.take();
}

std::shared_ptr<Term> node(TermKind k, std::vector<TermPtr> kids = {}) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->kids = std::move(kids);
  for (const auto& c : t->kids)
    if (!c) throw InvariantViolation("term builder received a null child");
  return t;
}

}  // namespace

namespace mk {

TermPtr var(Symbol x, Type t) {
  auto n = node(TermKind::Var);
  n->name = x;
  n->type = std::move(t);
  return n;
}

TermPtr unit() { return node(TermKind::Unit); }
TermPtr pair(TermPtr a, TermPtr b) { return node(TermKind::Pair, {std::move(a), std::move(b)}); }
TermPtr fst(TermPtr t) { return node(TermKind::Fst, {std::move(t)}); }
TermPtr snd(TermPtr t) { return node(TermKind::Snd, {std::move(t)}); }
TermPtr app(TermPtr f, TermPtr a) { return node(TermKind::App, {std::move(f), std::move(a)}); }

TermPtr lam(Symbol x, Type t, TermPtr body) {
  auto n = node(TermKind::Lam, {std::move(body)});
  n->name = x;
  n->type = std::move(t);
  n->free = captures(*n->kids[0], {x});
  return n;
}

TermPtr let(Symbol x, Type t, TermPtr rhs, TermPtr body) {
  auto n = node(TermKind::Let, {std::move(rhs), std::move(body)});
  n->name = x;
  n->type = std::move(t);
  return n;
}

TermPtr letrec(Symbol f, Type ft, Symbol x, Type xt, TermPtr body, TermPtr cont) {
  auto n = node(TermKind::LetRec, {std::move(body), std::move(cont)});
  n->name = f;
  n->type = std::move(ft);
  n->name2 = x;
  n->type2 = std::move(xt);
  n->free = captures(*n->kids[0], {f, x});
  return n;
}

TermPtr real(double r) {
  auto n = node(TermKind::Real);
  n->real = r;
  return n;
}

TermPtr integer(std::int64_t v) {
  auto n = node(TermKind::Int);
  n->integer = v;
  return n;
}

TermPtr op(Op o, std::vector<TermPtr> args) {
  auto n = node(op_is_discrete(o) ? TermKind::DiscreteOp : TermKind::PrimOp, std::move(args));
  n->op = o;
  return n;
}

TermPtr ifzero(TermPtr c, TermPtr t, TermPtr e) {
  return node(TermKind::IfZero, {std::move(c), std::move(t), std::move(e)});
}

TermPtr inl(TermPtr t, Type sum) {
  auto n = node(TermKind::Inl, {std::move(t)});
  n->type = std::move(sum);
  return n;
}

TermPtr inr(TermPtr t, Type sum) {
  auto n = node(TermKind::Inr, {std::move(t)});
  n->type = std::move(sum);
  return n;
}

TermPtr case_of(TermPtr s, Symbol x, TermPtr l, Symbol y, TermPtr r) {
  auto n = node(TermKind::Case, {std::move(s), std::move(l), std::move(r)});
  n->name = x;
  n->name2 = y;
  return n;
}

TermPtr linlam(Symbol z, Type t, TermPtr body) {
  auto n = node(TermKind::LinLam, {std::move(body)});
  n->name = z;
  n->type = std::move(t);
  n->free = captures(*n->kids[0], {z});
  return n;
}

TermPtr linvar(Symbol z) {
  auto n = node(TermKind::LinVar);
  n->name = z;
  return n;
}

TermPtr linunit() { return node(TermKind::LinUnit); }
TermPtr linpair(TermPtr a, TermPtr b) { return node(TermKind::LinPair, {std::move(a), std::move(b)}); }
TermPtr linfst(TermPtr b) { return node(TermKind::LinFst, {std::move(b)}); }
TermPtr linsnd(TermPtr b) { return node(TermKind::LinSnd, {std::move(b)}); }
TermPtr linapp(TermPtr fvar, TermPtr b) { return node(TermKind::LinApp, {std::move(fvar), std::move(b)}); }

TermPtr partial(Op o, int i, std::vector<TermPtr> xvars, TermPtr b) {
  xvars.push_back(std::move(b));
  auto n = node(TermKind::PartialOp, std::move(xvars));
  n->op = o;
  n->integer = i;
  return n;
}

TermPtr linadd(TermPtr a, TermPtr b) { return node(TermKind::LinAdd, {std::move(a), std::move(b)}); }

TermPtr linzero(Type t) {
  auto n = node(TermKind::LinZero);
  n->type = std::move(t);
  return n;
}

TermPtr builtin(Prim p, std::vector<TermPtr> args) {
  auto n = node(TermKind::Builtin, std::move(args));
  n->prim = p;
  return n;
}

TermPtr coeff(Op o, int i, std::vector<TermPtr> xvars) {
  auto n = node(TermKind::PartialCoeff, std::move(xvars));
  n->op = o;
  n->integer = i;
  return n;
}

}  // namespace mk

bool equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind || a.name != b.name || a.name2 != b.name2) return false;
  if (a.type != b.type || a.type2 != b.type2) return false;
  if (a.integer != b.integer || a.op != b.op || a.prim != b.prim) return false;
  if (a.kind == TermKind::Real && std::bit_cast<std::uint64_t>(a.real) != std::bit_cast<std::uint64_t>(b.real))
    return false;
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& k : t.kids) n += term_size(*k);
  return n;
}

}  // namespace dualgrad
