// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/ad/monadic.hpp"

#include <functional>

#include "dualgrad/error.hpp"

namespace dualgrad {

Type backprop_type(Flavour f, const Type& c) {
  switch (f) {
    case Flavour::Staged: return Type::lin(Type::real(), staged_type(c));
    case Flavour::Cayley: return Type::lin(Type::real(), Type::fun(staged_type(c), staged_type(c)));
    case Flavour::Array: return Type::lin(Type::real(), Type::fun(state_type(), state_type()));
    case Flavour::Contrib:
    case Flavour::Tape: return contrib_type();
  }
  throw InvariantViolation("unknown flavour");
}

Type monadic_type(Flavour f, const Type& t, const Type& c) {
  switch (t.kind()) {
    case TypeKind::Real: return Type::pair(Type::real(), Type::pair(Type::integer(), backprop_type(f, c)));
    case TypeKind::Int:
    case TypeKind::Unit: return t;
    case TypeKind::Pair: return Type::pair(monadic_type(f, t.left(), c), monadic_type(f, t.right(), c));
    case TypeKind::Sum: return Type::sum(monadic_type(f, t.left(), c), monadic_type(f, t.right(), c));
    case TypeKind::Fun:
      return Type::fun(monadic_type(f, t.left(), c),
                       Type::fun(Type::integer(), Type::pair(monadic_type(f, t.right(), c), Type::integer())));
    default: throw InvariantViolation("no dual type for " + to_string(t));
  }
}

namespace {

struct Monadic {
  Flavour f;
  const TypeMap& types;
  Type c;
  Symbol z{"z$"};
  Symbol i{"i$"};
  int fresh = 0;

  Type D(const Type& t) const { return monadic_type(f, t, c); }

  Type type_of(const TermPtr& t) const {
    auto it = types.find(t.get());
    if (it == types.end()) throw InvariantViolation("subterm without a recorded type");
    return it->second;
  }

  TermPtr next(Symbol cnt) const { return mk::op(Op::IAdd, {mk::var(cnt, Type::integer()), mk::integer(1)}); }

  // let p = [e](cnt) in let v = fst p in let j = snd p in k(v, j)
  TermPtr bind(const TermPtr& e, Symbol cnt, Symbol v, const std::function<TermPtr(Symbol)>& k) {
    Type dt = D(type_of(e));
    int n = fresh++;
    Symbol p("p$" + std::to_string(n));
    Symbol j("j$" + std::to_string(n));
    TermPtr pv = mk::var(p, Type::pair(dt, Type::integer()));
    return mk::let(p, Type::pair(dt, Type::integer()), emit(e, cnt),
                   mk::let(v, dt, mk::fst(pv), mk::let(j, Type::integer(), mk::snd(pv), k(j))));
  }

  Symbol value_name() { return Symbol("v$" + std::to_string(fresh++)); }

  TermPtr ret(TermPtr v, Symbol cnt) const { return mk::pair(std::move(v), mk::var(cnt, Type::integer())); }

  TermPtr zero_bp(Symbol cnt) const {
    switch (f) {
      case Flavour::Staged: return mk::linlam(z, Type::real(), mk::builtin(Prim::ZeroStaged, {}));
      case Flavour::Cayley:
      case Flavour::Array: return mk::linlam(z, Type::real(), mk::builtin(Prim::SId, {}));
      case Flavour::Contrib: return mk::builtin(Prim::MkContrib, {});
      case Flavour::Tape: return mk::builtin(Prim::TapeRecord, {mk::var(cnt, Type::integer())});
    }
    throw InvariantViolation("unknown flavour");
  }

  // ((r, (cnt, bp)), cnt + 1)
  TermPtr fresh_scalar(TermPtr r, Symbol cnt, TermPtr bp) const {
    return mk::pair(mk::pair(std::move(r), mk::pair(mk::var(cnt, Type::integer()), std::move(bp))), next(cnt));
  }

  TermPtr primop_bp(const Term& t, const std::vector<TermPtr>& xs, const std::vector<TermPtr>& ds, Symbol cnt) {
    std::size_t n = xs.size();
    if (n == 0) return zero_bp(cnt);
    if (f == Flavour::Contrib || f == Flavour::Tape) {
      std::vector<TermPtr> args;
      if (f == Flavour::Tape) args.push_back(mk::var(cnt, Type::integer()));
      for (std::size_t k = 0; k < n; ++k) {
        args.push_back(ds[k]);
        args.push_back(mk::coeff(t.op, static_cast<int>(k + 1), xs));
      }
      return mk::builtin(f == Flavour::Tape ? Prim::TapeRecord : Prim::MkContrib, std::move(args));
    }
    Prim plus = f == Flavour::Staged ? Prim::PlusStaged : Prim::SCompose;
    TermPtr body;
    for (std::size_t k = 0; k < n; ++k) {
      TermPtr call =
          mk::builtin(Prim::StagedCall, {ds[k], mk::partial(t.op, static_cast<int>(k + 1), xs, mk::linvar(z))});
      body = body ? mk::builtin(plus, {body, call}) : call;
    }
    return mk::linlam(z, Type::real(), body);
  }

  TermPtr primop(const Term& t, Symbol cnt) {
    std::size_t n = t.kids.size();
    std::vector<TermPtr> xs, ds;
    Type dr = D(Type::real());
    Type slot = Type::pair(Type::integer(), backprop_type(f, c));
    for (std::size_t k = 1; k <= n; ++k) {
      xs.push_back(mk::var(Symbol("x$" + std::to_string(k)), Type::real()));
      ds.push_back(mk::var(Symbol("d$" + std::to_string(k)), slot));
    }
    std::function<TermPtr(std::size_t, Symbol)> arg = [&](std::size_t k, Symbol j) -> TermPtr {
      if (k == n) {
        TermPtr r = fresh_scalar(mk::op(t.op, xs), j, primop_bp(t, xs, ds, j));
        for (std::size_t m = n; m >= 1; --m) {
          std::string s = std::to_string(m);
          TermPtr qv = mk::var(Symbol("q$" + s), dr);
          r = mk::let(Symbol("x$" + s), Type::real(), mk::fst(qv),
                      mk::let(Symbol("d$" + s), slot, mk::snd(qv), r));
        }
        return r;
      }
      Symbol q("q$" + std::to_string(k + 1));
      return bind(t.kids[k], j, q, [&, k](Symbol j2) { return arg(k + 1, j2); });
    };
    return arg(0, cnt);
  }

  TermPtr emit(const TermPtr& tp, Symbol cnt) {
    const Term& t = *tp;
    switch (t.kind) {
      case TermKind::Var: return ret(mk::var(t.name, D(type_of(tp))), cnt);
      case TermKind::Unit: return ret(mk::unit(), cnt);
      case TermKind::Int: return ret(mk::integer(t.integer), cnt);
      case TermKind::Real: return fresh_scalar(mk::real(t.real), cnt, zero_bp(cnt));
      case TermKind::Pair: {
        Symbol a = value_name(), b = value_name();
        return bind(t.kids[0], cnt, a, [&](Symbol j1) {
          return bind(t.kids[1], j1, b, [&](Symbol j2) {
            return ret(mk::pair(mk::var(a, D(type_of(t.kids[0]))), mk::var(b, D(type_of(t.kids[1])))), j2);
          });
        });
      }
      case TermKind::Fst:
      case TermKind::Snd: {
        Symbol a = value_name();
        return bind(t.kids[0], cnt, a, [&](Symbol j) {
          TermPtr v = mk::var(a, D(type_of(t.kids[0])));
          return ret(t.kind == TermKind::Fst ? mk::fst(v) : mk::snd(v), j);
        });
      }
      case TermKind::App: {
        Symbol g = value_name(), a = value_name();
        return bind(t.kids[0], cnt, g, [&](Symbol j1) {
          return bind(t.kids[1], j1, a, [&](Symbol j2) {
            TermPtr call = mk::app(mk::var(g, D(type_of(t.kids[0]))), mk::var(a, D(type_of(t.kids[1]))));
            return mk::app(call, mk::var(j2, Type::integer()));
          });
        });
      }
      case TermKind::Lam:
        return ret(mk::lam(t.name, D(t.type), mk::lam(i, Type::integer(), emit(t.kids[0], i))), cnt);
      case TermKind::Let:
        return bind(t.kids[0], cnt, t.name, [&](Symbol j) { return emit(t.kids[1], j); });
      case TermKind::LetRec:
        return mk::letrec(t.name, D(t.type), t.name2, D(t.type2),
                          mk::lam(i, Type::integer(), emit(t.kids[0], i)), emit(t.kids[1], cnt));
      case TermKind::PrimOp: return primop(t, cnt);
      case TermKind::DiscreteOp: {
        std::vector<Symbol> vs;
        for (std::size_t k = 0; k < t.kids.size(); ++k) vs.push_back(value_name());
        std::function<TermPtr(std::size_t, Symbol)> arg = [&](std::size_t k, Symbol j) -> TermPtr {
          if (k == t.kids.size()) {
            std::vector<TermPtr> args;
            for (Symbol v : vs) args.push_back(mk::var(v, Type::integer()));
            return ret(mk::op(t.op, std::move(args)), j);
          }
          return bind(t.kids[k], j, vs[k], [&, k](Symbol j2) { return arg(k + 1, j2); });
        };
        return arg(0, cnt);
      }
      case TermKind::IfZero: {
        Symbol v = value_name();
        return bind(t.kids[0], cnt, v, [&](Symbol j) {
          return mk::ifzero(mk::var(v, Type::integer()), emit(t.kids[1], j), emit(t.kids[2], j));
        });
      }
      case TermKind::Inl:
      case TermKind::Inr: {
        Symbol v = value_name();
        return bind(t.kids[0], cnt, v, [&](Symbol j) {
          TermPtr x = mk::var(v, D(type_of(t.kids[0])));
          return ret(t.kind == TermKind::Inl ? mk::inl(x, D(t.type)) : mk::inr(x, D(t.type)), j);
        });
      }
      case TermKind::Case: {
        Symbol v = value_name();
        return bind(t.kids[0], cnt, v, [&](Symbol j) {
          return mk::case_of(mk::var(v, D(type_of(t.kids[0]))), t.name, emit(t.kids[1], j), t.name2,
                             emit(t.kids[2], j));
        });
      }
      default: throw InvariantViolation("differentiation of a non-source term");
    }
  }
};

}  // namespace

TermPtr transform_monadic(Flavour f, const TermPtr& t, const TypeMap& types, const Type& c) {
  Monadic m{f, types, c};
  Symbol i("i$");
  return mk::lam(i, Type::integer(), m.emit(t, i));
}

TermPtr transform_monadic(Flavour f, const Program& p) {
  Type c = f == Flavour::Staged || f == Flavour::Cayley ? cotangent_type(p.domain) : Type();
  Monadic m{f, p.types, c};
  Symbol i("i$");
  return mk::lam(p.term->name, monadic_type(f, p.domain, c),
                 mk::lam(i, Type::integer(), m.emit(p.term->kids[0], i)));
}

}  // namespace dualgrad
