// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <variant>

#include "dualgrad/error.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/oracle.hpp"

namespace dualgrad {
namespace {

struct FNode;
using FV = std::shared_ptr<const FNode>;

struct Env {
  Symbol name;
  FV value;
  std::shared_ptr<const Env> next;
};
using EnvPtr = std::shared_ptr<const Env>;

struct Dual { double v, d; };
struct FInt { std::int64_t v; };
struct FUnit {};
struct FPair { FV a, b; };
struct FInl { FV v; };
struct FInr { FV v; };
struct FClosure {
  const Term* lam;  // Lam, or LetRec for recursive functions
  EnvPtr env;
};

struct FNode {
  std::variant<Dual, FInt, FUnit, FPair, FInl, FInr, FClosure> data;
};

template <class T>
FV node(T t) {
  auto n = std::make_shared<FNode>();
  n->data = std::move(t);
  return n;
}

template <class T>
const T& as(const FV& v, const char* what) {
  auto* p = std::get_if<T>(&v->data);
  if (!p) throw EvalError(std::string("forward oracle: expected ") + what);
  return *p;
}

EnvPtr bind(Symbol s, FV v, EnvPtr next) { return std::make_shared<const Env>(Env{s, std::move(v), std::move(next)}); }

FV lookup(const EnvPtr& env, Symbol s) {
  for (const Env* e = env.get(); e; e = e->next.get())
    if (e->name == s) return e->value;
  throw EvalError("forward oracle: unbound variable " + s.str());
}

// Derivative rules written out separately from the primitive table.
Dual apply_dual(Op op, const Dual* a) {
  double x = a[0].v, dx = a[0].d;
  switch (op) {
    case Op::Neg: return {-x, -dx};
    case Op::Sin: return {std::sin(x), std::cos(x) * dx};
    case Op::Cos: return {std::cos(x), -std::sin(x) * dx};
    case Op::Exp: {
      double e = std::exp(x);
      return {e, e * dx};
    }
    case Op::Log: return {std::log(x), dx / x};
    case Op::Sqrt: {
      double r = std::sqrt(x);
      return {r, dx / (2.0 * r)};
    }
    case Op::Recip: return {1.0 / x, -dx / (x * x)};
    default: break;
  }
  double y = a[1].v, dy = a[1].d;
  switch (op) {
    case Op::Add: return {x + y, dx + dy};
    case Op::Sub: return {x - y, dx - dy};
    case Op::Mul: return {x * y, dx * y + x * dy};
    case Op::Div: return {x / y, dx / y - x * dy / (y * y)};
    default: throw EvalError("forward oracle: not a real operation");
  }
}

struct Forward {
  FV apply(const FV& f, FV arg) {
    const FClosure& c = as<FClosure>(f, "a function");
    if (c.lam->kind == TermKind::LetRec) {
      EnvPtr env = bind(c.lam->name, f, c.env);
      return eval(c.lam->kids[0], bind(c.lam->name2, std::move(arg), env));
    }
    return eval(c.lam->kids[0], bind(c.lam->name, std::move(arg), c.env));
  }

  FV eval(const TermPtr& tp, const EnvPtr& env) {
    const Term& t = *tp;
    switch (t.kind) {
      case TermKind::Var: return lookup(env, t.name);
      case TermKind::Unit: return node(FUnit{});
      case TermKind::Pair: {
        FV a = eval(t.kids[0], env);
        return node(FPair{a, eval(t.kids[1], env)});
      }
      case TermKind::Fst: return as<FPair>(eval(t.kids[0], env), "a pair").a;
      case TermKind::Snd: return as<FPair>(eval(t.kids[0], env), "a pair").b;
      case TermKind::App: {
        FV f = eval(t.kids[0], env);
        return apply(f, eval(t.kids[1], env));
      }
      case TermKind::Lam: return node(FClosure{&t, env});
      case TermKind::Let: return eval(t.kids[1], bind(t.name, eval(t.kids[0], env), env));
      case TermKind::LetRec: {
        // The closure finds itself through the name bound at each call.
        FV f = node(FClosure{&t, env});
        return eval(t.kids[1], bind(t.name, f, env));
      }
      case TermKind::Real: return node(Dual{t.real, 0.0});
      case TermKind::Int: return node(FInt{t.integer});
      case TermKind::PrimOp: {
        Dual a[kMaxArity] = {{0, 0}, {0, 0}};
        for (std::size_t i = 0; i < t.kids.size(); ++i) a[i] = as<Dual>(eval(t.kids[i], env), "a real");
        return node(apply_dual(t.op, a));
      }
      case TermKind::DiscreteOp: {
        std::int64_t a[kMaxArity] = {0, 0};
        for (std::size_t i = 0; i < t.kids.size(); ++i) a[i] = as<FInt>(eval(t.kids[i], env), "an integer").v;
        return node(FInt{apply_discrete(t.op, std::span<const std::int64_t>(a, t.kids.size()))});
      }
      case TermKind::IfZero:
        return as<FInt>(eval(t.kids[0], env), "an integer").v == 0 ? eval(t.kids[1], env) : eval(t.kids[2], env);
      case TermKind::Inl: return node(FInl{eval(t.kids[0], env)});
      case TermKind::Inr: return node(FInr{eval(t.kids[0], env)});
      case TermKind::Case: {
        FV s = eval(t.kids[0], env);
        if (auto* l = std::get_if<FInl>(&s->data)) return eval(t.kids[1], bind(t.name, l->v, env));
        if (auto* r = std::get_if<FInr>(&s->data)) return eval(t.kids[2], bind(t.name2, r->v, env));
        throw EvalError("forward oracle: case on a non-sum value");
      }
      default: throw EvalError("forward oracle: target term in source program");
    }
  }
};

FV lift(const Value& x, const Value& dir) {
  if (auto* r = get_if<RealV>(x)) {
    auto* d = get_if<RealV>(dir);
    if (!d) throw UsageError("direction does not match the input at a real position");
    return node(Dual{r->v, d->v});
  }
  if (auto* i = get_if<IntV>(x)) return node(FInt{i->v});
  if (get_if<UnitV>(x)) return node(FUnit{});
  if (auto* p = get_if<PairV>(x)) {
    auto* q = get_if<PairV>(dir);
    if (!q) throw UsageError("direction does not match the input at a pair position");
    return node(FPair{lift(p->a, q->a), lift(p->b, q->b)});
  }
  if (auto* l = get_if<InlV>(x)) {
    auto* d = get_if<InlV>(dir);
    return node(FInl{lift(l->v, d ? d->v : l->v)});
  }
  if (auto* r = get_if<InrV>(x)) {
    auto* d = get_if<InrV>(dir);
    return node(FInr{lift(r->v, d ? d->v : r->v)});
  }
  throw UsageError("forward oracle: unsupported input " + show(x));
}

void lower(const FV& v, Value& y, Value& dy) {
  struct V {
    Value& y;
    Value& dy;
    void operator()(const Dual& d) { y = make_real(d.v), dy = make_real(d.d); }
    void operator()(const FInt& i) { y = dy = make_int(i.v); }
    void operator()(const FUnit&) { y = dy = unit_value(); }
    void operator()(const FPair& p) {
      Value ya, da, yb, db;
      lower(p.a, ya, da);
      lower(p.b, yb, db);
      y = make_pair(ya, yb);
      dy = make_pair(da, db);
    }
    void operator()(const FInl& l) {
      Value a, b;
      lower(l.v, a, b);
      y = make_inl(a), dy = make_inl(b);
    }
    void operator()(const FInr& r) {
      Value a, b;
      lower(r.v, a, b);
      y = make_inr(a), dy = make_inr(b);
    }
    void operator()(const FClosure&) { throw UsageError("forward oracle: unsupported function-typed output"); }
  };
  std::visit(V{y, dy}, v->data);
}

}  // namespace

ForwardResult forward_ad(const Program& p, const Value& x, const Value& dir) {
  if (!p.domain.is_plain_data() || !p.codomain.is_plain_data())
    throw UsageError("unsupported type: forward mode needs function-free input and output types");
  if (!matches(x, p.domain)) throw UsageError("input " + show(x) + " does not match " + to_string(p.domain));
  Forward f;
  FV r = f.apply(node(FClosure{p.term.get(), nullptr}), lift(x, dir));
  ForwardResult out;
  lower(r, out.y, out.dy);
  return out;
}

Matrix jacobian_forward(const Program& p, const Value& x) {
  std::size_t n = count_reals(x);
  std::vector<double> e(n, 0.0);
  Matrix cols;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = 1.0;
    ForwardResult r = forward_ad(p, x, with_reals(x, e));
    e[i] = 0.0;
    cols.push_back(real_leaves_at(r.y, r.dy));
  }
  std::size_t m = count_reals(eval_source(p, x).value);
  Matrix j(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m && k < cols[i].size(); ++k) j[k][i] = cols[i][k];
  return j;
}

}  // namespace dualgrad
