// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/ad/naive.hpp"

#include "dualgrad/error.hpp"
#include "internal.hpp"

namespace dualgrad {

Type naive_type(const Type& t, const Type& c) {
  switch (t.kind()) {
    case TypeKind::Real: return Type::pair(Type::real(), Type::lin(Type::real(), c));
    case TypeKind::Int:
    case TypeKind::Unit: return t;
    case TypeKind::Pair: return Type::pair(naive_type(t.left(), c), naive_type(t.right(), c));
    case TypeKind::Sum: return Type::sum(naive_type(t.left(), c), naive_type(t.right(), c));
    case TypeKind::Fun: return Type::fun(naive_type(t.left(), c), naive_type(t.right(), c));
    default: throw InvariantViolation("no dual type for " + to_string(t));
  }
}

namespace {

struct Naive {
  const TypeMap& types;
  Type c;
  Symbol z{"z$"};

  Type D(const Type& t) const { return t ? naive_type(t, c) : t; }

  TermPtr primop(const Term& t) {
    std::size_t n = t.kids.size();
    std::vector<TermPtr> xs;
    for (std::size_t k = 1; k <= n; ++k) xs.push_back(mk::var(Symbol("x$" + std::to_string(k)), Type::real()));
    Type dr = Type::lin(Type::real(), c);
    TermPtr sum;
    for (std::size_t k = 1; k <= n; ++k) {
      TermPtr d = mk::var(Symbol("d$" + std::to_string(k)), dr);
      TermPtr term = mk::linapp(d, mk::partial(t.op, static_cast<int>(k), xs, mk::linvar(z)));
      sum = sum ? mk::linadd(sum, term) : term;
    }
    TermPtr result = mk::pair(mk::op(t.op, xs), mk::linlam(z, Type::real(), sum));
    // let q$k = D[t_k] in let x$k = fst q$k in let d$k = snd q$k in ..., innermost last
    for (std::size_t k = n; k >= 1; --k) {
      std::string s = std::to_string(k);
      Symbol q("q$" + s), x("x$" + s), d("d$" + s);
      TermPtr qv = mk::var(q, D(Type::real()));
      result = mk::let(d, dr, mk::snd(qv), result);
      result = mk::let(x, Type::real(), mk::fst(qv), result);
      result = mk::let(q, D(Type::real()), go(t.kids[k - 1]), result);
    }
    return result;
  }

  TermPtr go(const TermPtr& tp) {
    const Term& t = *tp;
    switch (t.kind) {
      case TermKind::Var: return mk::var(t.name, D(t.type));
      case TermKind::Unit: return mk::unit();
      case TermKind::Pair: return mk::pair(go(t.kids[0]), go(t.kids[1]));
      case TermKind::Fst: return mk::fst(go(t.kids[0]));
      case TermKind::Snd: return mk::snd(go(t.kids[0]));
      case TermKind::App: return mk::app(go(t.kids[0]), go(t.kids[1]));
      case TermKind::Lam: return mk::lam(t.name, D(t.type), go(t.kids[0]));
      case TermKind::Let: return mk::let(t.name, D(t.type), go(t.kids[0]), go(t.kids[1]));
      case TermKind::LetRec:
        return mk::letrec(t.name, D(t.type), t.name2, D(t.type2), go(t.kids[0]), go(t.kids[1]));
      case TermKind::Real:
        return mk::pair(mk::real(t.real), mk::linlam(z, Type::real(), mk::linzero(c)));
      case TermKind::Int: return mk::integer(t.integer);
      case TermKind::PrimOp: return primop(t);
      case TermKind::DiscreteOp: {
        std::vector<TermPtr> args;
        for (const auto& k : t.kids) args.push_back(go(k));
        return mk::op(t.op, std::move(args));
      }
      case TermKind::IfZero: return mk::ifzero(go(t.kids[0]), go(t.kids[1]), go(t.kids[2]));
      case TermKind::Inl: return mk::inl(go(t.kids[0]), D(t.type));
      case TermKind::Inr: return mk::inr(go(t.kids[0]), D(t.type));
      case TermKind::Case: return mk::case_of(go(t.kids[0]), t.name, go(t.kids[1]), t.name2, go(t.kids[2]));
      default: throw InvariantViolation("differentiation of a non-source term");
    }
  }
};

class NaivePullback final : public Pullback {
 public:
  NaivePullback(const Compiled& c, const Value& x, const RunOptions& opts) : Pullback(opts) {
    naive_ = true;
    x_ = x;
    Type cot = cotangent_type(c.program.domain);
    interp_.set_cotangent_type(cot);
    start_forward();
    Value f = interp_.eval(c.target);
    detail::Inject root = [](Value z) { return z; };
    Value xd = detail::interleave(interp_, c.program.domain, x, root, [this](const Value& r, detail::Inject inj) {
      Value bp = interp_.host_linear([inj](Value z) { return inj(std::move(z)); });
      inputs_.push_back(get_if<HostFnV>(bp)->serial);
      return make_pair(r, bp);
    });
    Value yd = interp_.apply(f, xd);
    detail::DeinterleaveOps ops;
    ops.leaf = [this](const Value& v) {
      const PairV& p = as_pair(v);
      Value bp = p.b;
      return std::pair<Value, detail::Bp>{p.a, [this, bp](const Value& z) { return interp_.apply(bp, z); }};
    };
    ops.zero = [this, cot] { return interp_.zero(cot); };
    ops.combine = [this](Value a, Value b) { return interp_.add(a, b); };
    ops.counters = &counters_;
    auto [y, bp] = detail::deinterleave(c.program.codomain, yd, ops);
    end_forward();
    y_ = y;
    bp_ = std::move(bp);
  }

 protected:
  Value pull(const Value& dy) override { return complete_cotangent(x_, bp_(dy)); }

  std::vector<std::uint64_t> input_invocations() const override {
    std::vector<std::uint64_t> r;
    for (auto s : inputs_) r.push_back(counters_.invocations[s]);
    return r;
  }

 private:
  detail::Bp bp_;
  std::vector<std::uint64_t> inputs_;
};

}  // namespace

TermPtr transform_naive(const TermPtr& t, const TypeMap& types, const Type& c) {
  Naive n{types, c};
  return n.go(t);
}

TermPtr transform_naive(const Program& p) {
  return transform_naive(p.term, p.types, cotangent_type(p.domain));
}

GradResult wrap_naive(const Program& p, const Value& x, const Value& dy, const RunOptions& opts) {
  return wrap(p, StageSpec{Stage::Naive, Variant::TwoArray}, x, dy, opts);
}

namespace detail {
std::unique_ptr<Pullback> make_naive(const Compiled& c, const Value& x, const RunOptions& opts) {
  return std::make_unique<NaivePullback>(c, x, opts);
}
}  // namespace detail

}  // namespace dualgrad
