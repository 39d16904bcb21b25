// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/ad/cayley.hpp"

#include "dualgrad/ad/monadic.hpp"
#include "dualgrad/ad/staged.hpp"
#include "dualgrad/error.hpp"
#include "internal.hpp"

namespace dualgrad {

CayleyRuntime::CayleyRuntime(Interpreter& in, Type c) : in_(in), c_(std::move(c)) {
  identity_ = make_host([](Value s) { return s; });
}

Value CayleyRuntime::identity() { return identity_; }

Value CayleyRuntime::compose(Value f, Value g) {
  if (f == identity_) return g;
  if (g == identity_) return f;
  return make_host([this, f = std::move(f), g = std::move(g)](Value s) {
    return in_.apply(g, in_.apply(f, std::move(s)));
  });
}

Value CayleyRuntime::staged_call(std::int64_t id, Value f, double x) {
  return make_host([this, id, f = std::move(f), x](Value s) {
    StagedV& m = StagedRuntime::mut(s);
    Counters& k = in_.counters();
    ++k.mapOrArrayOps;
    auto [it, inserted] = m.calls.emplace(id, StagedEntry{f, x});
    if (!inserted) {
      it->second.acc += x;
      ++k.scalarAdditions;
    }
    return s;
  });
}

Value CayleyRuntime::map_cot(CotUpdate g) {
  return make_host([g = std::move(g)](Value s) {
    StagedV& m = StagedRuntime::mut(s);
    m.cot = g(std::move(m.cot));
    return s;
  });
}

Value CayleyRuntime::apply_updater(const Value& u, Value s) { return in_.apply(u, std::move(s)); }

Value CayleyRuntime::run_zero(const std::function<Value(Value)>& k) {
  auto v = std::make_shared<ValueNode>();
  v->data = StagedV{in_.zero(c_), {}};
  return k(std::move(v));
}

Value CayleyRuntime::resolve(Value s) {
  Counters& k = in_.counters();
  while (true) {
    StagedV& m = StagedRuntime::mut(s);
    if (m.calls.empty()) break;
    auto last = std::prev(m.calls.end());
    StagedEntry e = std::move(last->second);
    m.calls.erase(last);
    ++k.mapOrArrayOps;
    ++k.resolveSteps;
    Value u = in_.apply(e.f, make_real(e.acc));
    s = apply_updater(u, std::move(s));
  }
  return get_if<StagedV>(s)->cot;
}

Value CayleyRuntime::builtin(Prim p, std::vector<Value>& args) {
  switch (p) {
    case Prim::SId: return identity();
    case Prim::SCompose: return compose(std::move(args[0]), std::move(args[1]));
    case Prim::StagedCall: {
      const PairV& d = as_pair(args[0]);
      return staged_call(as_int(d.a), d.b, as_real(args[1]));
    }
    default: throw EvalError("builtin " + std::string(prim_name(p)) + " is not available in the cayley stage");
  }
}

TermPtr transform_cayley(const Program& p) { return transform_monadic(Flavour::Cayley, p); }

GradResult wrap_cayley(const Program& p, const Value& x, const Value& dy, const RunOptions& opts) {
  return wrap(p, StageSpec{Stage::Cayley, Variant::TwoArray}, x, dy, opts);
}

namespace {

class CayleyPullback final : public Pullback {
 public:
  CayleyPullback(const Compiled& c, const Value& x, const RunOptions& opts)
      : Pullback(opts), rt_(interp_, cotangent_type(c.program.domain)) {
    x_ = x;
    interp_.set_cotangent_type(cotangent_type(c.program.domain));
    interp_.set_runtime(&rt_);
    start_forward();
    Value f = interp_.eval(c.target);
    std::int64_t next = 0;
    Setter root = [this](CayleyRuntime::CotUpdate g) { return rt_.map_cot(std::move(g)); };
    Value xd = interleave(c.program.domain, x, root, next);
    Value res = interp_.apply(interp_.apply(f, xd), make_int(next));
    const PairV& rp = as_pair(res);
    ids_consumed_ = static_cast<std::uint64_t>(as_int(rp.b));
    detail::DeinterleaveOps ops;
    ops.leaf = [this](const Value& v) {
      const PairV& p = as_pair(v);
      const PairV& d = as_pair(p.b);
      std::int64_t id = as_int(d.a);
      Value bp = d.b;
      return std::pair<Value, detail::Bp>{
          p.a, [this, id, bp](const Value& z) { return rt_.staged_call(id, bp, as_real(z)); }};
    };
    ops.zero = [this] { return rt_.identity(); };
    ops.combine = [this](Value a, Value b) { return rt_.compose(std::move(a), std::move(b)); };
    ops.counters = &counters_;
    ops.epoch = epoch_ptr();
    auto [y, bp] = detail::deinterleave(c.program.codomain, rp.a, ops);
    end_forward();
    y_ = y;
    bp_ = std::move(bp);
  }

  // Turns an update of one input position's cotangent into a Staged updater.
  using Setter = std::function<Value(CayleyRuntime::CotUpdate)>;

  Value interleave(const Type& t, const Value& x, const Setter& set, std::int64_t& next) {
    switch (t.kind()) {
      case TypeKind::Real: {
        std::int64_t id = next++;
        Counters* k = &counters_;
        Value bp = interp_.host_linear(
            [set, k](Value z) {
              double a = as_real(z);
              return set([a, k](Value c) {
                ++k->scalarAdditions;
                return make_real(a + as_real(c));
              });
            },
            id);
        inputs_.push_back(get_if<HostFnV>(bp)->serial);
        return make_pair(x, make_pair(make_int(id), bp));
      }
      case TypeKind::Int:
      case TypeKind::Unit: return x;
      case TypeKind::Pair: {
        const PairV& p = as_pair(x);
        Setter left = [set](CayleyRuntime::CotUpdate g) {
          return set([g](Value c) {
            const PairV& q = as_pair(c);
            return make_pair(g(q.a), q.b);
          });
        };
        Setter right = [set](CayleyRuntime::CotUpdate g) {
          return set([g](Value c) {
            const PairV& q = as_pair(c);
            return make_pair(q.a, g(q.b));
          });
        };
        Value a = interleave(t.left(), p.a, left, next);
        return make_pair(a, interleave(t.right(), p.b, right, next));
      }
      case TypeKind::Sum: {
        bool is_left = get_if<InlV>(x) != nullptr;
        if (!is_left && !get_if<InrV>(x)) throw UsageError("value " + show(x) + " does not match sum type " + to_string(t));
        Type branch = cotangent_type(is_left ? t.left() : t.right());
        Setter into = [set, is_left, branch](CayleyRuntime::CotUpdate g) {
          return set([g, is_left, branch](Value c) {
            if (get_if<ZeroSumV>(c)) {
              Value z = g(zero_of(branch));
              return is_left ? make_inl(z) : make_inr(z);
            }
            if (is_left) {
              if (auto* l = get_if<InlV>(c)) return make_inl(g(l->v));
            } else if (auto* r = get_if<InrV>(c)) {
              return make_inr(g(r->v));
            }
            throw EvalError("cotangent " + show(c) + " takes the other branch of the input");
          });
        };
        Value inner = is_left ? get_if<InlV>(x)->v : get_if<InrV>(x)->v;
        Value v = interleave(is_left ? t.left() : t.right(), inner, into, next);
        return is_left ? make_inl(v) : make_inr(v);
      }
      default:
        throw UsageError("unsupported input type " + to_string(t) + " (function types cannot be interleaved)");
    }
  }

 protected:
  Value pull(const Value& dy) override {
    Value u = bp_(dy);
    Value cot = rt_.run_zero([&](Value s) { return rt_.resolve(rt_.apply_updater(u, std::move(s))); });
    return complete_cotangent(x_, cot);
  }

  std::vector<std::uint64_t> input_invocations() const override {
    std::vector<std::uint64_t> r;
    for (auto s : inputs_) r.push_back(counters_.invocations[s]);
    return r;
  }

 private:
  CayleyRuntime rt_;
  detail::Bp bp_;
  std::vector<std::uint64_t> inputs_;
};

}  // namespace

namespace detail {
std::unique_ptr<Pullback> make_cayley(const Compiled& c, const Value& x, const RunOptions& opts) {
  return std::make_unique<CayleyPullback>(c, x, opts);
}
}  // namespace detail

}  // namespace dualgrad
