// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/ad/staged.hpp"

#include "dualgrad/ad/monadic.hpp"
#include "dualgrad/error.hpp"
#include "internal.hpp"

namespace dualgrad {

StagedRuntime::StagedRuntime(Interpreter& in, Type c) : in_(in), c_(std::move(c)) {}

StagedV& StagedRuntime::mut(Value& s) {
  if (s.use_count() > 1) s = std::make_shared<ValueNode>(*s);
  auto* m = std::get_if<StagedV>(&s->data);
  if (!m) throw EvalError("expected a staged value, found " + show(s));
  return *m;
}

Value StagedRuntime::zero() {
  auto v = std::make_shared<ValueNode>();
  v->data = StagedV{in_.zero(c_), {}};
  return v;
}

Value StagedRuntime::init(Value c) {
  auto v = std::make_shared<ValueNode>();
  v->data = StagedV{std::move(c), {}};
  return v;
}

Value StagedRuntime::call(std::int64_t id, Value f, double x) {
  Value s = zero();
  mut(s).calls.emplace(id, StagedEntry{std::move(f), x});
  ++in_.counters().mapOrArrayOps;
  return s;
}

Value StagedRuntime::plus(Value a, Value b) {
  if (!get_if<StagedV>(a) || !get_if<StagedV>(b)) throw EvalError("staged plus on a non-staged value");
  if (get_if<StagedV>(a)->calls.size() < get_if<StagedV>(b)->calls.size()) std::swap(a, b);
  StagedV& big = mut(a);
  const StagedV& small = *get_if<StagedV>(b);
  Counters& k = in_.counters();
  for (const auto& [id, e] : small.calls) {
    ++k.mapOrArrayOps;
    auto [it, inserted] = big.calls.emplace(id, e);
    if (!inserted) {
      it->second.acc += e.acc;
      ++k.scalarAdditions;
    }
  }
  big.cot = in_.add(big.cot, small.cot);
  return a;
}

Value StagedRuntime::resolve(Value s) {
  Counters& k = in_.counters();
  mut(s);
  while (true) {
    StagedV& m = mut(s);
    if (m.calls.empty()) break;
    auto last = std::prev(m.calls.end());
    StagedEntry e = std::move(last->second);
    m.calls.erase(last);
    ++k.mapOrArrayOps;
    ++k.resolveSteps;
    Value r = in_.apply(e.f, make_real(e.acc));
    s = plus(std::move(s), std::move(r));
  }
  return get_if<StagedV>(s)->cot;
}

Value StagedRuntime::builtin(Prim p, std::vector<Value>& args) {
  switch (p) {
    case Prim::ZeroStaged: return zero();
    case Prim::PlusStaged: return plus(std::move(args[0]), std::move(args[1]));
    case Prim::StagedCall: {
      const PairV& d = as_pair(args[0]);
      return call(as_int(d.a), d.b, as_real(args[1]));
    }
    case Prim::InitStaged: return init(std::move(args[0]));
    default: throw EvalError("builtin " + std::string(prim_name(p)) + " is not available in the staged stage");
  }
}

TermPtr transform_staged(const Program& p) { return transform_monadic(Flavour::Staged, p); }

GradResult wrap_staged(const Program& p, const Value& x, const Value& dy, const RunOptions& opts) {
  return wrap(p, StageSpec{Stage::Staged, Variant::TwoArray}, x, dy, opts);
}

namespace {

class StagedPullback final : public Pullback {
 public:
  StagedPullback(const Compiled& c, const Value& x, const RunOptions& opts)
      : Pullback(opts), rt_(interp_, cotangent_type(c.program.domain)) {
    x_ = x;
    Type cot = cotangent_type(c.program.domain);
    interp_.set_cotangent_type(cot);
    interp_.set_runtime(&rt_);
    start_forward();
    Value f = interp_.eval(c.target);
    std::int64_t next = 0;
    detail::Inject root = [](Value z) { return z; };
    Value xd = detail::interleave(interp_, c.program.domain, x, root, [&](const Value& r, detail::Inject inj) {
      std::int64_t id = next++;
      Value bp = interp_.host_linear([this, inj](Value z) { return rt_.init(inj(std::move(z))); }, id);
      inputs_.push_back(get_if<HostFnV>(bp)->serial);
      return make_pair(r, make_pair(make_int(id), bp));
    });
    Value res = interp_.apply(interp_.apply(f, xd), make_int(next));
    const PairV& rp = as_pair(res);
    ids_consumed_ = static_cast<std::uint64_t>(as_int(rp.b));
    detail::DeinterleaveOps ops;
    ops.leaf = [this](const Value& v) {
      const PairV& p = as_pair(v);
      const PairV& d = as_pair(p.b);
      std::int64_t id = as_int(d.a);
      Value bp = d.b;
      return std::pair<Value, detail::Bp>{p.a, [this, id, bp](const Value& z) { return rt_.call(id, bp, as_real(z)); }};
    };
    ops.zero = [this] { return rt_.zero(); };
    ops.combine = [this](Value a, Value b) { return rt_.plus(std::move(a), std::move(b)); };
    ops.counters = &counters_;
    ops.epoch = epoch_ptr();
    auto [y, bp] = detail::deinterleave(c.program.codomain, rp.a, ops);
    end_forward();
    y_ = y;
    bp_ = std::move(bp);
  }

 protected:
  Value pull(const Value& dy) override { return complete_cotangent(x_, rt_.resolve(bp_(dy))); }

  std::vector<std::uint64_t> input_invocations() const override {
    std::vector<std::uint64_t> r;
    for (auto s : inputs_) r.push_back(counters_.invocations[s]);
    return r;
  }

 private:
  StagedRuntime rt_;
  detail::Bp bp_;
  std::vector<std::uint64_t> inputs_;
};

}  // namespace

namespace detail {
std::unique_ptr<Pullback> make_staged(const Compiled& c, const Value& x, const RunOptions& opts) {
  return std::make_unique<StagedPullback>(c, x, opts);
}
}  // namespace detail

}  // namespace dualgrad
