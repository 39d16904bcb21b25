// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/ad/mutarray.hpp"

#include "dualgrad/ad/monadic.hpp"
#include "dualgrad/error.hpp"
#include "internal.hpp"

namespace dualgrad {

ArrayRuntime::ArrayRuntime(Interpreter& in, Variant v) : in_(in), variant_(v) {
  identity_ = make_host([](Value s) { return s; });
}

ArrayState& ArrayRuntime::take(const Value& state) {
  auto* h = get_if<StateV>(state);
  if (!h || !h->arr) throw EvalError("expected an array state, found " + show(state));
  if (h->version != h->arr->version) throw InvariantViolation("array state used after it was consumed");
  ++h->arr->version;
  return *h->arr;
}

Value ArrayRuntime::handle(const std::shared_ptr<ArrayState>& arr) {
  auto v = std::make_shared<ValueNode>();
  v->data = StateV{arr, arr->version};
  return v;
}

Value ArrayRuntime::state_alloc(std::size_t n_inputs, std::size_t n_backprops) {
  auto arr = std::make_shared<ArrayState>();
  if (variant_ == Variant::TwoArray) arr->cot.assign(n_inputs, 0.0);
  arr->stage.resize(std::max<std::size_t>(n_backprops, 1));
  ++in_.counters().zeroAllocationsOfTypeC;
  return handle(arr);
}

Value ArrayRuntime::staged_call(Value state, std::int64_t id, const Value& f, double x) {
  ArrayState& a = take(state);
  if (id <= 0 || static_cast<std::size_t>(id) >= a.stage.size())
    throw EvalError("backpropagator id " + std::to_string(id) + " outside the staging array");
  if (in_.checking() && resolving_ >= 0 && id >= resolving_)
    throw InvariantViolation("tag monotonicity violated: entry " + std::to_string(resolving_) + " stages entry " +
                             std::to_string(id));
  Counters& k = in_.counters();
  ++k.mapOrArrayOps;
  StageSlot& s = a.stage[static_cast<std::size_t>(id)];
  if (s.touched) {
    s.acc += x;
    ++k.scalarAdditions;
  } else {
    s.touched = true;
    s.acc = x;
    if (auto* c = get_if<ContribV>(f))
      s.node = c->node;
    else
      s.f = f;
  }
  auto h = get_if<StateV>(state)->arr;
  return handle(h);
}

Value ArrayRuntime::input_cot(Value state, std::int64_t i, double a) {
  ArrayState& st = take(state);
  if (i < 0 || static_cast<std::size_t>(i) >= st.cot.size()) throw EvalError("input index outside the cotangent array");
  st.cot[static_cast<std::size_t>(i)] += a;
  ++in_.counters().mapOrArrayOps;
  ++in_.counters().scalarAdditions;
  return handle(get_if<StateV>(state)->arr);
}

std::vector<double> ArrayRuntime::resolve(Value state, std::size_t n_backprops) {
  Counters& k = in_.counters();
  std::shared_ptr<ArrayState> arr = get_if<StateV>(state) ? get_if<StateV>(state)->arr : nullptr;
  if (!arr) throw EvalError("resolve of a non-state value");
  for (std::size_t id = n_backprops; id-- > 1;) {
    take(state);
    state = handle(arr);
    StageSlot& s = arr->stage[id];
    if (!s.touched) continue;
    ++k.resolveSteps;
    k.invoked_id(static_cast<std::int64_t>(id));
    resolving_ = static_cast<std::int64_t>(id);
    if (variant_ == Variant::TwoArray || variant_ == Variant::SingleArray) {
      if (!s.f) continue;
      Value u = in_.apply(s.f, make_real(s.acc));
      state = apply_updater(u, std::move(state));
    } else {
      const ContribNode* node = variant_ == Variant::Tape ? (id < tape_.size() ? tape_[id].get() : nullptr) : s.node.get();
      if (!node) continue;
      for (const ContribEdge& e : node->edges) {
        if (e.id <= 0 || static_cast<std::size_t>(e.id) >= arr->stage.size())
          throw EvalError("contribution edge outside the staging array");
        if (in_.checking() && e.id >= resolving_)
          throw InvariantViolation("tag monotonicity violated during resolve");
        StageSlot& t = arr->stage[static_cast<std::size_t>(e.id)];
        ++k.backpropOps;
        ++k.mapOrArrayOps;
        if (t.touched) {
          t.acc += s.acc * e.coeff;
          ++k.scalarAdditions;
        } else {
          t.touched = true;
          t.acc = s.acc * e.coeff;
          if (variant_ == Variant::Contrib) t.node = e.node;
        }
      }
    }
  }
  resolving_ = -1;
  take(state);
  if (variant_ == Variant::TwoArray) return std::move(arr->cot);
  std::vector<double> accs(arr->stage.size(), 0.0);
  for (std::size_t i = 0; i < accs.size(); ++i)
    if (arr->stage[i].touched) accs[i] = arr->stage[i].acc;
  return accs;
}

Value ArrayRuntime::identity() { return identity_; }

Value ArrayRuntime::compose(Value f, Value g) {
  if (f == identity_) return g;
  if (g == identity_) return f;
  return make_host([this, f = std::move(f), g = std::move(g)](Value s) {
    return in_.apply(g, in_.apply(f, std::move(s)));
  });
}

Value ArrayRuntime::call_updater(std::int64_t id, Value f, double x) {
  return make_host([this, id, f = std::move(f), x](Value s) { return staged_call(std::move(s), id, f, x); });
}

Value ArrayRuntime::input_cot_updater(std::int64_t i, double a) {
  return make_host([this, i, a](Value s) { return input_cot(std::move(s), i, a); });
}

Value ArrayRuntime::apply_updater(const Value& u, Value state) { return in_.apply(u, std::move(state)); }

Value ArrayRuntime::make_contrib(std::vector<ContribEdge> edges) {
  auto node = std::make_shared<ContribNode>();
  node->edges = std::move(edges);
  node->serial = in_.counters().contribNodes++;
  ++in_.counters().backpropsCreated;
  auto v = std::make_shared<ValueNode>();
  v->data = ContribV{std::move(node)};
  return v;
}

void ArrayRuntime::record(std::int64_t id, const Value& contrib) {
  if (id < 0) throw EvalError("negative tape index");
  auto i = static_cast<std::size_t>(id);
  if (i >= tape_.size()) {
    std::size_t n = std::max<std::size_t>(tape_.size() * 2, 16);
    while (n <= i) n *= 2;
    tape_.resize(n);
  }
  tape_[i] = get_if<ContribV>(contrib)->node;
}

Value ArrayRuntime::builtin(Prim p, std::vector<Value>& args) {
  switch (p) {
    case Prim::SId: return identity();
    case Prim::SCompose: return compose(std::move(args[0]), std::move(args[1]));
    case Prim::StagedCall: {
      const PairV& d = as_pair(args[0]);
      return call_updater(as_int(d.a), d.b, as_real(args[1]));
    }
    case Prim::MkContrib:
    case Prim::TapeRecord: {
      std::size_t first = p == Prim::TapeRecord ? 1 : 0;
      std::vector<ContribEdge> edges;
      for (std::size_t i = first; i + 1 < args.size(); i += 2) {
        const PairV& d = as_pair(args[i]);
        auto* c = get_if<ContribV>(d.b);
        if (!c) throw EvalError("contribution argument is not a contribution list");
        edges.push_back(ContribEdge{as_int(d.a), c->node, as_real(args[i + 1])});
      }
      Value v = make_contrib(std::move(edges));
      if (p == Prim::TapeRecord) record(as_int(args[0]), v);
      return v;
    }
    default: throw EvalError("builtin " + std::string(prim_name(p)) + " is not available in the array stage");
  }
}

namespace {

Flavour flavour_of(Variant v) {
  switch (v) {
    case Variant::Contrib: return Flavour::Contrib;
    case Variant::Tape: return Flavour::Tape;
    default: return Flavour::Array;
  }
}

class ArrayPullback final : public Pullback {
 public:
  ArrayPullback(const Compiled& c, const Value& x, const RunOptions& opts)
      : Pullback(opts), rt_(interp_, c.spec.variant) {
    x_ = x;
    interp_.set_runtime(&rt_);
    Variant v = c.spec.variant;
    start_forward();
    Value f = interp_.eval(c.target);
    std::int64_t next = 1;
    detail::Inject root = [](Value z) { return z; };
    Value xd = detail::interleave(interp_, c.program.domain, x, root, [&](const Value& r, detail::Inject) {
      std::int64_t id = next++;
      Value bp;
      if (v == Variant::Contrib || v == Variant::Tape) {
        bp = rt_.make_contrib({});
        if (v == Variant::Tape) rt_.record(id, bp);
      } else {
        std::int64_t i = id - 1;
        bool two = v == Variant::TwoArray;
        bp = interp_.host_linear(
            [this, i, two](Value z) { return two ? rt_.input_cot_updater(i, as_real(z)) : rt_.identity(); }, id);
        inputs_.push_back(get_if<HostFnV>(bp)->serial);
      }
      return make_pair(r, make_pair(make_int(id), bp));
    });
    n_inputs_ = static_cast<std::size_t>(next - 1);
    Value res = interp_.apply(interp_.apply(f, xd), make_int(next));
    const PairV& rp = as_pair(res);
    n_backprops_ = static_cast<std::size_t>(as_int(rp.b));
    ids_consumed_ = n_backprops_ - 1;
    detail::DeinterleaveOps ops;
    ops.leaf = [this](const Value& val) {
      const PairV& p = as_pair(val);
      const PairV& d = as_pair(p.b);
      std::int64_t id = as_int(d.a);
      Value bp = d.b;
      return std::pair<Value, detail::Bp>{
          p.a, [this, id, bp](const Value& z) { return rt_.call_updater(id, bp, as_real(z)); }};
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

 protected:
  Value pull(const Value& dy) override {
    Value st = rt_.state_alloc(n_inputs_, n_backprops_);
    st = rt_.apply_updater(bp_(dy), std::move(st));
    std::vector<double> out = rt_.resolve(std::move(st), n_backprops_);
    std::vector<double> grads;
    if (rt_.variant() == Variant::TwoArray)
      grads = std::move(out);
    else
      grads.assign(out.begin() + 1, out.begin() + 1 + static_cast<std::ptrdiff_t>(n_inputs_));
    // Int positions echo the primal integer.
    return with_reals(x_, grads);
  }

  std::vector<std::uint64_t> input_invocations() const override {
    std::vector<std::uint64_t> r;
    if (!inputs_.empty()) {
      for (auto s : inputs_) r.push_back(counters_.invocations[s]);
      return r;
    }
    for (std::size_t id = 1; id <= n_inputs_; ++id)
      r.push_back(id < counters_.idInvocations.size() ? counters_.idInvocations[id] : 0);
    return r;
  }

 private:
  ArrayRuntime rt_;
  detail::Bp bp_;
  std::vector<std::uint64_t> inputs_;
  std::size_t n_inputs_ = 0;
  std::size_t n_backprops_ = 0;
};

}  // namespace

TermPtr transform_mutarray(const Program& p, Variant v) { return transform_monadic(flavour_of(v), p); }

GradResult wrap_mutarray(const Program& p, const Value& x, const Value& dy, Variant v, const RunOptions& opts) {
  return wrap(p, StageSpec{Stage::MutArray, v}, x, dy, opts);
}

namespace detail {
std::unique_ptr<Pullback> make_array(const Compiled& c, const Value& x, const RunOptions& opts) {
  return std::make_unique<ArrayPullback>(c, x, opts);
}
}  // namespace detail

}  // namespace dualgrad
