// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "dualgrad/ad/monadic.hpp"
#include "dualgrad/ad/naive.hpp"
#include "dualgrad/error.hpp"
#include "internal.hpp"

namespace dualgrad {

std::string to_string(const StageSpec& s) {
  switch (s.stage) {
    case Stage::Naive: return "naive";
    case Stage::Staged: return "staged";
    case Stage::Cayley: return "cayley";
    case Stage::MutArray:
      switch (s.variant) {
        case Variant::TwoArray: return "mutarray/two-array";
        case Variant::SingleArray: return "mutarray/single-array";
        case Variant::Contrib: return "mutarray/contrib";
        case Variant::Tape: return "mutarray/tape";
      }
  }
  return "?";
}

namespace {

std::optional<Variant> variant_from(std::string_view v) {
  if (v == "two-array") return Variant::TwoArray;
  if (v == "single-array") return Variant::SingleArray;
  if (v == "contrib") return Variant::Contrib;
  if (v == "tape") return Variant::Tape;
  return std::nullopt;
}

}  // namespace

StageSpec parse_stage(std::string_view stage, std::string_view variant) {
  if (auto slash = stage.find('/'); slash != std::string_view::npos) {
    if (!variant.empty()) throw UsageError("variant given twice");
    return parse_stage(stage.substr(0, slash), stage.substr(slash + 1));
  }
  StageSpec s;
  if (stage == "naive") {
    s.stage = Stage::Naive;
  } else if (stage == "staged") {
    s.stage = Stage::Staged;
  } else if (stage == "cayley") {
    s.stage = Stage::Cayley;
  } else if (stage == "mutarray") {
    s.stage = Stage::MutArray;
  } else if (auto v = variant_from(stage)) {
    s.stage = Stage::MutArray;
    s.variant = *v;
  } else {
    throw UsageError("unknown stage '" + std::string(stage) + "'");
  }
  if (!variant.empty()) {
    auto v = variant_from(variant);
    if (!v) throw UsageError("unknown variant '" + std::string(variant) + "'");
    if (s.stage != Stage::MutArray) throw UsageError("--variant applies to the mutarray stage only");
    s.variant = *v;
  }
  return s;
}

std::vector<StageSpec> all_stages() {
  return {
      {Stage::Naive, Variant::TwoArray},        {Stage::Staged, Variant::TwoArray},
      {Stage::Cayley, Variant::TwoArray},       {Stage::MutArray, Variant::TwoArray},
      {Stage::MutArray, Variant::SingleArray},  {Stage::MutArray, Variant::Contrib},
      {Stage::MutArray, Variant::Tape},
  };
}

Compiled compile(const Program& p, StageSpec spec, bool check) {
  Compiled c;
  c.program = p;
  c.spec = spec;
  Type cot = cotangent_type(p.domain);
  cotangent_type(p.codomain);
  Type expected;
  if (spec.stage == Stage::Naive) {
    c.target = transform_naive(p);
    c.profile = StageProfile::naive(cot);
    expected = Type::fun(naive_type(p.domain, cot), naive_type(p.codomain, cot));
  } else {
    Flavour f = Flavour::Staged;
    if (spec.stage == Stage::Staged) {
      c.profile = StageProfile::staged(cot);
    } else if (spec.stage == Stage::Cayley) {
      f = Flavour::Cayley;
      c.profile = StageProfile::cayley(cot);
    } else if (spec.variant == Variant::Contrib) {
      f = Flavour::Contrib;
      c.profile = StageProfile::contrib();
    } else if (spec.variant == Variant::Tape) {
      f = Flavour::Tape;
      c.profile = StageProfile::tape();
    } else {
      f = Flavour::Array;
      c.profile = StageProfile::array();
    }
    c.target = transform_monadic(f, p);
    expected = Type::fun(monadic_type(f, p.domain, cot),
                         Type::fun(Type::integer(), Type::pair(monadic_type(f, p.codomain, cot), Type::integer())));
  }
  c.target_type = expected;
  if (check) {
    Type got = typecheck_target(c.target, c.profile);
    if (got != expected)
      throw InvariantViolation("transformed program has type " + to_string(got) + ", expected " + to_string(expected));
  }
  return c;
}

Pullback::Pullback(const RunOptions& opts) : interp_(counters_, InterpreterOptions{opts.check_invariants}), opts_(opts) {}

void Pullback::start_forward() { t0_ = std::chrono::steady_clock::now(); }

void Pullback::end_forward() {
  forward_nanos_ = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0_).count());
}

Value Pullback::operator()(const Value& dy) {
  ++epoch_;
  std::fill(counters_.invocations.begin(), counters_.invocations.end(), 0);
  counters_.idInvocations.clear();
  auto t = std::chrono::steady_clock::now();
  Value dx = pull(dy);
  reverse_nanos_ = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t).count());
  if (!naive_ && opts_.check_invariants) {
    for (std::size_t s = 0; s < counters_.invocations.size(); ++s)
      if (counters_.tagged[s] && counters_.invocations[s] > 1)
        throw InvariantViolation("backpropagator invoked " + std::to_string(counters_.invocations[s]) +
                                 " times in one reverse pass");
    for (auto n : counters_.idInvocations)
      if (n > 1) throw InvariantViolation("staged entry interpreted more than once");
  }
  return dx;
}

CounterReport Pullback::report() const {
  CounterReport r;
  const Counters& c = counters_;
  r.forwardPrimops = c.forwardPrimops;
  r.backpropsCreated = c.backpropsCreated;
  r.resolveSteps = c.resolveSteps;
  r.scalarAdditions = c.scalarAdditions;
  r.mapOrArrayOps = c.mapOrArrayOps;
  r.zeroAllocationsOfTypeC = c.zeroAllocationsOfTypeC;
  r.wallTimeNanos = forward_nanos_ + reverse_nanos_;
  r.deinterleaveAdditions = c.deinterleaveAdditions;
  r.backpropOps = c.backpropOps;
  r.contribNodes = c.contribNodes;
  r.idsConsumed = ids_consumed_;
  r.inputScalars = count_reals(x_);
  r.nonFiniteResults = c.nonFiniteResults;
  std::uint64_t m = 0;
  for (std::size_t s = 0; s < c.invocations.size(); ++s)
    if (naive_ || c.tagged[s]) m = std::max<std::uint64_t>(m, c.invocations[s]);
  for (auto n : c.idInvocations) m = std::max<std::uint64_t>(m, n);
  r.invocationsPerIdMax = m;
  r.inputBackpropInvocations = input_invocations();
  return r;
}

std::unique_ptr<Pullback> differentiate(const Compiled& c, const Value& x, const RunOptions& opts) {
  if (!matches(x, c.program.domain))
    throw UsageError("input " + show(x) + " does not match type " + to_string(c.program.domain));
  switch (c.spec.stage) {
    case Stage::Naive: return detail::make_naive(c, x, opts);
    case Stage::Staged: return detail::make_staged(c, x, opts);
    case Stage::Cayley: return detail::make_cayley(c, x, opts);
    case Stage::MutArray: return detail::make_array(c, x, opts);
  }
  throw InvariantViolation("unknown stage");
}

GradResult wrap(const Compiled& c, const Value& x, const Value& dy, const RunOptions& opts) {
  auto pb = differentiate(c, x, opts);
  GradResult r;
  r.y = pb->primal();
  r.dx = (*pb)(dy);
  r.counters = pb->report();
  return r;
}

GradResult wrap(const Program& p, StageSpec spec, const Value& x, const Value& dy, const RunOptions& opts) {
  return wrap(compile(p, spec), x, dy, opts);
}

namespace detail {

Value inject_left(const Inject& inj, const Type& right_cot, Interpreter& in, Value z) {
  return inj(make_pair(std::move(z), in.zero(right_cot)));
}

Value interleave(Interpreter& in, const Type& t, const Value& x, const Inject& inj, const Leaf& leaf) {
  switch (t.kind()) {
    case TypeKind::Real:
      return leaf(x, inj);
    case TypeKind::Int:
    case TypeKind::Unit:
      return x;
    case TypeKind::Pair: {
      const PairV& p = as_pair(x);
      Type ca = cotangent_type(t.left());
      Type cb = cotangent_type(t.right());
      Inject left = [inj, cb, &in](Value z) { return inj(make_pair(std::move(z), in.zero(cb))); };
      Inject right = [inj, ca, &in](Value z) { return inj(make_pair(in.zero(ca), std::move(z))); };
      Value a = interleave(in, t.left(), p.a, left, leaf);
      return make_pair(std::move(a), interleave(in, t.right(), p.b, right, leaf));
    }
    case TypeKind::Sum: {
      if (auto* l = get_if<InlV>(x)) {
        Inject into = [inj](Value z) { return inj(make_inl(std::move(z))); };
        return make_inl(interleave(in, t.left(), l->v, into, leaf));
      }
      if (auto* r = get_if<InrV>(x)) {
        Inject into = [inj](Value z) { return inj(make_inr(std::move(z))); };
        return make_inr(interleave(in, t.right(), r->v, into, leaf));
      }
      throw UsageError("value " + show(x) + " does not match sum type " + to_string(t));
    }
    default:
      throw UsageError("unsupported input type " + to_string(t) + " (function types cannot be interleaved)");
  }
}

namespace {

Bp guarded(Bp f, const std::uint64_t* epoch) {
  if (!epoch) return f;
  auto last = std::make_shared<std::uint64_t>(0);
  return [f = std::move(f), epoch, last](const Value& z) {
    if (*last == *epoch) throw InvariantViolation("untagged top-level backpropagator invoked twice in one run");
    *last = *epoch;
    return f(z);
  };
}

}  // namespace

std::pair<Value, Bp> deinterleave(const Type& t, const Value& v, const DeinterleaveOps& ops) {
  switch (t.kind()) {
    case TypeKind::Real: {
      auto [y, bp] = ops.leaf(v);
      return {y, guarded(std::move(bp), ops.epoch)};
    }
    case TypeKind::Int:
    case TypeKind::Unit: {
      auto zero = ops.zero;
      return {v, guarded([zero](const Value&) { return zero(); }, ops.epoch)};
    }
    case TypeKind::Pair: {
      const PairV& p = as_pair(v);
      auto [ya, ba] = deinterleave(t.left(), p.a, ops);
      auto [yb, bb] = deinterleave(t.right(), p.b, ops);
      auto combine = ops.combine;
      Counters* counters = ops.counters;
      Bp bp = [ba = ba, bb = bb, combine, counters](const Value& z) {
        const PairV& zp = as_pair(z);
        Value a = ba(zp.a);
        Value b = bb(zp.b);
        if (counters) ++counters->deinterleaveAdditions;
        return combine(std::move(a), std::move(b));
      };
      return {make_pair(ya, yb), guarded(std::move(bp), ops.epoch)};
    }
    case TypeKind::Sum: {
      bool left = get_if<InlV>(v) != nullptr;
      if (!left && !get_if<InrV>(v)) throw EvalError("output " + show(v) + " is not a sum value");
      Value inner = left ? get_if<InlV>(v)->v : get_if<InrV>(v)->v;
      auto [y, b] = deinterleave(left ? t.left() : t.right(), inner, ops);
      auto zero = ops.zero;
      Bp bp = [b = b, left, zero](const Value& z) {
        if (get_if<ZeroSumV>(z)) return zero();
        if (left) {
          if (auto* l = get_if<InlV>(z)) return b(l->v);
        } else {
          if (auto* r = get_if<InrV>(z)) return b(r->v);
        }
        throw EvalError("output cotangent " + show(z) + " takes the other branch of the sum output");
      };
      return {left ? make_inl(y) : make_inr(y), guarded(std::move(bp), ops.epoch)};
    }
    default:
      throw UsageError("unsupported output type " + to_string(t) + " (function types cannot be deinterleaved)");
  }
}

}  // namespace detail
}  // namespace dualgrad
