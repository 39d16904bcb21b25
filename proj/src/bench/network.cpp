// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/bench/network.hpp"

#include "dualgrad/ad/staged.hpp"
#include "dualgrad/error.hpp"
#include "dualgrad/interpreter.hpp"
#include "dualgrad/typecheck.hpp"

namespace dualgrad::bench {
namespace {

Type cot() { return Type::pair(Type::real(), Type::pair(Type::real(), Type::real())); }

Symbol kz("z");

// k * z as a linear body, with k bound to a real variable.
TermPtr scale(const char* k, TermPtr z) {
  TermPtr kv = mk::var(Symbol(k), Type::real());
  return mk::partial(Op::Mul, 1, {kv, kv}, std::move(z));
}

TermPtr f1_body() {
  return mk::linpair(mk::linzero(Type::real()), mk::linpair(mk::linvar(kz), mk::linzero(Type::real())));
}

TermPtr constants(TermPtr body) {
  for (int k = 5; k >= 2; --k)
    body = mk::let(Symbol("k" + std::to_string(k)), Type::real(), mk::real(k), body);
  return body;
}

TermPtr tuple4(const char* prefix, Type t) {
  auto v = [&](int i) { return mk::var(Symbol(prefix + std::to_string(i)), t); };
  return mk::pair(v(1), mk::pair(v(2), mk::pair(v(3), v(4))));
}

std::uint64_t serial_of(const Value& f) {
  if (auto* c = get_if<ClosureV>(f)) return c->serial;
  throw InvariantViolation("network member is not a linear closure");
}

std::array<Value, 4> members(const Value& tuple, bool tagged) {
  std::array<Value, 4> out;
  Value rest = tuple;
  for (int i = 0; i < 3; ++i) {
    out[i] = as_pair(rest).a;
    rest = as_pair(rest).b;
  }
  out[3] = rest;
  if (tagged)
    for (auto& v : out) v = as_pair(v).b;
  return out;
}

}  // namespace

TermPtr network_naive_term() {
  Type lt = Type::lin(Type::real(), cot());
  auto call = [&](int i, TermPtr arg) { return mk::linapp(mk::var(Symbol("f" + std::to_string(i)), lt), arg); };
  TermPtr z = mk::linvar(kz);
  TermPtr f1 = mk::linlam(kz, Type::real(), f1_body());
  TermPtr f2 = mk::linlam(kz, Type::real(), mk::linadd(call(1, scale("k2", z)), call(1, scale("k3", z))));
  TermPtr f3 = mk::linlam(kz, Type::real(), mk::linadd(call(2, scale("k4", z)), call(1, scale("k5", z))));
  TermPtr f4 = mk::linlam(kz, Type::real(), mk::linadd(call(2, z), call(3, scale("k2", z))));
  TermPtr body = tuple4("f", lt);
  body = mk::let(Symbol("f4"), lt, f4, body);
  body = mk::let(Symbol("f3"), lt, f3, body);
  body = mk::let(Symbol("f2"), lt, f2, body);
  body = mk::let(Symbol("f1"), lt, f1, body);
  return constants(body);
}

TermPtr network_staged_term() {
  Type st = staged_type(cot());
  Type dt = Type::pair(Type::integer(), Type::lin(Type::real(), st));
  auto call = [&](int i, TermPtr arg) {
    return mk::builtin(Prim::StagedCall, {mk::var(Symbol("d" + std::to_string(i)), dt), arg});
  };
  auto plus = [](TermPtr a, TermPtr b) { return mk::builtin(Prim::PlusStaged, {a, b}); };
  TermPtr z = mk::linvar(kz);
  auto tagged = [](int id, TermPtr body) { return mk::pair(mk::integer(id), mk::linlam(kz, Type::real(), body)); };
  TermPtr d1 = tagged(1, mk::builtin(Prim::InitStaged, {f1_body()}));
  TermPtr d2 = tagged(2, plus(call(1, scale("k2", z)), call(1, scale("k3", z))));
  TermPtr d3 = tagged(3, plus(call(2, scale("k4", z)), call(1, scale("k5", z))));
  TermPtr d4 = tagged(4, plus(call(2, z), call(3, scale("k2", z))));
  TermPtr body = tuple4("d", dt);
  body = mk::let(Symbol("d4"), dt, d4, body);
  body = mk::let(Symbol("d3"), dt, d3, body);
  body = mk::let(Symbol("d2"), dt, d2, body);
  body = mk::let(Symbol("d1"), dt, d1, body);
  return constants(body);
}

NetworkRun run_network_naive() {
  Counters counters;
  Interpreter in(counters);
  in.set_cotangent_type(cot());
  typecheck_target(network_naive_term(), StageProfile::naive(cot()));
  auto fs = members(in.eval(network_naive_term()), false);
  NetworkRun r;
  r.cot = in.apply(fs[3], make_real(1.0));
  for (int i = 0; i < 4; ++i) r.invocations[i] = counters.invocations[serial_of(fs[i])];
  return r;
}

NetworkRun run_network_staged() {
  Counters counters;
  Interpreter in(counters);
  in.set_cotangent_type(cot());
  StagedRuntime rt(in, cot());
  in.set_runtime(&rt);
  typecheck_target(network_staged_term(), StageProfile::staged(cot()));
  auto fs = members(in.eval(network_staged_term()), true);
  NetworkRun r;
  r.cot = rt.resolve(rt.call(4, fs[3], 1.0));
  for (int i = 0; i < 4; ++i) r.invocations[i] = counters.invocations[serial_of(fs[i])];
  return r;
}

}  // namespace dualgrad::bench
