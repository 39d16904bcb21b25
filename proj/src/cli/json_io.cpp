// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/cli/json_io.hpp"

#include "dualgrad/error.hpp"

namespace dualgrad {

Json to_json(const Value& v) {
  if (auto* r = get_if<RealV>(v)) return r->v;
  if (auto* i = get_if<IntV>(v)) return i->v;
  if (get_if<UnitV>(v)) return nullptr;
  if (get_if<ZeroSumV>(v)) return nullptr;
  if (auto* p = get_if<PairV>(v)) return Json::array({to_json(p->a), to_json(p->b)});
  if (auto* l = get_if<InlV>(v)) return Json{{"inl", to_json(l->v)}};
  if (auto* r = get_if<InrV>(v)) return Json{{"inr", to_json(r->v)}};
  throw UsageError("value " + show(v) + " has no JSON form");
}

Value from_json(const Json& j, const Type& t) {
  auto fail = [&]() -> Value { throw UsageError("JSON " + j.dump() + " does not match type " + to_string(t)); };
  switch (t.kind()) {
    case TypeKind::Real:
      if (!j.is_number()) return fail();
      return make_real(j.get<double>());
    case TypeKind::Int:
      if (!j.is_number_integer()) return fail();
      return make_int(j.get<std::int64_t>());
    case TypeKind::Unit:
      if (!j.is_null()) return fail();
      return unit_value();
    case TypeKind::Pair:
      if (!j.is_array() || j.size() != 2) return fail();
      return make_pair(from_json(j[0], t.left()), from_json(j[1], t.right()));
    case TypeKind::Sum:
      if (!j.is_object() || j.size() != 1) return fail();
      if (j.contains("inl")) return make_inl(from_json(j["inl"], t.left()));
      if (j.contains("inr")) return make_inr(from_json(j["inr"], t.right()));
      return fail();
    default:
      throw UsageError("values of type " + to_string(t) + " cannot be given as JSON");
  }
}

Value parse_value(std::string_view text, const Type& t) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError("malformed JSON: " + std::string(text));
  return from_json(j, t);
}

Json to_json(const CounterReport& r, bool with_time) {
  Json j;
  j["forwardPrimops"] = r.forwardPrimops;
  j["backpropsCreated"] = r.backpropsCreated;
  j["invocationsPerIdMax"] = r.invocationsPerIdMax;
  j["resolveSteps"] = r.resolveSteps;
  j["scalarAdditions"] = r.scalarAdditions;
  j["mapOrArrayOps"] = r.mapOrArrayOps;
  j["zeroAllocationsOfTypeC"] = r.zeroAllocationsOfTypeC;
  if (with_time) j["wallTimeNanos"] = r.wallTimeNanos;
  j["deinterleaveAdditions"] = r.deinterleaveAdditions;
  j["backpropOps"] = r.backpropOps;
  j["contribNodes"] = r.contribNodes;
  j["idsConsumed"] = r.idsConsumed;
  j["inputScalars"] = r.inputScalars;
  j["nonFiniteResults"] = r.nonFiniteResults;
  j["forwardWork"] = r.forwardWork();
  j["reverseWork"] = r.reverseWork();
  j["inputBackpropInvocations"] = r.inputBackpropInvocations;
  return j;
}

}  // namespace dualgrad
