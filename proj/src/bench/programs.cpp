// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/bench/programs.hpp"

#include <map>

#include "dualgrad/error.hpp"
#include "dualgrad/parser.hpp"
#include "dualgrad/printer.hpp"

namespace dualgrad::bench {
namespace {

std::string vec_type_text(int n, const std::string& elem) {
  std::string t = elem;
  for (int i = 1; i < n; ++i) t = "(" + elem + ", " + t + ")";
  return t;
}

// Element i of an n-vector held in variable v.
std::string elem(const std::string& v, int i, int n) {
  std::string e = v;
  for (int k = 0; k < i; ++k) e = "snd " + e;
  return i < n - 1 ? "fst " + e : e;
}

std::string dot_text(const std::string& u, const std::string& v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    std::string term = "mul(" + elem(u, i, n) + ", " + elem(v, i, n) + ")";
    s = i == 0 ? term : "add(" + s + ", " + term + ")";
  }
  return s;
}

void need_positive(int n, const char* what) {
  if (n < 1) throw UsageError(std::string(what) + " needs a size of at least 1");
}

}  // namespace

Type vec_type(int n) { return parse_type(vec_type_text(n, "R")); }

Value vec_value(const std::vector<double>& xs) {
  if (xs.empty()) throw UsageError("empty vector");
  Value v = make_real(xs.back());
  for (std::size_t i = xs.size() - 1; i-- > 0;) v = make_pair(make_real(xs[i]), v);
  return v;
}

Program gen_chain(int n) {
  need_positive(n, "gen_chain");
  std::string s = "\\(x0 : R).\n";
  for (int i = 1; i <= n; ++i)
    s += "let x" + std::to_string(i) + " : R = add(x" + std::to_string(i - 1) + ", x" + std::to_string(i - 1) + ") in\n";
  s += "x" + std::to_string(n) + "\n";
  return load_program(s);
}

Program gen_dot(int n) {
  need_positive(n, "gen_dot");
  std::string v = vec_type_text(n, "R");
  std::string s = "\\(p : (" + v + ", " + v + ")).\nlet u : " + v + " = fst p in\nlet v : " + v + " = snd p in\n" +
                  dot_text("u", "v", n) + "\n";
  return load_program(s);
}

Program gen_matvec(int k) {
  need_positive(k, "gen_matvec");
  std::string v = vec_type_text(k, "R");
  std::string m = vec_type_text(k, v);
  std::string s = "\\(p : (" + m + ", " + v + ")).\nlet m : " + m + " = fst p in\nlet v : " + v + " = snd p in\n";
  std::string sum;
  for (int i = 0; i < k; ++i) {
    std::string r = "r" + std::to_string(i);
    s += "let " + r + " : " + v + " = " + elem("m", i, k) + " in\n";
    std::string d = dot_text(r, "v", k);
    sum = i == 0 ? d : "add(" + sum + ", " + d + ")";
  }
  return load_program(s + sum + "\n");
}

namespace {

const char* kRotate = R"(\(p : ((R, (R, R)), (R, (R, (R, R))))).
let v : (R, (R, R)) = fst p in
let q : (R, (R, (R, R))) = snd p in
let s : R = fst q in
let u : (R, (R, R)) = snd q in
let vx : R = fst v in let vy : R = fst snd v in let vz : R = snd snd v in
let ux : R = fst u in let uy : R = fst snd u in let uz : R = snd snd u in
let uu : R = add(add(mul(ux, ux), mul(uy, uy)), mul(uz, uz)) in
let uv : R = add(add(mul(ux, vx), mul(uy, vy)), mul(uz, vz)) in
let k1 : R = sub(mul(s, s), uu) in
let k2 : R = mul(2.0, uv) in
let k3 : R = mul(2.0, s) in
let cx : R = sub(mul(uy, vz), mul(uz, vy)) in
let cy : R = sub(mul(uz, vx), mul(ux, vz)) in
let cz : R = sub(mul(ux, vy), mul(uy, vx)) in
( add(add(mul(k1, vx), mul(k2, ux)), mul(k3, cx))
, ( add(add(mul(k1, vy), mul(k2, uy)), mul(k3, cy))
  , add(add(mul(k1, vz), mul(k2, uz)), mul(k3, cz)) ) )
)";

struct Text {
  const char* name;
  const char* source;
};

const Text kCorpus[] = {
    {"mul_sum", R"(\(x : (R, R)). let z : R = add(fst x, snd x) in mul(fst x, z))"},
    {"shared_sum", R"(\(x : (R, R)). let s : R = add(fst x, snd x) in add(mul(s, fst x), s))"},
    {"coproduct", R"(\(x : R). case inl(x) : R + () of { inl(a) -> mul(a, a) ; inr(b) -> 1.0 })"},
    {"sum_input", R"(\(s : R + R). case s of { inl(a) -> mul(a, a) ; inr(b) -> sin(b) })"},
    {"sum_output", R"(\(x : R). inl(mul(x, x)) : R + ())"},
    {"letrec_pow", R"(\(p : (Int, R)).
letrec pow : (Int, R) -> R = \(a : (Int, R)).
  ifzero fst a then 1.0 else mul(snd a, pow (isub(fst a, 1), snd a))
in pow p)"},
    {"dead_input", R"(\(x : (R, R)). mul(fst x, 3.0))"},
    {"constant", R"(\(x : R). 42.0)"},
    {"identity", R"(\(x : R). x)"},
    {"higher_order", R"(\(x : R). let f : R -> R = \(y : R). mul(y, x) in add(f (sin(x)), f x))"},
    {"unary_mix", R"(\(x : R). sub(div(exp(sin(x)), add(sqrt(add(x, 2.0)), log(add(x, 3.0)))), mul(neg(cos(x)), recip(add(x, 2.0)))))"},
};

}  // namespace

Program prog_rotate_vec_by_quat() { return load_program(kRotate); }

std::string source_of(const Program& p) { return print_term(p.term) + "\n"; }

std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> out;
  auto add = [&](std::string name, std::string src, Value x) {
    Program p = load_program(src);
    out.push_back(CorpusEntry{std::move(name), std::move(src), std::move(p), std::move(x)});
  };
  auto pair = [](double a, double b) { return make_pair(make_real(a), make_real(b)); };
  std::map<std::string, Value> inputs = {
      {"mul_sum", pair(3.0, 2.0)},
      {"shared_sum", pair(3.0, 2.0)},
      {"coproduct", make_real(3.0)},
      {"sum_input", make_inl(make_real(2.0))},
      {"sum_output", make_real(3.0)},
      {"letrec_pow", make_pair(make_int(5), make_real(1.3))},
      {"dead_input", pair(2.0, 5.0)},
      {"constant", make_real(1.0)},
      {"identity", make_real(7.0)},
      {"higher_order", make_real(0.6)},
      {"unary_mix", make_real(0.7)},
  };
  for (const Text& t : kCorpus) add(t.name, t.source, inputs.at(t.name));

  auto generated = [&](std::string name, Program p, Value x) {
    std::string src = source_of(p);
    out.push_back(CorpusEntry{std::move(name), std::move(src), std::move(p), std::move(x)});
  };
  generated("chain10", gen_chain(10), make_real(1.0));
  {
    std::vector<double> a, b;
    for (int i = 0; i < 16; ++i) {
      a.push_back(0.5 + 0.25 * i);
      b.push_back(1.5 - 0.125 * i);
    }
    generated("dot16", gen_dot(16), make_pair(vec_value(a), vec_value(b)));
  }
  {
    std::vector<Value> rows;
    std::vector<double> v;
    for (int i = 0; i < 8; ++i) {
      std::vector<double> r;
      for (int j = 0; j < 8; ++j) r.push_back(0.1 * (i + 1) - 0.05 * j);
      rows.push_back(vec_value(r));
      v.push_back(1.0 + 0.5 * i);
    }
    Value m = rows.back();
    for (std::size_t i = rows.size() - 1; i-- > 0;) m = make_pair(rows[i], m);
    generated("matvec8", gen_matvec(8), make_pair(m, vec_value(v)));
  }
  {
    Value vec = make_pair(make_real(1.0), make_pair(make_real(2.0), make_real(3.0)));
    Value quat = make_pair(make_real(0.9), make_pair(make_real(0.1), make_pair(make_real(0.2), make_real(0.3))));
    out.push_back(CorpusEntry{"rotate_vec_by_quat", kRotate, prog_rotate_vec_by_quat(), make_pair(vec, quat)});
  }
  return out;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  static const std::vector<CorpusEntry> all = corpus();
  for (const auto& e : all)
    if (e.name == name) return e;
  throw UsageError("no corpus program named " + name);
}

Value default_input(const Type& t) {
  switch (t.kind()) {
    case TypeKind::Real: return make_real(1.0);
    case TypeKind::Int: return make_int(1);
    case TypeKind::Unit: return unit_value();
    case TypeKind::Pair: return make_pair(default_input(t.left()), default_input(t.right()));
    case TypeKind::Sum: return make_inl(default_input(t.left()));
    default: throw UsageError("no default value for type " + to_string(t));
  }
}

}  // namespace dualgrad::bench
