// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "dualgrad/ad/cayley.hpp"
#include "dualgrad/ad/monadic.hpp"
#include "dualgrad/ad/mutarray.hpp"
#include "dualgrad/ad/naive.hpp"
#include "dualgrad/ad/staged.hpp"
#include "dualgrad/bench/network.hpp"
#include "dualgrad/bench/programs.hpp"
#include "dualgrad/error.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/parser.hpp"
#include "dualgrad/printer.hpp"
#include "support.hpp"

namespace dualgrad {
namespace {

using test::grad_leaves;
using test::I;
using test::near_rel;
using test::P;
using test::R;

const StageSpec kNaive{Stage::Naive, Variant::TwoArray};
const StageSpec kStaged{Stage::Staged, Variant::TwoArray};
const StageSpec kCayley{Stage::Cayley, Variant::TwoArray};
const StageSpec kTwo{Stage::MutArray, Variant::TwoArray};
const StageSpec kSingle{Stage::MutArray, Variant::SingleArray};
const StageSpec kContrib{Stage::MutArray, Variant::Contrib};
const StageSpec kTape{Stage::MutArray, Variant::Tape};

const Program& prog(const std::string& name) { return bench::corpus_entry(name).program; }

// Gradient of the first output coordinate from forward mode, column by column.
std::vector<double> forward_row(const Program& p, const Value& x, std::size_t row) {
  Matrix j = jacobian_forward(p, x);
  return j.at(row);
}

// ---- stage selection -------------------------------------------------------

TEST(Stages, Parse) {
  EXPECT_EQ(parse_stage("tape"), kTape);
  EXPECT_EQ(parse_stage("mutarray", "contrib"), kContrib);
  EXPECT_EQ(parse_stage("mutarray"), kTwo);
  EXPECT_EQ(parse_stage("mutarray/single-array"), kSingle);
  EXPECT_EQ(parse_stage(to_string(kContrib)), kContrib);
  EXPECT_THROW(parse_stage("mutarray/tape", "tape"), UsageError);
  EXPECT_EQ(to_string(kSingle), "mutarray/single-array");
  EXPECT_THROW(parse_stage("fast"), UsageError);
  EXPECT_THROW(parse_stage("staged", "tape"), UsageError);
  EXPECT_EQ(all_stages().size(), 7u);
}

TEST(Stages, FunctionTypesUnsupported) {
  Program p = load_program(R"(\(x:R). \(y:R). mul(x, y))");
  for (StageSpec s : all_stages()) EXPECT_THROW(compile(p, s), UsageError) << to_string(s);
  Program q = load_program(R"(\(f:R -> R). f 1.0)");
  EXPECT_THROW(compile(q, kNaive), UsageError);
}

// ---- naive -----------------------------------------------------------------

TEST(Naive, KeyExample) {
  Value x = P(R(3), R(2));
  GradResult r = wrap_naive(prog("mul_sum"), x, R(1));
  EXPECT_EQ(as_real(r.y), 15.0);
  EXPECT_TRUE(near_rel(real_leaves(r.dx), forward_row(prog("mul_sum"), x, 0), 1e-12));
  EXPECT_EQ(real_leaves(r.dx), (std::vector<double>{8, 3}));
}

TEST(Naive, ScalarLiteralHasZeroBackprop) {
  TermPtr t = transform_naive(load_program(R"(\(x:R). 2.0)"));
  const Term& body = *t->kids[0];
  ASSERT_EQ(body.kind, TermKind::Pair);
  EXPECT_EQ(body.kids[0]->real, 2.0);
  ASSERT_EQ(body.kids[1]->kind, TermKind::LinLam);
  EXPECT_EQ(body.kids[1]->kids[0]->kind, TermKind::LinZero);
}

TEST(Naive, VariableKeepsTranslatedType) {
  TermPtr t = transform_naive(load_program(R"(\(x:R). x)"));
  const Term& v = *t->kids[0];
  ASSERT_EQ(v.kind, TermKind::Var);
  EXPECT_EQ(v.type, naive_type(Type::real(), Type::real()));
}

TEST(Naive, ConstantAndSharedSum) {
  GradResult c = wrap_naive(prog("constant"), R(3.5), R(1));
  EXPECT_EQ(as_real(c.y), 42.0);
  EXPECT_EQ(as_real(c.dx), 0.0);
  Value x = P(R(3), R(2));
  GradResult t = wrap_naive(prog("shared_sum"), x, R(1));
  EXPECT_EQ(as_real(t.y), 20.0);
  EXPECT_TRUE(near_rel(real_leaves(t.dx), forward_row(prog("shared_sum"), x, 0), 1e-12));
  EXPECT_EQ(real_leaves(t.dx), (std::vector<double>{9, 4}));
}

TEST(Naive, ChainBlowup) {
  for (int n : {4, 8, 12, 16}) {
    GradResult r = wrap(bench::gen_chain(n), kNaive, R(1), R(1));
    ASSERT_EQ(r.counters.inputBackpropInvocations.size(), 1u);
    EXPECT_EQ(r.counters.inputBackpropInvocations[0], std::uint64_t{1} << n) << n;
    EXPECT_EQ(as_real(r.dx), std::ldexp(1.0, n));
  }
}

TEST(Naive, SumCotangentMismatchIsAnError) {
  Program p = prog("sum_output");
  auto pb = differentiate(compile(p, kNaive), R(3));
  EXPECT_THROW((*pb)(make_inr(unit_value())), EvalError);
  EXPECT_EQ(as_real((*pb)(make_inl(R(1)))), 6.0);
}

TEST(Naive, SumInput) {
  Program p = prog("sum_input");
  GradResult l = wrap_naive(p, make_inl(R(2)), R(1));
  EXPECT_TRUE(identical(l.dx, make_inl(R(4))));
  GradResult r = wrap_naive(p, make_inr(R(0.5)), R(1));
  EXPECT_TRUE(identical(r.dx, make_inr(R(std::cos(0.5)))));
}

// ---- staged runtime ----------------------------------------------------------

struct StagedFixture : ::testing::Test {
  Counters k;
  Interpreter in{k};
  Type c = Type::pair(Type::real(), Type::pair(Type::real(), Type::real()));
  StagedRuntime rt{in, c};
  Value f = make_host([](Value) { return Value(); }, true);
  Value g = make_host([](Value) { return Value(); }, true);
};

TEST_F(StagedFixture, PlusDisjoint) {
  Value s = rt.plus(rt.call(3, f, 2.5), rt.call(5, g, 1.0));
  const StagedV& m = *get_if<StagedV>(s);
  ASSERT_EQ(m.calls.size(), 2u);
  EXPECT_EQ(m.calls.at(3).acc, 2.5);
  EXPECT_EQ(m.calls.at(5).acc, 1.0);
}

TEST_F(StagedFixture, PlusSameKeyFactors) {
  Value s = rt.plus(rt.call(3, f, 2.5), rt.call(3, f, 1.5));
  const StagedV& m = *get_if<StagedV>(s);
  ASSERT_EQ(m.calls.size(), 1u);
  EXPECT_EQ(m.calls.at(3).acc, 4.0);
  EXPECT_EQ(m.calls.at(3).f, f);
}

TEST_F(StagedFixture, ZeroIsIdentity) {
  Value s = rt.plus(rt.init(P(R(1), P(R(2), R(3)))), rt.call(7, f, 0.25));
  Value t = rt.plus(s, rt.zero());
  const StagedV& m = *get_if<StagedV>(t);
  EXPECT_EQ(real_leaves(m.cot), (std::vector<double>{1, 2, 3}));
  ASSERT_EQ(m.calls.size(), 1u);
  EXPECT_EQ(m.calls.at(7).acc, 0.25);
}

TEST_F(StagedFixture, ResolveEmptyReturnsCotangent) {
  EXPECT_EQ(real_leaves(rt.resolve(rt.init(P(R(1), P(R(2), R(3)))))), (std::vector<double>{1, 2, 3}));
}

TEST(StagedResolve, SingleInjector) {
  Counters k;
  Interpreter in(k);
  StagedRuntime rt(in, Type::real());
  Value inj = in.host_linear([&](Value z) { return rt.init(z); }, 0);
  EXPECT_EQ(as_real(rt.resolve(rt.call(0, inj, 2.0))), 2.0);
}

// resolve(a + b) = resolve(a) + resolve(b) on random stagings of the network.
TEST(StagedResolve, Linearity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    Counters k;
    Interpreter in(k);
    Type c = Type::pair(Type::real(), Type::pair(Type::real(), Type::real()));
    StagedRuntime rt(in, c);
    in.set_runtime(&rt);
    Value net = in.eval(bench::network_staged_term());
    std::vector<Value> fs;
    for (int i = 0; i < 3; ++i) {
      fs.push_back(as_pair(as_pair(net).a).b);
      net = as_pair(net).b;
    }
    fs.push_back(as_pair(net).b);
    auto random_staged = [&] {
      Value s = rt.init(P(R(d(rng)), P(R(d(rng)), R(d(rng)))));
      for (int i = 0; i < 4; ++i)
        if (rng() % 2) s = rt.plus(s, rt.call(i + 1, fs[i], d(rng)));
      return s;
    };
    Value a = random_staged(), b = random_staged();
    std::vector<double> ra = real_leaves(rt.resolve(a)), rb = real_leaves(rt.resolve(b));
    std::vector<double> rab = real_leaves(rt.resolve(rt.plus(a, b)));
    for (int i = 0; i < 3; ++i) EXPECT_LE(rel_err(rab[i], ra[i] + rb[i]), 1e-9);
  }
}

// ---- staged transform and wrapper --------------------------------------------

TEST(StagedTransform, ScalarLiteral) {
  Program p = load_program(R"(\(x:R). 2.0)");
  TermPtr t = transform_staged(p);
  // \x. \i. ((2.0, (i, linear \z. ZeroStaged())), iadd(i, 1))
  const Term& body = *t->kids[0]->kids[0];
  ASSERT_EQ(body.kind, TermKind::Pair);
  const Term& dual = *body.kids[0];
  EXPECT_EQ(dual.kids[0]->real, 2.0);
  const Term& slot = *dual.kids[1];
  EXPECT_EQ(slot.kids[0]->kind, TermKind::Var);
  EXPECT_EQ(slot.kids[1]->kind, TermKind::LinLam);
  EXPECT_EQ(slot.kids[1]->kids[0]->prim, Prim::ZeroStaged);
  EXPECT_EQ(body.kids[1]->op, Op::IAdd);
}

TEST(StagedTransform, ProductStagesBothPartials) {
  TermPtr t = transform_staged(load_program(R"(\(x:(R,R)). mul(fst x, snd x))"));
  // Find the primop backpropagator: a LinLam whose body adds two StagedCalls.
  std::function<const Term*(const Term&)> find = [&](const Term& u) -> const Term* {
    if (u.kind == TermKind::LinLam && u.kids[0]->kind == TermKind::Builtin && u.kids[0]->prim == Prim::PlusStaged)
      return &u;
    for (const auto& k : u.kids)
      if (const Term* r = find(*k)) return r;
    return nullptr;
  };
  const Term* bp = find(*t);
  ASSERT_NE(bp, nullptr);
  const Term& plus = *bp->kids[0];
  for (int i = 0; i < 2; ++i) {
    const Term& call = *plus.kids[i];
    EXPECT_EQ(call.prim, Prim::StagedCall);
    EXPECT_EQ(call.kids[1]->kind, TermKind::PartialOp);
    EXPECT_EQ(call.kids[1]->integer, i + 1);
    EXPECT_EQ(call.kids[1]->op, Op::Mul);
  }
}

TEST(StagedTransform, LetThreadsCounter) {
  Program p = load_program(R"(\(x:R). let a : R = sin(x) in let b : R = cos(a) in mul(a, b))");
  GradResult r = wrap_staged(p, R(0.3), R(1));
  EXPECT_EQ(r.counters.idsConsumed, 4u);  // input, sin, cos, mul
  EXPECT_EQ(r.counters.invocationsPerIdMax, 1u);
}

TEST(StagedWrap, Examples) {
  GradResult r = wrap_staged(prog("mul_sum"), P(R(3), R(2)), R(1));
  EXPECT_EQ(as_real(r.y), 15.0);
  EXPECT_EQ(real_leaves(r.dx), (std::vector<double>{8, 3}));
  GradResult c = wrap_staged(bench::gen_chain(16), R(1), R(1));
  EXPECT_EQ(c.counters.inputBackpropInvocations, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(as_real(c.dx), 65536.0);
  GradResult d = wrap_staged(prog("dead_input"), P(R(2), R(5)), R(1));
  EXPECT_EQ(d.counters.inputBackpropInvocations, (std::vector<std::uint64_t>{1, 0}));
  EXPECT_EQ(real_leaves(d.dx), (std::vector<double>{3, 0}));
}

TEST(StagedWrap, MapOpsGrowNearLinearly) {
  std::uint64_t prev = 0;
  for (int n : {1024, 2048, 4096}) {
    GradResult r = wrap(bench::gen_chain(n), kStaged, R(0), R(1));
    if (prev) {
      EXPECT_LE(static_cast<double>(r.counters.mapOrArrayOps) / prev, 2.5) << n;
    }
    prev = r.counters.mapOrArrayOps;
  }
}

// ---- cayley ----------------------------------------------------------------

TEST(Cayley, StagedCallAccumulates) {
  Counters k;
  Interpreter in(k);
  CayleyRuntime rt(in, Type::real());
  Value f = make_host([](Value v) { return v; }, true);
  Value out = rt.run_zero([&](Value s) {
    s = rt.apply_updater(rt.staged_call(2, f, 2.5), std::move(s));
    return rt.apply_updater(rt.staged_call(2, f, 1.5), std::move(s));
  });
  const StagedV& m = *get_if<StagedV>(out);
  ASSERT_EQ(m.calls.size(), 1u);
  EXPECT_EQ(m.calls.at(2).acc, 4.0);
  EXPECT_EQ(k.zeroAllocationsOfTypeC, 0u);  // no cotangent type registered with the interpreter
}

TEST(Cayley, RunZeroOfIdentity) {
  Counters k;
  Interpreter in(k);
  Type c = Type::pair(Type::real(), Type::real());
  in.set_cotangent_type(c);
  CayleyRuntime rt(in, c);
  Value r = rt.run_zero([&](Value s) { return rt.resolve(rt.apply_updater(rt.identity(), std::move(s))); });
  EXPECT_EQ(real_leaves(r), (std::vector<double>{0, 0}));
  EXPECT_EQ(k.zeroAllocationsOfTypeC, 1u);
}

TEST(Cayley, TransformUsesIdentityAndComposition) {
  TermPtr t = transform_cayley(load_program(R"(\(x:(R,R)). add(mul(fst x, snd x), 1.0))"));
  std::function<void(const Term&, int&, int&, int&)> walk = [&](const Term& u, int& id, int& comp, int& zero) {
    if (u.kind == TermKind::Builtin) {
      id += u.prim == Prim::SId;
      comp += u.prim == Prim::SCompose;
      zero += u.prim == Prim::ZeroStaged || u.prim == Prim::PlusStaged;
    }
    for (const auto& k : u.kids) walk(*k, id, comp, zero);
  };
  int id = 0, comp = 0, zero = 0;
  walk(*t, id, comp, zero);
  EXPECT_EQ(id, 1);
  EXPECT_EQ(comp, 2);
  EXPECT_EQ(zero, 0);
}

TEST(Cayley, Examples) {
  GradResult r = wrap_cayley(prog("mul_sum"), P(R(3), R(2)), R(1));
  EXPECT_EQ(as_real(r.y), 15.0);
  EXPECT_EQ(real_leaves(r.dx), (std::vector<double>{8, 3}));
  EXPECT_EQ(as_real(wrap_cayley(prog("identity"), R(7), R(1)).dx), 1.0);
  GradResult t = wrap_cayley(prog("shared_sum"), P(R(3), R(2)), R(1));
  EXPECT_EQ(as_real(t.y), 20.0);
  EXPECT_EQ(real_leaves(t.dx), (std::vector<double>{9, 4}));
}

TEST(Cayley, OneZeroPerRun) {
  for (const auto& e : bench::corpus()) {
    auto pb = differentiate(compile(e.program, kCayley), e.input);
    for (int i = 0; i < 2; ++i) {
      std::uint64_t before = pb->counters().zeroAllocationsOfTypeC;
      std::vector<double> ones(count_reals(pb->primal()), 1.0);
      (*pb)(cotangent_with_reals(pb->primal(), ones));
      EXPECT_EQ(pb->counters().zeroAllocationsOfTypeC - before, 1u) << e.name;
    }
    GradResult s = wrap(e.program, kStaged, e.input,
                        cotangent_with_reals(pb->primal(), std::vector<double>(count_reals(pb->primal()), 1.0)));
    if (e.name == "chain10") {
      EXPECT_GT(s.counters.zeroAllocationsOfTypeC, 1u);
    }
  }
}

TEST(Cayley, UpdatersCommute) {
  Counters k;
  Interpreter in(k);
  Type c = Type::pair(Type::real(), Type::real());
  CayleyRuntime rt(in, c);
  Value f = make_host([](Value v) { return v; }, true);
  Value g = make_host([](Value v) { return v; }, true);
  std::vector<Value> us = {rt.staged_call(1, f, 0.5), rt.staged_call(4, g, -2.0), rt.staged_call(1, f, 3.0),
                           rt.map_cot([&](Value v) { return in.add(v, P(R(1), R(2))); })};
  auto run = [&](std::vector<int> order) {
    Value u = rt.identity();
    for (int i : order) u = rt.compose(u, us[i]);
    return rt.run_zero([&](Value s) { return rt.apply_updater(u, std::move(s)); });
  };
  Value a = run({0, 1, 2, 3}), b = run({3, 2, 1, 0});
  const StagedV& ma = *get_if<StagedV>(a);
  const StagedV& mb = *get_if<StagedV>(b);
  ASSERT_EQ(ma.calls.size(), mb.calls.size());
  for (const auto& [id, call] : ma.calls) EXPECT_EQ(call.acc, mb.calls.at(id).acc) << id;
  EXPECT_EQ(ma.calls.at(1).acc, 3.5);
  EXPECT_EQ(real_leaves(ma.cot), real_leaves(mb.cot));
}

// ---- array state -------------------------------------------------------------

TEST(ArrayState, Alloc) {
  Counters k;
  Interpreter in(k);
  ArrayRuntime rt(in, Variant::TwoArray);
  Value s = rt.state_alloc(3, 10);
  const ArrayState& a = *get_if<StateV>(s)->arr;
  EXPECT_EQ(a.cot, std::vector<double>(3, 0.0));
  ASSERT_EQ(a.stage.size(), 10u);
  for (const auto& slot : a.stage) EXPECT_FALSE(slot.touched);
  Value e = rt.state_alloc(0, 1);
  EXPECT_TRUE(get_if<StateV>(e)->arr->cot.empty());
  EXPECT_EQ(get_if<StateV>(e)->arr->stage.size(), 1u);
  EXPECT_EQ(rt.resolve(s, 10), std::vector<double>(3, 0.0));
}

TEST(ArrayState, StagedCallAccumulates) {
  Counters k;
  Interpreter in(k);
  ArrayRuntime rt(in, Variant::TwoArray);
  Value f = make_host([](Value v) { return v; }, true);
  Value s = rt.state_alloc(1, 5);
  s = rt.staged_call(s, 3, f, 2.5);
  s = rt.staged_call(s, 3, f, 1.5);
  EXPECT_EQ(get_if<StateV>(s)->arr->stage[3].acc, 4.0);
  s = rt.input_cot(s, 0, 0.0);
  EXPECT_EQ(get_if<StateV>(s)->arr->cot[0], 0.0);
  EXPECT_THROW(rt.staged_call(rt.state_alloc(1, 5), 5, f, 1.0), EvalError);
  EXPECT_THROW(rt.staged_call(rt.state_alloc(1, 5), 0, f, 1.0), EvalError);
  Value s2 = rt.staged_call(s, 3, f, 1.0);
  EXPECT_THROW(rt.staged_call(s, 3, f, 1.0), InvariantViolation);
  EXPECT_EQ(get_if<StateV>(s2)->arr->stage[3].acc, 5.0);
}

TEST(ArrayState, SingleArrayDropsCotangentArray) {
  GradResult r = wrap(prog("mul_sum"), kSingle, P(R(3), R(2)), R(1));
  EXPECT_EQ(real_leaves(r.dx), (std::vector<double>{8, 3}));
  Counters k;
  Interpreter in(k);
  ArrayRuntime rt(in, Variant::SingleArray);
  EXPECT_TRUE(get_if<StateV>(rt.state_alloc(4, 2))->arr->cot.empty());
}

TEST(ArrayState, ChainResolvesEachIdOnce) {
  const int n = 4096;
  for (StageSpec s : {kTwo, kContrib, kTape}) {
    GradResult r = wrap(bench::gen_chain(n), s, R(0), R(1));
    EXPECT_EQ(r.counters.resolveSteps, static_cast<std::uint64_t>(n + 1)) << to_string(s);
    EXPECT_EQ(r.counters.invocationsPerIdMax, 1u);
  }
  GradResult t = wrap(bench::gen_chain(n), kTape, R(0), R(1));
  EXPECT_EQ(t.counters.backpropOps, static_cast<std::uint64_t>(2 * n));
}

TEST(ArrayWrap, KeyExampleFrozenArray) {
  Counters k;
  Interpreter in(k);
  ArrayRuntime rt(in, Variant::TwoArray);
  Compiled c = compile(prog("mul_sum"), kTwo);
  GradResult r = wrap(c, P(R(3), R(2)), R(1));
  EXPECT_EQ(as_real(r.y), 15.0);
  EXPECT_EQ(real_leaves(r.dx), (std::vector<double>{8, 3}));
}

TEST(ArrayWrap, RotateJacobian) {
  const double frozen[3][7] = {{0.69, -0.5, 0.42, 1.8, 2.8, 5.4, -3.6},
                               {0.58, 0.75, -0.06, 3.6, -5.4, 2.8, 1.8},
                               {-0.3, 0.3, 0.85, 5.4, 3.6, -1.8, 2.8}};
  Program p = prog("rotate_vec_by_quat");
  Value x = bench::corpus_entry("rotate_vec_by_quat").input;
  FiniteDiff fd = jacobian_fd(p, x);
  for (Variant v : {Variant::TwoArray, Variant::SingleArray, Variant::Contrib, Variant::Tape}) {
    for (int row = 0; row < 3; ++row) {
      std::vector<double> e(3, 0.0);
      e[row] = 1.0;
      GradResult r = wrap_mutarray(p, x, cotangent_with_reals(eval_source(p, x).value, e), v);
      std::vector<double> g = real_leaves(r.dx);
      EXPECT_TRUE(near_rel(g, fd.jacobian[row], 1e-4)) << row;
      EXPECT_TRUE(near_rel(g, std::vector<double>(frozen[row], frozen[row] + 7), 1e-9)) << row;
    }
  }
}

TEST(ArrayWrap, Coproduct) {
  for (Variant v : {Variant::TwoArray, Variant::SingleArray, Variant::Contrib, Variant::Tape})
    EXPECT_EQ(as_real(wrap_mutarray(prog("coproduct"), R(3), R(1), v).dx), 6.0);
}

TEST(ArrayWrap, IntPositionsEchoPrimal) {
  GradResult r = wrap(prog("letrec_pow"), kTape, P(I(5), R(1.3)), R(1));
  EXPECT_EQ(as_int(as_pair(r.dx).a), 5);
  EXPECT_LE(rel_err(as_real(as_pair(r.dx).b), 5 * std::pow(1.3, 4)), 1e-12);
  GradResult n = wrap(prog("letrec_pow"), kNaive, P(I(5), R(1.3)), R(1));
  EXPECT_TRUE(get_if<UnitV>(as_pair(n.dx).a));
}

TEST(ArrayWrap, ContribSharing) {
  for (int n : {8, 64, 512}) {
    for (StageSpec s : {kContrib, kTape}) {
      GradResult r = wrap(bench::gen_chain(n), s, R(1), R(1));
      EXPECT_EQ(r.counters.contribNodes, r.counters.idsConsumed) << n;
      EXPECT_EQ(r.counters.contribNodes, static_cast<std::uint64_t>(n + 1));
    }
  }
  for (const auto& e : bench::corpus()) {
    std::vector<double> ones(count_reals(eval_source(e.program, e.input).value), 1.0);
    GradResult r = wrap(e.program, kContrib, e.input, cotangent_with_reals(eval_source(e.program, e.input).value, ones));
    EXPECT_EQ(r.counters.contribNodes, r.counters.idsConsumed) << e.name;
  }
}

TEST(ArrayWrap, RepeatRunsIdentical) {
  for (const auto& e : bench::corpus()) {
    Value y = eval_source(e.program, e.input).value;
    Value dy = cotangent_with_reals(y, std::vector<double>(count_reals(y), 1.0));
    for (Variant v : {Variant::TwoArray, Variant::SingleArray, Variant::Contrib, Variant::Tape}) {
      GradResult a = wrap_mutarray(e.program, e.input, dy, v);
      GradResult b = wrap_mutarray(e.program, e.input, dy, v);
      EXPECT_TRUE(identical(a.y, y)) << e.name;
      EXPECT_TRUE(identical(a.dx, b.dx)) << e.name;
    }
  }
}

// ---- cross-stage properties ------------------------------------------------------

TEST(CrossStage, AgreeOnCorpus) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  for (const auto& e : bench::corpus()) {
    Value y = eval_source(e.program, e.input).value;
    std::vector<double> w(count_reals(y));
    for (double& v : w) v = d(rng);
    Value dy = cotangent_with_reals(y, w);
    std::vector<double> ref = grad_leaves(e.program, kNaive, e.input, dy);
    for (StageSpec s : all_stages()) {
      GradResult r = wrap(e.program, s, e.input, dy);
      EXPECT_TRUE(identical(r.y, y)) << e.name << " " << to_string(s);
      EXPECT_TRUE(near_rel(real_leaves_at(e.input, r.dx), ref, 1e-9)) << e.name << " " << to_string(s);
      if (s.stage != Stage::Naive) {
        EXPECT_LE(r.counters.invocationsPerIdMax, 1u) << e.name << " " << to_string(s);
      }
    }
  }
}

TEST(CrossStage, Linearity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-2, 2);
  auto all = bench::corpus();
  for (int trial = 0; trial < 40; ++trial) {
    const auto& e = all[rng() % all.size()];
    Value y = eval_source(e.program, e.input).value;
    std::size_t m = count_reals(y);
    std::vector<double> w1(m), w2(m), w12(m);
    double a = d(rng), b = d(rng);
    for (std::size_t i = 0; i < m; ++i) {
      w1[i] = d(rng);
      w2[i] = d(rng);
      w12[i] = a * w1[i] + b * w2[i];
    }
    for (StageSpec s : all_stages()) {
      auto pb = differentiate(compile(e.program, s), e.input);
      std::vector<double> g1 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(y, w1)));
      std::vector<double> g2 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(y, w2)));
      std::vector<double> g12 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(y, w12)));
      for (std::size_t i = 0; i < g1.size(); ++i)
        EXPECT_LE(rel_err(g12[i], a * g1[i] + b * g2[i]), 1e-9) << e.name << " " << to_string(s);
    }
  }
}

TEST(CrossStage, EveryTargetTypechecks) {
  for (const auto& e : bench::corpus())
    for (StageSpec s : all_stages()) {
      Compiled c = compile(e.program, s, false);
      EXPECT_EQ(typecheck_target(c.target, c.profile), c.target_type) << e.name << " " << to_string(s);
    }
}

TEST(CrossStage, DeinterleaveAdditions) {
  Program p = prog("rotate_vec_by_quat");
  Value x = bench::corpus_entry("rotate_vec_by_quat").input;
  for (StageSpec s : all_stages()) {
    GradResult r = wrap(p, s, x, P(R(1), P(R(1), R(1))));
    EXPECT_EQ(r.counters.deinterleaveAdditions, 2u) << to_string(s);
  }
}

TEST(CrossStage, UntaggedTopLevelRunsOnce) {
  // A pullback may be applied many times; each application is a fresh run.
  auto pb = differentiate(compile(prog("mul_sum"), kStaged), P(R(3), R(2)));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(real_leaves((*pb)(R(1))), (std::vector<double>{8, 3}));
}

}  // namespace
}  // namespace dualgrad
