// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "dualgrad/bench/programs.hpp"
#include "dualgrad/error.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/parser.hpp"
#include "dualgrad/printer.hpp"
#include "support.hpp"

namespace dualgrad {
namespace {

using test::P;
using test::R;

const char* kMulSum = R"(\(x:(R,R)). let z:R = add(fst x, snd x) in mul(fst x, z))";

TEST(Parser, KeyExampleShape) {
  TermPtr t = parse_source(kMulSum);
  ASSERT_EQ(t->kind, TermKind::Lam);
  EXPECT_EQ(t->type, Type::pair(Type::real(), Type::real()));
  const Term& let = *t->kids[0];
  ASSERT_EQ(let.kind, TermKind::Let);
  EXPECT_EQ(let.kids[0]->kind, TermKind::PrimOp);
  EXPECT_EQ(let.kids[0]->op, Op::Add);
  EXPECT_EQ(let.kids[1]->op, Op::Mul);
}

TEST(Parser, Identity) {
  TermPtr t = parse_source(R"(\(x:R). x)");
  ASSERT_EQ(t->kind, TermKind::Lam);
  EXPECT_EQ(t->kids[0]->kind, TermKind::Var);
  EXPECT_EQ(t->kids[0]->name.str(), "x");
}

TEST(Parser, CaseRoundtrip) {
  TermPtr t = parse_source(R"(\(x:R). case inl(x) : R + () of { inl(a) -> a ; inr(b) -> 0.0 })");
  EXPECT_EQ(t->kids[0]->kind, TermKind::Case);
  TermPtr u = parse_source(print_term(t));
  EXPECT_TRUE(equal(*t, *u)) << print_term(t);
}

TEST(Parser, Errors) {
  EXPECT_THROW(parse_source(R"(\(x:R). frob(x))"), SyntaxError);
  EXPECT_THROW(parse_source(R"(\(x:R). add(x)"), SyntaxError);
  try {
    parse_source("\\(x:R).\n  let y : R = 1 in");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line, 2);
  }
  // Reals need a decimal point: an integer literal is an Int.
  EXPECT_THROW(load_program(R"(\(x:R). add(x, 1))"), TypeError);
}

TEST(Typecheck, Examples) {
  EXPECT_EQ(to_string(typecheck_source(parse_source(kMulSum))), "(R, R) -> R");
  EXPECT_EQ(typecheck_source(parse_source(R"(\(x:R). x)")), Type::fun(Type::real(), Type::real()));
  EXPECT_THROW(typecheck_source(parse_source("fst 3.0")), TypeError);
  EXPECT_THROW(typecheck_source(parse_source(R"(\(x:R). y)")), Error);
  EXPECT_THROW(typecheck_source(parse_source(R"(\(x:R). inl(x) : Int + R)")), TypeError);
}

TEST(Eval, Examples) {
  EvalResult r = eval_source(load_program(kMulSum), P(R(3), R(2)));
  EXPECT_EQ(as_real(r.value), 15.0);
  EXPECT_EQ(r.primops, 2u);
  r = eval_source(load_program(R"(\(x:R). x)"), R(7));
  EXPECT_EQ(as_real(r.value), 7.0);
  EXPECT_EQ(r.primops, 0u);
  r = eval_source(bench::corpus_entry("shared_sum").program, P(R(3), R(2)));
  EXPECT_EQ(as_real(r.value), 20.0);
}

TEST(Eval, NonFiniteIsFlagged) {
  EvalResult r = eval_source(load_program(R"(\(x:R). div(1.0, x))"), R(0));
  EXPECT_TRUE(std::isinf(as_real(r.value)));
  EXPECT_EQ(r.nonFinite, 1u);
}

TEST(Eval, CorpusShapesMatchTypes) {
  for (const auto& e : bench::corpus()) {
    Value y = eval_source(e.program, e.input).value;
    EXPECT_TRUE(matches(y, e.program.codomain)) << e.name;
  }
}

TEST(Primops, Examples) {
  double a[] = {3, 5};
  EXPECT_EQ(apply_primop("mul", a), 15.0);
  EXPECT_EQ(primop_partial("mul", 1, a), 5.0);
  double b[] = {3, 2};
  EXPECT_EQ(primop_partial("add", 2, b), 1.0);
  double c[] = {0.5};
  EXPECT_DOUBLE_EQ(primop_partial("sin", 1, c), std::cos(0.5));
  EXPECT_THROW(apply_primop("frob", c), Error);
  EXPECT_THROW(primop_partial("add", 3, b), Error);
}

// Every partial agrees with a central difference of the evaluation function.
TEST(Primops, PartialsMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.3, 2.5);
  const Op ops[] = {Op::Neg, Op::Sin, Op::Cos, Op::Exp, Op::Log, Op::Sqrt, Op::Recip,
                    Op::Add, Op::Sub, Op::Mul, Op::Div};
  for (Op op : ops) {
    int n = op_arity(op);
    for (int trial = 0; trial < 50; ++trial) {
      double x[2] = {d(rng), d(rng)};
      for (int i = 1; i <= n; ++i) {
        double h = 1e-5 * std::max(1.0, std::abs(x[i - 1]));
        double hi[2] = {x[0], x[1]}, lo[2] = {x[0], x[1]};
        hi[i - 1] += h;
        lo[i - 1] -= h;
        double fd = (apply_primop(op, std::span<const double>(hi, n)) - apply_primop(op, std::span<const double>(lo, n))) /
                    (hi[i - 1] - lo[i - 1]);
        double an = primop_partial(op, i, std::span<const double>(x, n));
        EXPECT_LE(rel_err(an, fd), 1e-6) << op_name(op) << " partial " << i << " at " << x[0] << "," << x[1];
      }
    }
  }
}

TEST(Printer, CorpusRoundtrip) {
  for (const auto& e : bench::corpus()) {
    TermPtr u = parse_source(print_term(e.program.term));
    EXPECT_TRUE(equal(*e.program.term, *u)) << e.name << "\n" << print_term(e.program.term);
  }
}

TEST(Printer, RealsKeepDecimalPoint) {
  EXPECT_EQ(format_real(1.0), "1.0");
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(-2.5e-7), "-2.5e-07");
}

// Random well-scoped terms print and parse back to the same tree.
class RandomTerms {
 public:
  explicit RandomTerms(std::uint64_t seed) : rng_(seed) {}

  TermPtr real_term(int depth, std::vector<std::pair<Symbol, Type>>& scope) {
    int pick = pick_(rng_) % (depth <= 0 ? 2 : 7);
    switch (pick) {
      case 0:
        if (!scope.empty()) {
          const auto& [s, t] = scope[rng_() % scope.size()];
          return mk::var(s, t);
        }
        [[fallthrough]];
      case 1: return mk::real(std::uniform_real_distribution<double>(-5, 5)(rng_));
      case 2: return mk::op(Op::Sin, {real_term(depth - 1, scope)});
      case 3: return mk::op(Op::Mul, {real_term(depth - 1, scope), real_term(depth - 1, scope)});
      case 4: {
        Symbol s("v" + std::to_string(fresh_++));
        TermPtr rhs = real_term(depth - 1, scope);
        scope.emplace_back(s, Type::real());
        TermPtr body = real_term(depth - 1, scope);
        scope.pop_back();
        return mk::let(s, Type::real(), rhs, body);
      }
      case 5:
        return mk::fst(mk::pair(real_term(depth - 1, scope), real_term(depth - 1, scope)));
      default: {
        Type sum = Type::sum(Type::real(), Type::unit());
        Symbol a("a" + std::to_string(fresh_++)), b("b" + std::to_string(fresh_++));
        TermPtr s = mk::inl(real_term(depth - 1, scope), sum);
        // The parser leaves case binders unannotated.
        scope.emplace_back(a, Type());
        TermPtr l = real_term(depth - 1, scope);
        scope.pop_back();
        return mk::case_of(s, a, l, b, mk::real(0.5));
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> pick_{0, 1000};
  int fresh_ = 0;
};

TEST(Printer, RandomRoundtrip) {
  RandomTerms gen(11);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::pair<Symbol, Type>> scope{{Symbol("x"), Type::real()}};
    TermPtr t = mk::lam(Symbol("x"), Type::real(), gen.real_term(4, scope));
    Program p = make_program(t);
    TermPtr u = parse_source(print_term(p.term));
    ASSERT_TRUE(equal(*p.term, *u)) << print_term(p.term);
  }
}

}  // namespace
}  // namespace dualgrad
