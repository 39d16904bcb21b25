// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "dualgrad/ad.hpp"
#include "dualgrad/big_stack.hpp"
#include "dualgrad/bench/network.hpp"
#include "dualgrad/bench/programs.hpp"
#include "dualgrad/cli/cli.hpp"
#include "dualgrad/cli/json_io.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/oracle.hpp"
#include "dualgrad/typecheck.hpp"

namespace dualgrad {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string why;
  void fail(const std::string& reason) {
    if (why.size() < 400) why += reason;
    pass = false;
  }
};

std::vector<StageSpec> non_naive() {
  std::vector<StageSpec> v;
  for (StageSpec s : all_stages())
    if (s.stage != Stage::Naive) v.push_back(s);
  return v;
}

Value ones_like(const Value& y) { return cotangent_with_reals(y, std::vector<double>(count_reals(y), 1.0)); }

// 1. Every stage against finite differences and forward mode, for every output basis vector.
Outcome gradient_correctness() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  double worst_fd = 0, worst_fw = 0;
  const auto& corpus = bench::corpus();
  for (const auto& e : corpus)
    for (StageSpec s : all_stages()) {
      GradCheckReport r = grad_check(e.program, e.input, s, 1e-4, 1e-9);
      worst_fd = std::max(worst_fd, r.max_err_fd);
      worst_fw = std::max(worst_fw, r.max_err_forward);
      if (!r.pass) o.fail(e.name + " " + to_string(s) + ": " + r.message + "; ");
    }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (corpus.size() < 12) o.fail("corpus has fewer than 12 programs; ");
  if (secs >= 10.0) o.fail("took " + std::to_string(secs) + " s; ");
  o.detail << corpus.size() << " programs x " << all_stages().size() << " stages, max rel err fd " << worst_fd
           << " forward " << worst_fw << ", " << secs << " s";
  return o;
}

// 2. Naive input-backprop invocations on the doubling chain.
Outcome naive_blowup() {
  Outcome o;
  for (int n : {4, 8, 12, 16}) {
    GradResult r = wrap(bench::gen_chain(n), StageSpec{Stage::Naive, Variant::TwoArray}, make_real(1), make_real(1));
    std::uint64_t got = r.counters.inputBackpropInvocations.at(0);
    o.detail << "n=" << n << ":" << got << " ";
    if (got != (std::uint64_t{1} << n)) o.fail("n=" + std::to_string(n) + " gave " + std::to_string(got) + "; ");
  }
  return o;
}

// 3. Each backpropagator runs at most once; dead inputs are never reached.
Outcome at_most_once() {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& e : bench::corpus())
    for (StageSpec s : non_naive()) {
      Value y = eval_source(e.program, e.input).value;
      GradResult r = wrap(e.program, s, e.input, ones_like(y));
      ++runs;
      // The constant program reaches no input, so its maximum may be 0.
      bool constant = e.name == "constant";
      if (r.counters.invocationsPerIdMax > 1 || (!constant && r.counters.invocationsPerIdMax != 1))
        o.fail(e.name + " " + to_string(s) + ": invocationsPerIdMax " + std::to_string(r.counters.invocationsPerIdMax) +
               "; ");
      if (e.name == "dead_input" && r.counters.inputBackpropInvocations.at(1) != 0)
        o.fail(to_string(s) + ": dead input reached; ");
      if (constant && r.counters.inputBackpropInvocations.at(0) != 0) o.fail(to_string(s) + ": constant reached input; ");
    }
  o.detail << runs << " runs";
  return o;
}

// 4. Reverse work proportional to forward work, and linear wall time, for contrib and tape.
Outcome constant_overhead() {
  Outcome o;
  const std::vector<int> sizes = {1024, 2048, 4096, 8192, 16384};
  for (Variant v : {Variant::Contrib, Variant::Tape}) {
    StageSpec s{Stage::MutArray, v};
    std::vector<Compiled> progs;
    for (int n : sizes) progs.push_back(compile(bench::gen_chain(n), s));
    // Rounds visit every size so background load falls on all sizes alike;
    // the fastest round per size is kept.
    std::vector<double> ratios(sizes.size()), times(sizes.size(), 0.0);
    for (int round = 0; round < 16; ++round) {
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto pb = differentiate(progs[i], make_real(1));
        (*pb)(make_real(1));
        CounterReport rep = pb->report();
        if (round == 0) continue;  // warm-up
        double t = static_cast<double>(rep.wallTimeNanos);
        if (times[i] == 0.0 || t < times[i]) times[i] = t;
        ratios[i] = static_cast<double>(rep.reverseWork()) / static_cast<double>(rep.forwardWork());
      }
    }
    auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    double spread = (*hi - *lo) / *lo;
    o.detail << to_string(s) << " work ratio " << *lo << ".." << *hi << " doubling";
    if (spread >= 0.25) o.fail(to_string(s) + ": work ratio varies by " + std::to_string(spread) + "; ");
    for (std::size_t i = sizes.size() - 2; i < sizes.size(); ++i) {
      double d = times[i] / times[i - 1];
      o.detail << " " << d;
      if (d < 1.5 || d > 3.0) o.fail(to_string(s) + ": doubling ratio " + std::to_string(d) + "; ");
    }
    o.detail << "; ";
  }
  return o;
}

// 5. One zero cotangent per cayley run; deinterleave adds outputs - 1 scalars.
Outcome cayley_fix() {
  Outcome o;
  StageSpec s{Stage::Cayley, Variant::TwoArray};
  for (const auto& e : bench::corpus()) {
    Value y = eval_source(e.program, e.input).value;
    GradResult r = wrap(e.program, s, e.input, ones_like(y));
    if (r.counters.zeroAllocationsOfTypeC != 1)
      o.fail(e.name + ": " + std::to_string(r.counters.zeroAllocationsOfTypeC) + " zero allocations; ");
    std::size_t m = count_reals(y);
    if (m > 1 && r.counters.deinterleaveAdditions != m - 1)
      o.fail(e.name + ": " + std::to_string(r.counters.deinterleaveAdditions) + " deinterleave additions for " +
             std::to_string(m) + " outputs; ");
  }
  Value x = bench::corpus_entry("rotate_vec_by_quat").input;
  GradResult r = wrap(bench::corpus_entry("rotate_vec_by_quat").program, s, x, ones_like(eval_source(
      bench::corpus_entry("rotate_vec_by_quat").program, x).value));
  o.detail << "rotate: zero allocations " << r.counters.zeroAllocationsOfTypeC << ", deinterleave additions "
           << r.counters.deinterleaveAdditions;
  return o;
}

// 6. grad(dy1) + grad(dy2) = grad(dy1 + dy2).
Outcome linearity() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(-3, 3);
  const auto& corpus = bench::corpus();
  double worst = 0;
  for (StageSpec s : all_stages()) {
    for (int t = 0; t < 100; ++t) {
      const auto& e = corpus[rng() % corpus.size()];
      auto pb = differentiate(compile(e.program, s), e.input);
      std::size_t m = count_reals(pb->primal());
      std::vector<double> w1(m), w2(m), w12(m);
      for (std::size_t i = 0; i < m; ++i) {
        w1[i] = d(rng);
        w2[i] = d(rng);
        w12[i] = w1[i] + w2[i];
      }
      std::vector<double> g1 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(pb->primal(), w1)));
      std::vector<double> g2 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(pb->primal(), w2)));
      std::vector<double> g12 = real_leaves_at(e.input, (*pb)(cotangent_with_reals(pb->primal(), w12)));
      for (std::size_t i = 0; i < g1.size(); ++i) {
        double err = rel_err(g1[i] + g2[i], g12[i]);
        worst = std::max(worst, err);
        if (!(err <= 1e-9)) o.fail(e.name + " " + to_string(s) + "; ");
      }
    }
  }
  o.detail << "700 triples, max rel err " << worst;
  return o;
}

double expand(int f, double z, std::array<std::uint64_t, 4>& calls) {
  ++calls[f - 1];
  switch (f) {
    case 1: return z;
    case 2: return expand(1, 2 * z, calls) + expand(1, 3 * z, calls);
    case 3: return expand(2, 4 * z, calls) + expand(1, 5 * z, calls);
    default: return expand(2, z, calls) + expand(3, 2 * z, calls);
  }
}

// 7. The four-function network: staged resolves each f once, naive repeats calls.
Outcome resolve_ordering() {
  Outcome o;
  std::array<std::uint64_t, 4> calls{};
  double want = expand(4, 1.0, calls);
  bench::NetworkRun st = bench::run_network_staged();
  std::vector<double> sc = real_leaves(st.cot);
  if (want != 55.0) o.fail("expansion gives " + std::to_string(want) + "; ");
  if (sc != std::vector<double>{0, want, 0}) o.fail("staged cotangent wrong; ");
  if (st.invocations != std::array<std::uint64_t, 4>{1, 1, 1, 1}) o.fail("staged repeats a call; ");
  bench::NetworkRun nv = bench::run_network_naive();
  if (real_leaves(nv.cot) != std::vector<double>{0, want, 0}) o.fail("naive cotangent wrong; ");
  if (nv.invocations[0] != 4) o.fail("naive invokes f1 " + std::to_string(nv.invocations[0]) + " times, not 4; ");
  if (nv.invocations[1] != 2) o.fail("naive invokes f2 " + std::to_string(nv.invocations[1]) + " times, not 2; ");
  o.detail << "staged first coordinate " << sc[1] << ", naive calls f1..f4 = " << nv.invocations[0] << ","
           << nv.invocations[1] << "," << nv.invocations[2] << "," << nv.invocations[3];
  return o;
}

// 8. Every transformed program typechecks under its stage's target profile.
Outcome type_safety() {
  Outcome o;
  std::size_t n = 0;
  for (const auto& e : bench::corpus())
    for (StageSpec s : all_stages()) {
      try {
        Compiled c = compile(e.program, s, false);
        Type t = typecheck_target(c.target, c.profile);
        if (!(t == c.target_type)) o.fail(e.name + " " + to_string(s) + ": unexpected type; ");
        ++n;
      } catch (const std::exception& ex) {
        o.fail(e.name + " " + to_string(s) + ": " + ex.what() + "; ");
      }
    }
  o.detail << n << " targets";
  return o;
}

std::string cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"dualgrad"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str() + err.str();
}

// 9. Repeated CLI runs print byte-identical JSON.
Outcome determinism() {
  Outcome o;
  auto dir = std::filesystem::temp_directory_path() / "dualgrad_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t n = 0;
  for (const auto& e : bench::corpus()) {
    auto path = (dir / (e.name + ".src")).string();
    std::ofstream(path) << bench::source_of(e.program);
    std::string at = to_json(e.input).dump();
    for (StageSpec s : all_stages()) {
      std::vector<std::string> grad = {"grad", "--stage", to_string(s), "--at", at, path};
      std::vector<std::string> counts = {"counts", "--stage", to_string(s), "--no-time", "--at", at, path};
      std::string g = cli(grad), c = cli(counts);
      if (g.rfind("0\n", 0) != 0) o.fail(e.name + " " + to_string(s) + ": grad failed; ");
      if (cli(grad) != g) o.fail(e.name + " " + to_string(s) + ": grad output differs; ");
      if (cli(counts) != c) o.fail(e.name + " " + to_string(s) + ": counts output differs; ");
      n += 2;
    }
  }
  o.detail << n << " command pairs";
  return o;
}

int run() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion all[] = {
      {"gradient correctness", gradient_correctness}, {"naive blowup", naive_blowup},
      {"at-most-once", at_most_once},                 {"constant overhead", constant_overhead},
      {"cayley zero and deinterleave", cayley_fix},   {"linearity", linearity},
      {"resolve ordering", resolve_ordering},         {"type safety", type_safety},
      {"determinism", determinism},
  };
  int failed = 0;
  int i = 0;
  for (const auto& c : all) {
    ++i;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i << " " << c.name << ": " << o.detail.str();
    if (!o.pass) std::cout << " | " << o.why;
    std::cout << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dualgrad

int main() {
  int code = 0;
  dualgrad::run_on_big_stack([&] { code = dualgrad::run(); });
  return code;
}
