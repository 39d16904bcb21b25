// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "dualgrad/ad.hpp"
#include "dualgrad/bench/programs.hpp"
#include "dualgrad/cli/json_io.hpp"
#include "dualgrad/error.hpp"
#include "dualgrad/eval.hpp"
#include "dualgrad/oracle.hpp"
#include "dualgrad/printer.hpp"

namespace dualgrad {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Value random_value(const Type& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.5, 1.5);
  switch (t.kind()) {
    case TypeKind::Real: return make_real(d(rng));
    case TypeKind::Int: return make_int(1);
    case TypeKind::Unit: return unit_value();
    case TypeKind::Pair: {
      Value a = random_value(t.left(), rng);
      return make_pair(a, random_value(t.right(), rng));
    }
    case TypeKind::Sum: return make_inl(random_value(t.left(), rng));
    default: throw UsageError("no input value for type " + to_string(t));
  }
}

struct Common {
  std::string file;
  std::string stage = "naive";
  std::string variant;
  std::string at;
  std::string cot;
  std::int64_t seed = -1;
};

Value input_for(const Common& c, const Program& p) {
  if (!c.at.empty()) return parse_value(c.at, p.domain);
  if (c.seed >= 0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
    return random_value(p.domain, rng);
  }
  return bench::default_input(p.domain);
}

Value cot_for(const Common& c, const Value& y, const Type& codomain) {
  if (!c.cot.empty()) return parse_value(c.cot, cotangent_type(codomain));
  std::vector<double> ones(count_reals(y), 1.0);
  return cotangent_with_reals(y, ones);
}

std::string one_line(const Json& j) { return j.dump(); }

Program bench_program(const std::string& name, int n) {
  if (name == "chain") return bench::gen_chain(n);
  if (name == "dot") return bench::gen_dot(n);
  if (name == "matvec") return bench::gen_matvec(n);
  throw UsageError("unknown bench program '" + name + "' (expected chain, dot or matvec)");
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      int n = std::stoi(item, &used);
      if (used != item.size() || n < 1) throw std::invalid_argument(item);
      out.push_back(n);
    } catch (const std::exception&) {
      throw UsageError("bad size '" + item + "' in --sizes");
    }
  }
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Reverse-mode AD workbench for a small functional language"};
  app.require_subcommand(1);
  Common c;

  auto add_stage = [&](CLI::App* sub) {
    sub->add_option("--stage", c.stage, "naive|staged|cayley|mutarray (or a mutarray variant name)");
    sub->add_option("--variant", c.variant, "two-array|single-array|contrib|tape");
  };

  CLI::App* check = app.add_subcommand("check", "typecheck a program and print its type");
  check->add_option("file", c.file)->required();
  std::string check_stage;
  check->add_option("--stage", check_stage, "also transform and typecheck for this stage");

  CLI::App* eval = app.add_subcommand("eval", "run a program");
  eval->add_option("file", c.file)->required();
  eval->add_option("--at", c.at, "input as JSON");
  eval->add_option("--seed", c.seed, "random input seed when --at is absent");

  bool want_check = false, want_counts = false, dump = false;
  CLI::App* grad = app.add_subcommand("grad", "print the output and the gradient");
  grad->add_option("file", c.file)->required();
  add_stage(grad);
  grad->add_option("--at", c.at, "input as JSON");
  grad->add_option("--cot", c.cot, "output cotangent as JSON (default: all ones)");
  grad->add_option("--seed", c.seed, "random input seed when --at is absent");
  grad->add_flag("--check", want_check, "compare against forward mode and finite differences");
  grad->add_flag("--counts", want_counts, "include the counter report");
  grad->add_flag("--dump-target", dump, "include the transformed program");

  CLI::App* counts = app.add_subcommand("counts", "print the counter report of one gradient run");
  counts->add_option("file", c.file)->required();
  add_stage(counts);
  counts->add_option("--at", c.at, "input as JSON");
  counts->add_option("--cot", c.cot, "output cotangent as JSON (default: all ones)");
  counts->add_option("--seed", c.seed, "random input seed when --at is absent");
  bool no_time = false;
  counts->add_flag("--no-time", no_time, "omit wall time");

  std::string program = "chain", sizes = "1024,2048,4096,8192,16384", stages = "mutarray/contrib,mutarray/tape";
  int repeat = 3;
  bool table = false;
  CLI::App* bench = app.add_subcommand("bench", "run a generated program across sizes");
  bench->add_option("--program", program, "chain|dot|matvec");
  bench->add_option("--sizes", sizes, "comma-separated sizes");
  bench->add_option("--stages", stages, "comma-separated stages, e.g. staged,cayley,mutarray/tape");
  bench->add_option("--repeat", repeat, "runs per size; the fastest is reported")->check(CLI::PositiveNumber);
  bench->add_option("--seed", c.seed, "input seed (default: all inputs 1.0)");
  bench->add_flag("--table", table, "print an aligned table instead of JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    int code = app.exit(e, o, er);
    out << o.str();
    if (code != 0) throw UsageError(er.str().empty() ? e.what() : er.str());
    return 0;
  }

  if (check->parsed()) {
    Program p = load_program(read_file(c.file));
    out << to_string(Type::fun(p.domain, p.codomain)) << "\n";
    if (!check_stage.empty()) {
      Compiled k = compile(p, parse_stage(check_stage));
      out << to_string(k.target_type) << "\n";
    }
    return 0;
  }
  if (eval->parsed()) {
    Program p = load_program(read_file(c.file));
    EvalResult r = eval_source(p, input_for(c, p));
    Json j;
    j["y"] = to_json(r.value);
    j["primops"] = r.primops;
    out << one_line(j) << "\n";
    return 0;
  }
  if (grad->parsed() || counts->parsed()) {
    Program p = load_program(read_file(c.file));
    StageSpec spec = parse_stage(c.stage, c.variant);
    Value x = input_for(c, p);
    Compiled k = compile(p, spec);
    auto pb = differentiate(k, x);
    Value dy = cot_for(c, pb->primal(), p.codomain);
    Value dx = (*pb)(dy);
    Json j;
    if (counts->parsed()) {
      j["stage"] = to_string(spec);
      Json rep = to_json(pb->report(), !no_time);
      for (auto& [key, val] : rep.items()) j[key] = val;
      out << one_line(j) << "\n";
      return 0;
    }
    j["y"] = to_json(pb->primal());
    j["grad"] = to_json(dx);
    if (want_counts) j["counts"] = to_json(pb->report());
    if (want_check) {
      GradCheckReport r = grad_check(p, x, spec);
      j["check"] = {{"pass", r.pass},
                    {"maxRelErrFD", r.max_err_fd},
                    {"maxRelErrForward", r.max_err_forward},
                    {"fdNaN", r.fd_nan}};
    }
    if (dump) j["target"] = print_term(k.target);
    out << one_line(j) << "\n";
    return 0;
  }
  if (bench->parsed()) {
    std::vector<StageSpec> specs;
    std::stringstream s(stages);
    std::string item;
    while (std::getline(s, item, ',')) {
      auto slash = item.find('/');
      specs.push_back(slash == std::string::npos ? parse_stage(item)
                                                 : parse_stage(item.substr(0, slash), item.substr(slash + 1)));
    }
    std::vector<Json> rows;
    for (const StageSpec& spec : specs) {
      for (int n : parse_sizes(sizes)) {
        if (spec.stage == Stage::Naive && program == "chain" && n > 24)
          throw UsageError("the naive stage takes 2^n steps on chain; use n <= 24");
        Program p = bench_program(program, n);
        Value x = bench::default_input(p.domain);
        if (c.seed >= 0) {
          std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
          x = random_value(p.domain, rng);
        }
        Compiled k = compile(p, spec, false);
        CounterReport best;
        for (int r = 0; r < repeat; ++r) {
          auto pb = differentiate(k, x);
          std::vector<double> ones(count_reals(pb->primal()), 1.0);
          (*pb)(cotangent_with_reals(pb->primal(), ones));
          CounterReport rep = pb->report();
          if (r == 0 || rep.wallTimeNanos < best.wallTimeNanos) best = rep;
        }
        Json j;
        j["program"] = program;
        j["n"] = n;
        j["stage"] = to_string(spec);
        j["forwardWork"] = best.forwardWork();
        j["reverseWork"] = best.reverseWork();
        j["ratio"] = static_cast<double>(best.reverseWork()) / static_cast<double>(std::max<std::uint64_t>(1, best.forwardWork()));
        j["mapOrArrayOps"] = best.mapOrArrayOps;
        j["invocationsPerIdMax"] = best.invocationsPerIdMax;
        j["wallTimeNanos"] = best.wallTimeNanos;
        rows.push_back(j);
        if (!table) out << one_line(j) << "\n";
      }
    }
    if (table) {
      char line[256];
      std::snprintf(line, sizeof line, "%-22s %8s %12s %12s %8s %14s\n", "stage", "n", "forwardWork", "reverseWork",
                    "ratio", "wallTimeNanos");
      out << line;
      for (const Json& j : rows) {
        std::snprintf(line, sizeof line, "%-22s %8d %12llu %12llu %8.3f %14llu\n",
                      j["stage"].get<std::string>().c_str(), j["n"].get<int>(),
                      static_cast<unsigned long long>(j["forwardWork"].get<std::uint64_t>()),
                      static_cast<unsigned long long>(j["reverseWork"].get<std::uint64_t>()), j["ratio"].get<double>(),
                      static_cast<unsigned long long>(j["wallTimeNanos"].get<std::uint64_t>()));
        out << line;
      }
    }
    return 0;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(argc, argv, out);
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dualgrad
