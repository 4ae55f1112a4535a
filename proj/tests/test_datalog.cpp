#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle/naive_grounder.hpp"
#include "semcloud/datalog.hpp"
#include "semcloud/errors.hpp"

using namespace semcloud;
using namespace semcloud::datalog;

namespace {

const char* kPrintedConfigRule = R"(
configured_resource(p,nc,ns,fs,mrs,mrp) ←
    subgraph2(p,n,v,ms,mp,ts,tp,nc,ns,mrs,mrp,mode),
    estimated_resource(p,ms,mp,ssl,spr,sst),
    CloudAttributes(c,c1,c2,c3,nm,nst,fs,cs),
    #max{ms,mp} > (c1 * nm), #max{ssl,spr,sst} <= (c2 * nst),
    nc2 = @func_fs_1(n,v,ts,tp), ns2 = @func_fs_2(n,v,ts,tp),
    mrs2 = #min{ms, #max{@func_ss(n,v,nc2,ns2), c3*ms}},
    mrp2 = #min{mp, #max{@func_pn(n,v,nc2,ns2), c3*mp}}
)";

Aggregate single_aggregate(const std::string& text) {
  const Program program = parse_program("out(agg_value) <- seed(k), agg_value = " + text + ".");
  const auto& cmp = std::get<Comparison>(program.rules()[0].body[1]);
  return std::get<Aggregate>(cmp.rhs.node);
}

ExternalRegistry constant_registry() {
  ExternalRegistry reg;
  reg.add("double", 1, [](std::span<const double> a) { return 2.0 * a[0]; });
  reg.add("sum2", 2, [](std::span<const double> a) { return a[0] + a[1]; });
  return reg;
}

}  // namespace

TEST(DatalogParse, PrintedConfigRuleHasSixAryHead) {
  const Program program = parse_program(kPrintedConfigRule);
  ASSERT_EQ(program.rules().size(), 1u);
  EXPECT_EQ(program.rules()[0].head.predicate, "configured_resource");
  EXPECT_EQ(program.rules()[0].head.arity(), 6u);
  EXPECT_EQ(program.externals(),
            (std::vector<std::string>{"func_fs_1", "func_fs_2", "func_pn", "func_ss"}));
}

TEST(DatalogParse, MinimalRule) {
  const Program program = parse_program("a(x) ← b(x).");
  ASSERT_EQ(program.rules().size(), 1u);
  EXPECT_TRUE(program.externals().empty());
}

TEST(DatalogParse, AlternativeArrowsAndMissingFinalDot) {
  EXPECT_EQ(parse_program("a(x) :- b(x).").rules().size(), 1u);
  EXPECT_EQ(parse_program("a(x) <- b(x)").rules().size(), 1u);
  EXPECT_EQ(parse_program("r1: a(x) <- b(x). % trailing\n// more\nc(y) <- a(y).").rules().size(), 2u);
}

TEST(DatalogParse, SelfLoopIsRecursion) {
  EXPECT_THROW(parse_program("a(x) ← a(x)."), RecursionError);
  EXPECT_THROW(parse_program("a(x) <- b(x). b(x) <- c(x). c(x) <- a(x)."), RecursionError);
}

TEST(DatalogParse, UnsafeHeadVariable) {
  EXPECT_THROW(parse_program("a(x, y) <- b(x)."), SafetyError);
  EXPECT_THROW(parse_program("a(x) <- b(x), y > 3."), SafetyError);
}

TEST(DatalogParse, SyntaxErrorCarriesPosition) {
  try {
    parse_program("a(x) <- b(x),\n  c(.");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(DatalogParse, PrintParseRoundTrip) {
  const char* texts[] = {
      kPrintedConfigRule,
      "a(x) <- b(x).",
      "t(x, y) <- b(x, \"two words\"), y = (x - 1) / (x + -2.5) * 3.",
      "avg_of(k, a) <- key(k), a = #avg{@double(i) : range(i)}.",
      "m(v) <- s(a, b), v = #min{10, #max{a, b, 4}}, v != 7.",
  };
  for (const char* text : texts) {
    const Program first = parse_program(text);
    const Program second = parse_program(print_program(first));
    EXPECT_EQ(first, second) << print_program(first);
  }
}

TEST(DatalogFacts, TextRoundTrip) {
  FactSet facts;
  facts.insert("hasVolume", {Value::symbol("d1"), Value::number(12.5)});
  facts.insert("name", {Value::symbol("p 1"), Value::number(-3)});
  facts.insert("Cloud", {Value::symbol("c")});
  EXPECT_EQ(parse_facts(facts.to_text()), facts);
  EXPECT_EQ(facts.size(), 3u);
  EXPECT_FALSE(facts.insert("Cloud", {Value::symbol("c")}));
}

TEST(DatalogAggregate, TermListMax) {
  FactSet none;
  EXPECT_EQ(evaluate_aggregate(single_aggregate("#max{3, 7}"), {}, none, {}), 7.0);
}

TEST(DatalogAggregate, ComprehensionAverage) {
  FactSet facts;
  for (int i = 1; i <= 3; ++i) facts.insert("range", {Value::number(i)});
  EXPECT_EQ(evaluate_aggregate(single_aggregate("#avg{i : range(i)}"), {}, facts, {}), 2.0);
}

TEST(DatalogAggregate, Nesting) {
  FactSet none;
  EXPECT_EQ(evaluate_aggregate(single_aggregate("#min{10, #max{4, 6}}"), {}, none, {}), 6.0);
}

TEST(DatalogAggregate, EmptyComprehension) {
  FactSet none;
  EXPECT_THROW(evaluate_aggregate(single_aggregate("#avg{i : range(i)}"), {}, none, {}), EmptyAggregate);
}

TEST(DatalogAggregate, OuterBindingRestrictsComprehension) {
  FactSet facts;
  facts.insert("w", {Value::number(1), Value::number(10)});
  facts.insert("w", {Value::number(1), Value::number(20)});
  facts.insert("w", {Value::number(2), Value::number(99)});
  const Aggregate agg = single_aggregate("#avg{x : w(k, x)}");
  EXPECT_EQ(evaluate_aggregate(agg, {{"k", Value::number(1)}}, facts, {}), 15.0);
}

TEST(DatalogEvaluate, EmptyEdbDerivesNothing) {
  const Program program = parse_program("a(x) <- b(x). c(x, y) <- a(x), b(y).");
  const FactSet out = evaluate(program, FactSet{}, ExternalRegistry{});
  EXPECT_TRUE(out.empty());
  EXPECT_TRUE(query(out, "configured_resource", 6).empty());
}

TEST(DatalogEvaluate, JoinAndArithmetic) {
  const Program program = parse_program(
      "total(p, t) <- job(p, a), cost(p, b), t = @sum2(a, b) * 2.\n"
      "big(p) <- total(p, t), t > 10.");
  const FactSet edb = parse_facts("job(x, 1)\njob(y, 4)\ncost(x, 2)\ncost(y, 3)\ncost(z, 9)");
  const FactSet out = evaluate(program, edb, constant_registry());
  EXPECT_EQ(query(out, "total", 2),
            (std::vector<Tuple>{{Value::symbol("x"), Value::number(6)}, {Value::symbol("y"), Value::number(14)}}));
  EXPECT_EQ(query(out, "big", 1), (std::vector<Tuple>{{Value::symbol("y")}}));
}

TEST(DatalogEvaluate, BindingDeferredUntilInputsBound) {
  // b is used before the equation that binds it is written.
  const Program program = parse_program("r(a, c) <- s(a), c = b + 1, b = a * 10.");
  const FactSet out = evaluate(program, parse_facts("s(1)\ns(2)"), {});
  EXPECT_EQ(query(out, "r", 2), (std::vector<Tuple>{{Value::number(1), Value::number(11)},
                                                    {Value::number(2), Value::number(21)}}));
}

TEST(DatalogEvaluate, DivisionByZeroIsLoggedNotFatal) {
  const Program program = parse_program("q(x, y) <- s(x), y = 1 / x.");
  EvaluationLog log;
  const FactSet out = evaluate(program, parse_facts("s(0)\ns(2)"), {}, &log);
  EXPECT_EQ(query(out, "q", 2), (std::vector<Tuple>{{Value::number(2), Value::number(0.5)}}));
  ASSERT_EQ(log.diagnostics.size(), 1u);
  EXPECT_EQ(log.diagnostics[0].kind, Diagnostic::Kind::Arithmetic);
  EXPECT_EQ(log.firings, (std::vector<std::size_t>{1}));
  EXPECT_NE(log.to_json_lines().find("\"kind\""), std::string::npos);
}

TEST(DatalogEvaluate, ExternalFailureDropsInstance) {
  ExternalRegistry reg;
  reg.add("f", 1, [](std::span<const double> a) {
    if (a[0] < 0) throw std::runtime_error("negative");
    return a[0] == 1 ? std::nan("") : a[0];
  });
  const Program program = parse_program("q(x, y) <- s(x), y = @f(x).");
  EvaluationLog log;
  const FactSet out = evaluate(program, parse_facts("s(-1)\ns(1)\ns(3)"), reg, &log);
  EXPECT_EQ(query(out, "q", 2).size(), 1u);
  EXPECT_EQ(log.diagnostics.size(), 2u);
}

TEST(DatalogEvaluate, MissingExternalAndArity) {
  const Program program = parse_program("q(y) <- s(x), y = @f(x).");
  EXPECT_THROW(evaluate(program, parse_facts("s(1)"), {}), MissingExternal);
  ExternalRegistry reg;
  reg.add("f", 2, [](std::span<const double>) { return 0.0; });
  EXPECT_THROW(evaluate(program, parse_facts("s(1)"), reg), SignatureMismatch);
}

TEST(DatalogEvaluate, ArithmeticOnSymbolIsTypeMismatch) {
  const Program program = parse_program("q(y) <- s(x), y = x + 1.");
  EXPECT_THROW(evaluate(program, parse_facts("s(abc)"), {}), TypeMismatch);
}

TEST(DatalogEvaluate, ShuffledInsertionGivesSameQuery) {
  const Program program = parse_program("pair(a, b) <- e(a, x), e(b, x), a < b.");
  std::vector<Tuple> edges;
  for (int i = 0; i < 30; ++i) edges.push_back({Value::number(i), Value::number(i % 4)});
  FactSet first;
  for (const auto& t : edges) first.insert("e", t);
  std::mt19937 rng(7);
  std::shuffle(edges.begin(), edges.end(), rng);
  FactSet second;
  for (const auto& t : edges) second.insert("e", t);
  EXPECT_EQ(query(evaluate(program, first, {}), "pair", 2), query(evaluate(program, second, {}), "pair", 2));
}

TEST(DatalogEvaluate, RuleOrderDoesNotMatter) {
  const char* a = "b(x) <- a(x), x > 1. c(x) <- b(x). d(x, y) <- c(x), a(y), y = x - 1.";
  const char* b = "d(x, y) <- c(x), a(y), y = x - 1. c(x) <- b(x). b(x) <- a(x), x > 1.";
  const FactSet edb = parse_facts("a(1)\na(2)\na(3)\na(4)");
  EXPECT_EQ(evaluate(parse_program(a), edb, {}), evaluate(parse_program(b), edb, {}));
}

TEST(DatalogEvaluate, MatchesNaiveGrounder) {
  const Program program = parse_program(
      "est(p, m, a) <- pipe(p, n), m = @double(n), a = #avg{@sum2(n, i) : range(i)}.\n"
      "cfg(p, k) <- est(p, m, a), lim(c), #max{m, a} > c, k = #min{m, c * 2}.\n"
      "cfg(p, k) <- est(p, m, a), lim(c), #max{m, a} <= c, k = m.\n"
      "ratio(p, r) <- pipe(p, n), zero(z), r = n / z.");
  std::mt19937_64 rng(11);
  for (int round = 0; round < 20; ++round) {
    FactSet edb;
    std::uniform_int_distribution<int> val(0, 20);
    for (int i = 0; i < 6; ++i) edb.insert("pipe", {Value::symbol("p" + std::to_string(i)), Value::number(val(rng))});
    for (int i = 1; i <= 1 + round % 4; ++i) edb.insert("range", {Value::number(i)});
    edb.insert("lim", {Value::number(val(rng))});
    edb.insert("zero", {Value::number(round % 2)});
    EXPECT_EQ(evaluate(program, edb, constant_registry()),
              oracle::naive_evaluate(program, edb, constant_registry()));
  }
}
