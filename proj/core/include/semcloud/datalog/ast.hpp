#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "semcloud/datalog/value.hpp"

namespace semcloud::datalog {

struct Term;

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const noexcept { return args.size(); }
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Constant {
  Value value;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// Named variable; "_" is the anonymous variable (atoms only).
struct Variable {
  std::string name;
  friend bool operator==(const Variable&, const Variable&) = default;
};

enum class ArithOp { Add, Sub, Mul, Div };

struct Arithmetic {
  ArithOp op;
  std::vector<Term> operands;  // exactly two
  friend bool operator==(const Arithmetic&, const Arithmetic&) = default;
};

/// `@name(args)`; resolved against an ExternalRegistry during grounding.
struct ExternalCall {
  std::string name;
  std::vector<Term> args;
  friend bool operator==(const ExternalCall&, const ExternalCall&) = default;
};

enum class AggregateKind { Max, Min, Avg };

/// `#max{a, b}` (term list) or `#avg{expr : cond1, cond2}` (comprehension).
struct Aggregate {
  AggregateKind kind;
  std::vector<Term> elements;
  std::vector<Atom> condition;  // non-empty iff comprehension form

  bool is_comprehension() const noexcept { return !condition.empty(); }
  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct Term {
  std::variant<Constant, Variable, Arithmetic, ExternalCall, Aggregate> node;

  friend bool operator==(const Term&, const Term&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

/// `lhs op rhs`. An `=` whose one side is a still-unbound variable acts as a
/// binding; otherwise it is an equality test.
struct Comparison {
  CompareOp op;
  Term lhs;
  Term rhs;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

using BodyElement = std::variant<Atom, Comparison>;

struct Rule {
  std::string label;  // optional `name:` prefix
  Atom head;
  std::vector<BodyElement> body;

  friend bool operator==(const Rule&, const Rule&) = default;
};

inline Term make_constant(Value v) { return Term{Constant{std::move(v)}}; }
inline Term make_variable(std::string name) { return Term{Variable{std::move(name)}}; }

}  // namespace semcloud::datalog
