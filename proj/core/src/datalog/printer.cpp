#include "semcloud/datalog/program.hpp"

namespace semcloud::datalog {
namespace {

const char* op_text(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return " + ";
    case ArithOp::Sub: return " - ";
    case ArithOp::Mul: return " * ";
    case ArithOp::Div: return " / ";
  }
  return " ? ";
}

const char* op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return " = ";
    case CompareOp::Ne: return " != ";
    case CompareOp::Lt: return " < ";
    case CompareOp::Le: return " <= ";
    case CompareOp::Gt: return " > ";
    case CompareOp::Ge: return " >= ";
  }
  return " ? ";
}

const char* aggregate_name(AggregateKind kind) {
  switch (kind) {
    case AggregateKind::Max: return "#max";
    case AggregateKind::Min: return "#min";
    case AggregateKind::Avg: return "#avg";
  }
  return "#?";
}

std::string constant_text(const Value& v) {
  // Inside rules bare identifiers are variables, so symbols are always quoted.
  if (v.is_number()) return v.to_string();
  std::string out = "\"";
  for (char c : v.as_symbol()) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string print_nested(const Term& term) {
  if (std::holds_alternative<Arithmetic>(term.node)) return "(" + print_term(term) + ")";
  if (const auto* c = std::get_if<Constant>(&term.node); c && c->value.is_number() && c->value.as_number() < 0) {
    return "(" + print_term(term) + ")";
  }
  return print_term(term);
}

template <typename Range>
std::string join_terms(const Range& terms) {
  std::string out;
  bool first = true;
  for (const auto& t : terms) {
    if (!first) out += ", ";
    first = false;
    out += print_term(t);
  }
  return out;
}

}  // namespace

std::string print_term(const Term& term) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return constant_text(node.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return node.name;
        } else if constexpr (std::is_same_v<T, Arithmetic>) {
          return print_nested(node.operands[0]) + op_text(node.op) + print_nested(node.operands[1]);
        } else if constexpr (std::is_same_v<T, ExternalCall>) {
          return "@" + node.name + "(" + join_terms(node.args) + ")";
        } else {
          std::string out = std::string(aggregate_name(node.kind)) + "{" + join_terms(node.elements);
          if (node.is_comprehension()) {
            out += " : ";
            for (std::size_t i = 0; i < node.condition.size(); ++i) {
              if (i != 0) out += ", ";
              out += print_atom(node.condition[i]);
            }
          }
          return out + "}";
        }
      },
      term.node);
}

std::string print_atom(const Atom& atom) {
  return atom.predicate + "(" + join_terms(atom.args) + ")";
}

std::string print_rule(const Rule& rule) {
  std::string out;
  if (!rule.label.empty()) out += rule.label + ": ";
  out += print_atom(rule.head);
  if (!rule.body.empty()) {
    out += " <-";
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      out += i == 0 ? "\n    " : ",\n    ";
      if (const auto* a = std::get_if<Atom>(&rule.body[i])) {
        out += print_atom(*a);
      } else {
        const auto& c = std::get<Comparison>(rule.body[i]);
        out += print_term(c.lhs) + op_text(c.op) + print_term(c.rhs);
      }
    }
  }
  return out + ".";
}

std::string print_program(const Program& program) {
  std::string out;
  for (const auto& rule : program.rules()) {
    out += print_rule(rule);
    out += "\n\n";
  }
  return out;
}

}  // namespace semcloud::datalog
