#include "semcloud/datalog/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>

#include "semcloud/errors.hpp"

namespace semcloud::datalog {
namespace {

using VarCounts = std::map<std::string, int>;

bool is_anonymous(const std::string& name) { return name == "_"; }

void count_vars(const Term& term, VarCounts& counts);

void count_vars(const Atom& atom, VarCounts& counts) {
  for (const auto& arg : atom.args) count_vars(arg, counts);
}

void count_vars(const Term& term, VarCounts& counts) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Variable>) {
          if (!is_anonymous(node.name)) ++counts[node.name];
        } else if constexpr (std::is_same_v<T, Arithmetic>) {
          for (const auto& t : node.operands) count_vars(t, counts);
        } else if constexpr (std::is_same_v<T, ExternalCall>) {
          for (const auto& t : node.args) count_vars(t, counts);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          for (const auto& t : node.elements) count_vars(t, counts);
          for (const auto& a : node.condition) count_vars(a, counts);
        }
      },
      term.node);
}

// Like count_vars, but comprehension bodies are their own scope and are
// skipped.
void count_outer_vars(const Term& term, VarCounts& counts) {
  if (const auto* g = std::get_if<Aggregate>(&term.node)) {
    if (!g->condition.empty()) return;
    for (const auto& t : g->elements) count_outer_vars(t, counts);
  } else if (const auto* a = std::get_if<Arithmetic>(&term.node)) {
    for (const auto& t : a->operands) count_outer_vars(t, counts);
  } else if (const auto* e = std::get_if<ExternalCall>(&term.node)) {
    for (const auto& t : e->args) count_outer_vars(t, counts);
  } else {
    count_vars(term, counts);
  }
}

VarCounts count_rule_vars(const Rule& rule) {
  VarCounts counts;
  count_vars(rule.head, counts);
  for (const auto& el : rule.body) {
    if (const auto* a = std::get_if<Atom>(&el)) {
      count_vars(*a, counts);
    } else {
      const auto& c = std::get<Comparison>(el);
      count_outer_vars(c.lhs, counts);
      count_outer_vars(c.rhs, counts);
    }
  }
  return counts;
}

/// Variables of `agg` that do not occur in the enclosing scope.
std::set<std::string> local_vars(const Aggregate& agg, const VarCounts& scope) {
  VarCounts inner;
  for (const auto& t : agg.elements) count_vars(t, inner);
  for (const auto& a : agg.condition) count_vars(a, inner);
  std::set<std::string> locals;
  for (const auto& [name, n] : inner) {
    if (!scope.contains(name)) locals.insert(name);
  }
  return locals;
}

/// Variables that must be bound before `term` can be evaluated.
void required_vars(const Term& term, const VarCounts& scope, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Variable>) {
          out.insert(node.name);
        } else if constexpr (std::is_same_v<T, Arithmetic>) {
          for (const auto& t : node.operands) required_vars(t, scope, out);
        } else if constexpr (std::is_same_v<T, ExternalCall>) {
          for (const auto& t : node.args) required_vars(t, scope, out);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          const auto locals = local_vars(node, scope);
          std::set<std::string> inner;
          for (const auto& t : node.elements) required_vars(t, scope, inner);
          for (const auto& a : node.condition) {
            for (const auto& arg : a.args) required_vars(arg, scope, inner);
          }
          for (const auto& v : inner) {
            if (!locals.contains(v) && !is_anonymous(v)) out.insert(v);
          }
        }
      },
      term.node);
}

bool subset_of(const std::set<std::string>& needed, const std::set<std::string>& bound) {
  return std::all_of(needed.begin(), needed.end(), [&](const auto& v) { return bound.contains(v); });
}

std::string rule_name(const Rule& rule, std::size_t index) {
  return rule.label.empty() ? "rule #" + std::to_string(index) : rule.label;
}

// ---------------------------------------------------------------------------
// Compiled form

struct CTerm;

struct CArg {
  enum class Kind { Const, Bound, Free, Anon } kind = Kind::Anon;
  Value constant;
  int slot = -1;
};

struct CAtom {
  PredicateKey pred;
  std::vector<CArg> args;
};

struct CTerm {
  enum class Kind { Const, Var, Arith, External, Aggregate } kind = Kind::Const;
  Value constant;
  int slot = -1;
  ArithOp arith = ArithOp::Add;
  std::vector<CTerm> kids;
  std::string external;
  std::size_t external_arity = 0;
  const ExternalRegistry::Entry* entry = nullptr;
  AggregateKind aggregate = AggregateKind::Max;
  std::vector<CAtom> condition;
};

struct Step {
  enum class Kind { Join, Bind, Test } kind = Kind::Join;
  CAtom atom;
  int slot = -1;
  CompareOp op = CompareOp::Eq;
  CTerm lhs;
  CTerm rhs;
};

struct CRule {
  std::size_t index = 0;
  std::string name;
  PredicateKey head_pred;
  std::vector<CTerm> head;
  std::vector<Step> steps;
  int slots = 0;
};

struct InstanceFailure {
  Diagnostic::Kind kind;
  std::string message;
};

class Compiler {
 public:
  Compiler(const VarCounts& scope, std::size_t rule_index, std::string rule_name)
      : scope_(scope), rule_index_(rule_index), rule_name_(std::move(rule_name)) {}

  int slot_of(const std::string& name) {
    auto [it, inserted] = slots_.try_emplace(name, static_cast<int>(slots_.size()));
    return it->second;
  }
  int slot_count() const { return static_cast<int>(slots_.size()); }

  [[noreturn]] void unsafe(const std::string& msg) const {
    throw SafetyError(rule_name_ + ": " + msg);
  }

  CAtom atom(const Atom& a, std::set<std::string>& bound) {
    CAtom out{PredicateKey{a.predicate, a.args.size()}, {}};
    for (const auto& arg : a.args) {
      CArg c;
      if (const auto* k = std::get_if<Constant>(&arg.node)) {
        c.kind = CArg::Kind::Const;
        c.constant = k->value;
      } else if (const auto* v = std::get_if<Variable>(&arg.node)) {
        if (is_anonymous(v->name)) {
          c.kind = CArg::Kind::Anon;
        } else {
          c.slot = slot_of(v->name);
          c.kind = bound.contains(v->name) ? CArg::Kind::Bound : CArg::Kind::Free;
          bound.insert(v->name);
        }
      } else {
        unsafe("arguments of body atom " + a.predicate + " must be variables or constants");
      }
      out.args.push_back(std::move(c));
    }
    return out;
  }

  CTerm term(const Term& t, const std::set<std::string>& bound) {
    CTerm out;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Constant>) {
            out.kind = CTerm::Kind::Const;
            out.constant = node.value;
          } else if constexpr (std::is_same_v<T, Variable>) {
            if (is_anonymous(node.name)) unsafe("anonymous variable outside a body atom");
            if (!bound.contains(node.name)) unsafe("variable " + node.name + " is not bound");
            out.kind = CTerm::Kind::Var;
            out.slot = slot_of(node.name);
          } else if constexpr (std::is_same_v<T, Arithmetic>) {
            out.kind = CTerm::Kind::Arith;
            out.arith = node.op;
            for (const auto& k : node.operands) out.kids.push_back(term(k, bound));
          } else if constexpr (std::is_same_v<T, ExternalCall>) {
            out.kind = CTerm::Kind::External;
            out.external = node.name;
            out.external_arity = node.args.size();
            for (const auto& k : node.args) out.kids.push_back(term(k, bound));
          } else {
            out.kind = CTerm::Kind::Aggregate;
            out.aggregate = node.kind;
            std::set<std::string> inner = bound;
            for (const auto& a : node.condition) out.condition.push_back(atom(a, inner));
            for (const auto& e : node.elements) out.kids.push_back(term(e, inner));
          }
        },
        t.node);
    return out;
  }

  const VarCounts& scope() const { return scope_; }

 private:
  const VarCounts& scope_;
  std::size_t rule_index_;
  std::string rule_name_;
  std::map<std::string, int> slots_;
};

CRule compile_rule(const Rule& rule, std::size_t index) {
  const VarCounts scope = count_rule_vars(rule);
  CRule out;
  out.index = index;
  out.name = rule_name(rule, index);
  out.head_pred = PredicateKey{rule.head.predicate, rule.head.args.size()};
  Compiler compiler(scope, index, out.name);

  std::set<std::string> bound;
  std::vector<bool> done(rule.body.size(), false);
  std::size_t remaining = rule.body.size();

  while (remaining > 0) {
    bool progressed = false;
    for (std::size_t i = 0; i < rule.body.size() && !progressed; ++i) {
      if (done[i]) continue;
      const auto& el = rule.body[i];
      Step step;
      if (const auto* a = std::get_if<Atom>(&el)) {
        step.kind = Step::Kind::Join;
        step.atom = compiler.atom(*a, bound);
      } else {
        const auto& c = std::get<Comparison>(el);
        std::set<std::string> lhs_req;
        std::set<std::string> rhs_req;
        required_vars(c.lhs, scope, lhs_req);
        required_vars(c.rhs, scope, rhs_req);
        const auto* lv = std::get_if<Variable>(&c.lhs.node);
        const auto* rv = std::get_if<Variable>(&c.rhs.node);
        if (c.op == CompareOp::Eq && lv && !is_anonymous(lv->name) && !bound.contains(lv->name) &&
            subset_of(rhs_req, bound)) {
          step.kind = Step::Kind::Bind;
          step.lhs = compiler.term(c.rhs, bound);
          step.slot = compiler.slot_of(lv->name);
          bound.insert(lv->name);
        } else if (c.op == CompareOp::Eq && rv && !is_anonymous(rv->name) && !bound.contains(rv->name) &&
                   subset_of(lhs_req, bound)) {
          step.kind = Step::Kind::Bind;
          step.lhs = compiler.term(c.lhs, bound);
          step.slot = compiler.slot_of(rv->name);
          bound.insert(rv->name);
        } else if (subset_of(lhs_req, bound) && subset_of(rhs_req, bound)) {
          step.kind = Step::Kind::Test;
          step.op = c.op;
          step.lhs = compiler.term(c.lhs, bound);
          step.rhs = compiler.term(c.rhs, bound);
        } else {
          continue;
        }
      }
      out.steps.push_back(std::move(step));
      done[i] = true;
      --remaining;
      progressed = true;
    }
    if (!progressed) {
      std::set<std::string> missing;
      for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (done[i]) continue;
        const auto& c = std::get<Comparison>(rule.body[i]);
        required_vars(c.lhs, scope, missing);
        required_vars(c.rhs, scope, missing);
      }
      std::string names;
      for (const auto& v : missing) {
        if (bound.contains(v)) continue;
        names += names.empty() ? v : ", " + v;
      }
      compiler.unsafe("cannot bind variable(s) " + names);
    }
  }

  for (const auto& arg : rule.head.args) {
    std::set<std::string> req;
    required_vars(arg, scope, req);
    for (const auto& v : req) {
      if (!bound.contains(v)) compiler.unsafe("head variable " + v + " is not bound by the body");
    }
    out.head.push_back(compiler.term(arg, bound));
  }
  out.slots = compiler.slot_count();
  return out;
}

void collect_body_predicates(const Term& term, std::set<PredicateKey>& out);

void collect_body_predicates(const Atom& atom, std::set<PredicateKey>& out) {
  for (const auto& arg : atom.args) collect_body_predicates(arg, out);
}

void collect_body_predicates(const Term& term, std::set<PredicateKey>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Arithmetic>) {
          for (const auto& t : node.operands) collect_body_predicates(t, out);
        } else if constexpr (std::is_same_v<T, ExternalCall>) {
          for (const auto& t : node.args) collect_body_predicates(t, out);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          for (const auto& t : node.elements) collect_body_predicates(t, out);
          for (const auto& a : node.condition) {
            out.insert(PredicateKey{a.predicate, a.args.size()});
            collect_body_predicates(a, out);
          }
        }
      },
      term.node);
}

std::set<PredicateKey> body_predicates(const Rule& rule) {
  std::set<PredicateKey> out;
  for (const auto& el : rule.body) {
    if (const auto* a = std::get_if<Atom>(&el)) {
      out.insert(PredicateKey{a->predicate, a->args.size()});
      collect_body_predicates(*a, out);
    } else {
      const auto& c = std::get<Comparison>(el);
      collect_body_predicates(c.lhs, out);
      collect_body_predicates(c.rhs, out);
    }
  }
  return out;
}

void collect_externals(const Term& term, std::map<std::string, std::set<std::size_t>>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Arithmetic>) {
          for (const auto& t : node.operands) collect_externals(t, out);
        } else if constexpr (std::is_same_v<T, ExternalCall>) {
          out[node.name].insert(node.args.size());
          for (const auto& t : node.args) collect_externals(t, out);
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          for (const auto& t : node.elements) collect_externals(t, out);
        }
      },
      term.node);
}

std::map<std::string, std::set<std::size_t>> external_call_sites(const std::vector<Rule>& rules) {
  std::map<std::string, std::set<std::size_t>> out;
  for (const auto& rule : rules) {
    for (const auto& arg : rule.head.args) collect_externals(arg, out);
    for (const auto& el : rule.body) {
      if (const auto* c = std::get_if<Comparison>(&el)) {
        collect_externals(c->lhs, out);
        collect_externals(c->rhs, out);
      }
    }
  }
  return out;
}

std::string key_text(const PredicateKey& key) { return key.name + "/" + std::to_string(key.arity); }

// ---------------------------------------------------------------------------
// Evaluation

class Evaluator {
 public:
  Evaluator(const FactSet& facts, const ExternalRegistry& registry) : facts_(facts), registry_(registry) {}

  void resolve(CTerm& t) const {
    if (t.kind == CTerm::Kind::External) {
      t.entry = registry_.find(t.external);
    }
    for (auto& k : t.kids) resolve(k);
  }

  void resolve(CRule& rule) const {
    for (auto& step : rule.steps) {
      resolve(step.lhs);
      resolve(step.rhs);
    }
    for (auto& h : rule.head) resolve(h);
  }

  Value eval(const CTerm& t, std::vector<Value>& env) const {
    switch (t.kind) {
      case CTerm::Kind::Const: return t.constant;
      case CTerm::Kind::Var: return env[static_cast<std::size_t>(t.slot)];
      case CTerm::Kind::Arith: {
        const double a = eval(t.kids[0], env).as_number();
        const double b = eval(t.kids[1], env).as_number();
        double r = 0.0;
        switch (t.arith) {
          case ArithOp::Add: r = a + b; break;
          case ArithOp::Sub: r = a - b; break;
          case ArithOp::Mul: r = a * b; break;
          case ArithOp::Div:
            if (b == 0.0) throw InstanceFailure{Diagnostic::Kind::Arithmetic, "division by zero"};
            r = a / b;
            break;
        }
        if (!std::isfinite(r)) throw InstanceFailure{Diagnostic::Kind::Arithmetic, "non-finite arithmetic result"};
        return Value::number(r);
      }
      case CTerm::Kind::External: {
        std::vector<double> args;
        args.reserve(t.kids.size());
        for (const auto& k : t.kids) args.push_back(eval(k, env).as_number());
        double r = 0.0;
        try {
          r = t.entry->fn(args);
        } catch (const std::exception& e) {
          throw InstanceFailure{Diagnostic::Kind::ExternalFailure, "@" + t.external + " failed: " + e.what()};
        }
        if (!std::isfinite(r)) {
          throw InstanceFailure{Diagnostic::Kind::ExternalFailure, "@" + t.external + " returned a non-finite value"};
        }
        return Value::number(r);
      }
      case CTerm::Kind::Aggregate: return Value::number(aggregate(t, env));
    }
    return {};
  }

  double aggregate(const CTerm& t, std::vector<Value>& env) const {
    std::vector<double> values;
    if (t.condition.empty()) {
      for (const auto& k : t.kids) values.push_back(eval(k, env).as_number());
    } else {
      join(t.condition, 0, env, [&] { values.push_back(eval(t.kids[0], env).as_number()); });
      if (values.empty()) throw InstanceFailure{Diagnostic::Kind::EmptyAggregate, "aggregate matched nothing"};
    }
    switch (t.aggregate) {
      case AggregateKind::Max: return *std::max_element(values.begin(), values.end());
      case AggregateKind::Min: return *std::min_element(values.begin(), values.end());
      case AggregateKind::Avg: {
        double sum = 0.0;
        for (double x : values) sum += x;
        return sum / static_cast<double>(values.size());
      }
    }
    return 0.0;
  }

  template <typename Fn>
  void join(const std::vector<CAtom>& atoms, std::size_t i, std::vector<Value>& env, Fn&& leaf) const {
    if (i == atoms.size()) {
      leaf();
      return;
    }
    match(atoms[i], env, [&] { join(atoms, i + 1, env, leaf); });
  }

  template <typename Fn>
  void match(const CAtom& atom, std::vector<Value>& env, Fn&& next) const {
    const FactSet::Relation* rel = facts_.find(atom.pred.name, atom.pred.arity);
    if (rel == nullptr) return;
    for (const auto& tuple : *rel) {
      bool ok = true;
      for (std::size_t k = 0; k < atom.args.size() && ok; ++k) {
        const CArg& arg = atom.args[k];
        switch (arg.kind) {
          case CArg::Kind::Const: ok = tuple[k] == arg.constant; break;
          case CArg::Kind::Bound: ok = tuple[k] == env[static_cast<std::size_t>(arg.slot)]; break;
          case CArg::Kind::Free: env[static_cast<std::size_t>(arg.slot)] = tuple[k]; break;
          case CArg::Kind::Anon: break;
        }
      }
      if (ok) next();
    }
  }

  static bool compare(CompareOp op, const Value& a, const Value& b) {
    if (op == CompareOp::Eq) return a == b;
    if (op == CompareOp::Ne) return !(a == b);
    if (a.is_number() != b.is_number()) {
      throw TypeMismatch("ordering comparison between " + a.to_string() + " and " + b.to_string());
    }
    const auto ord = a <=> b;
    switch (op) {
      case CompareOp::Lt: return ord < 0;
      case CompareOp::Le: return ord <= 0;
      case CompareOp::Gt: return ord > 0;
      case CompareOp::Ge: return ord >= 0;
      default: return false;
    }
  }

  void run(const CRule& rule, FactSet& out, EvaluationLog* log) const {
    std::vector<Value> env(static_cast<std::size_t>(rule.slots));
    std::size_t fired = 0;
    step(rule, 0, env, out, log, fired);
    if (log != nullptr) log->firings[rule.index] += fired;
  }

 private:
  void step(const CRule& rule, std::size_t i, std::vector<Value>& env, FactSet& out, EvaluationLog* log,
            std::size_t& fired) const {
    try {
      if (i == rule.steps.size()) {
        Tuple tuple;
        tuple.reserve(rule.head.size());
        for (const auto& h : rule.head) tuple.push_back(eval(h, env));
        out.insert(rule.head_pred.name, std::move(tuple));
        ++fired;
        return;
      }
      const Step& s = rule.steps[i];
      switch (s.kind) {
        case Step::Kind::Join:
          match(s.atom, env, [&] { step(rule, i + 1, env, out, log, fired); });
          return;
        case Step::Kind::Bind:
          env[static_cast<std::size_t>(s.slot)] = eval(s.lhs, env);
          step(rule, i + 1, env, out, log, fired);
          return;
        case Step::Kind::Test:
          if (compare(s.op, eval(s.lhs, env), eval(s.rhs, env))) step(rule, i + 1, env, out, log, fired);
          return;
      }
    } catch (const InstanceFailure& failure) {
      if (log != nullptr) {
        log->diagnostics.push_back(Diagnostic{failure.kind, rule.index, rule.name, failure.message});
      }
    }
  }

  const FactSet& facts_;
  const ExternalRegistry& registry_;
};

void check_externals(const std::vector<Rule>& rules, const ExternalRegistry& registry) {
  for (const auto& [name, arities] : external_call_sites(rules)) {
    const auto* entry = registry.find(name);
    if (entry == nullptr) throw MissingExternal("external @" + name + " is not registered");
    for (std::size_t arity : arities) {
      if (arity != entry->arity) {
        throw SignatureMismatch("external @" + name + " called with " + std::to_string(arity) +
                                " argument(s), registered with " + std::to_string(entry->arity));
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Program::Program(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (std::size_t i = 0; i < rules_.size(); ++i) compile_rule(rules_[i], i);

  std::map<PredicateKey, std::set<PredicateKey>> deps;
  for (const auto& rule : rules_) {
    auto& d = deps[PredicateKey{rule.head.predicate, rule.head.args.size()}];
    for (const auto& p : body_predicates(rule)) d.insert(p);
  }

  // Kahn's algorithm over head predicates; body predicates without rules are EDB.
  std::map<PredicateKey, int> indegree;
  std::map<PredicateKey, std::vector<PredicateKey>> users;
  for (const auto& [head, body] : deps) {
    indegree.try_emplace(head, 0);
    for (const auto& b : body) {
      if (!deps.contains(b)) continue;
      ++indegree[head];
      users[b].push_back(head);
    }
  }
  std::priority_queue<PredicateKey, std::vector<PredicateKey>, std::greater<>> ready;
  for (const auto& [p, d] : indegree) {
    if (d == 0) ready.push(p);
  }
  while (!ready.empty()) {
    PredicateKey p = ready.top();
    ready.pop();
    strata_.push_back(p);
    for (const auto& u : users[p]) {
      if (--indegree[u] == 0) ready.push(u);
    }
  }
  if (strata_.size() != deps.size()) {
    std::string cycle;
    for (const auto& [p, d] : indegree) {
      if (d > 0) cycle += (cycle.empty() ? "" : ", ") + key_text(p);
    }
    throw RecursionError("recursive predicate dependency among: " + cycle);
  }

  for (const auto& [name, arities] : external_call_sites(rules_)) externals_.push_back(name);
}

std::string to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::Arithmetic: return "arithmetic";
    case Diagnostic::Kind::ExternalFailure: return "external_failure";
    case Diagnostic::Kind::EmptyAggregate: return "empty_aggregate";
  }
  return "unknown";
}

std::string EvaluationLog::to_json_lines() const {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream os;
  for (const auto& d : diagnostics) {
    os << "{\"kind\":" << quote(to_string(d.kind)) << ",\"rule\":" << quote(d.rule_label)
       << ",\"rule_index\":" << d.rule_index << ",\"message\":" << quote(d.message) << "}\n";
  }
  return os.str();
}

FactSet evaluate(const Program& program, const FactSet& edb, const ExternalRegistry& registry, EvaluationLog* log) {
  check_externals(program.rules(), registry);
  if (log != nullptr) log->firings.assign(program.rules().size(), 0);

  std::map<PredicateKey, std::vector<CRule>> by_head;
  for (std::size_t i = 0; i < program.rules().size(); ++i) {
    CRule compiled = compile_rule(program.rules()[i], i);
    by_head[compiled.head_pred].push_back(std::move(compiled));
  }

  FactSet result = edb;
  for (const auto& pred : program.strata()) {
    FactSet derived;
    Evaluator evaluator(result, registry);
    for (auto& rule : by_head[pred]) {
      evaluator.resolve(rule);
      evaluator.run(rule, derived, log);
    }
    result.merge(derived);
  }
  return result;
}

double evaluate_aggregate(const Aggregate& aggregate, const Bindings& bindings, const FactSet& facts,
                          const ExternalRegistry& registry) {
  // Bound names are the enclosing scope.
  VarCounts scope;
  const Term wrapped{aggregate};
  for (const auto& [name, value] : bindings) ++scope[name];

  Compiler compiler(scope, 0, "aggregate");
  std::set<std::string> bound;
  for (const auto& [name, value] : bindings) {
    compiler.slot_of(name);
    bound.insert(name);
  }
  std::set<std::string> needed;
  required_vars(wrapped, scope, needed);
  for (const auto& v : needed) {
    if (!bound.contains(v)) throw SafetyError("aggregate: variable " + v + " is not bound");
  }

  CTerm compiled = compiler.term(wrapped, bound);
  std::vector<Rule> probe{Rule{"", Atom{"probe", {wrapped}}, {}}};
  check_externals(probe, registry);

  std::vector<Value> env(static_cast<std::size_t>(compiler.slot_count()));
  for (const auto& [name, value] : bindings) env[static_cast<std::size_t>(compiler.slot_of(name))] = value;

  Evaluator evaluator(facts, registry);
  evaluator.resolve(compiled);
  try {
    return evaluator.aggregate(compiled, env);
  } catch (const InstanceFailure& failure) {
    switch (failure.kind) {
      case Diagnostic::Kind::EmptyAggregate: throw EmptyAggregate(failure.message);
      case Diagnostic::Kind::Arithmetic: throw ArithmeticError(failure.message);
      case Diagnostic::Kind::ExternalFailure: throw ArithmeticError(failure.message);
    }
    throw;
  }
}

}  // namespace semcloud::datalog
