#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include "datalog/lexer.hpp"
#include "semcloud/datalog/program.hpp"
#include "semcloud/errors.hpp"

namespace semcloud::datalog {
namespace detail {

std::string describe(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::External: return "external call";
    case Tok::Aggregate: return "aggregate";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'<-'";
    case Tok::Eq: return "'='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "token";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) {
        out.push_back(Token{Tok::End, "", 0.0, line_, col_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t count = 1) {
    for (std::size_t i = 0; i < count && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%' || (c == '/' && peek(1) == '/')) {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  std::string read_ident() {
    std::string s;
    while (ident_char(peek())) {
      s.push_back(peek());
      advance();
    }
    return s;
  }

  Token next() {
    Token tok{Tok::End, "", 0.0, line_, col_};
    const char c = peek();
    auto simple = [&](Tok kind, std::size_t len) {
      tok.kind = kind;
      tok.text = std::string(text_.substr(pos_, len));
      advance(len);
      return tok;
    };

    // U+2190 LEFTWARDS ARROW
    if (text_.substr(pos_, 3) == "\xE2\x86\x90") return simple(Tok::Arrow, 3);
    if (c == '<' && peek(1) == '-') return simple(Tok::Arrow, 2);
    if (c == ':' && peek(1) == '-') return simple(Tok::Arrow, 2);
    if (c == '<' && peek(1) == '=') return simple(Tok::Le, 2);
    if (c == '>' && peek(1) == '=') return simple(Tok::Ge, 2);
    if (c == '!' && peek(1) == '=') return simple(Tok::Ne, 2);
    if (c == '<' && peek(1) == '>') return simple(Tok::Ne, 2);
    if (c == '=' && peek(1) == '=') return simple(Tok::Eq, 2);

    switch (c) {
      case '(': return simple(Tok::LParen, 1);
      case ')': return simple(Tok::RParen, 1);
      case '{': return simple(Tok::LBrace, 1);
      case '}': return simple(Tok::RBrace, 1);
      case ',': return simple(Tok::Comma, 1);
      case ':': return simple(Tok::Colon, 1);
      case '=': return simple(Tok::Eq, 1);
      case '<': return simple(Tok::Lt, 1);
      case '>': return simple(Tok::Gt, 1);
      case '+': return simple(Tok::Plus, 1);
      case '-': return simple(Tok::Minus, 1);
      case '*': return simple(Tok::Star, 1);
      case '/': return simple(Tok::Slash, 1);
      default: break;
    }

    if (c == '.' && !std::isdigit(static_cast<unsigned char>(peek(1)))) return simple(Tok::Dot, 1);

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t look = 1;
        if (peek(1) == '+' || peek(1) == '-') look = 2;
        if (std::isdigit(static_cast<unsigned char>(peek(look)))) {
          advance(look);
          while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
      }
      tok.kind = Tok::Number;
      tok.text = std::string(text_.substr(start, pos_ - start));
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size() || !std::isfinite(tok.number)) {
        throw SyntaxError("malformed number '" + tok.text + "'", tok.line, tok.column);
      }
      return tok;
    }

    if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
        char ch = peek();
        if (ch == '"') {
          advance();
          break;
        }
        if (ch == '\\') {
          advance();
          ch = peek();
          if (ch == 'n') ch = '\n';
          else if (ch == 't') ch = '\t';
        }
        s.push_back(ch);
        advance();
      }
      tok.kind = Tok::String;
      tok.text = std::move(s);
      return tok;
    }

    if (c == '@' || c == '#') {
      advance();
      if (!ident_start(peek())) fail(std::string("expected a name after '") + c + "'");
      tok.kind = c == '@' ? Tok::External : Tok::Aggregate;
      tok.text = read_ident();
      return tok;
    }

    if (ident_start(c)) {
      tok.kind = Tok::Ident;
      tok.text = read_ident();
      return tok;
    }

    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace detail

namespace {

using detail::Tok;
using detail::Token;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<Rule> program() {
    std::vector<Rule> rules;
    while (peek().kind != Tok::End) {
      rules.push_back(rule());
      if (peek().kind == Tok::Dot) {
        advance();
      } else if (peek().kind != Tok::End) {
        fail("expected '.' after rule");
      }
    }
    return rules;
  }

  FactSet facts() {
    FactSet out;
    while (peek().kind != Tok::End) {
      const Token& name = expect(Tok::Ident, "predicate name");
      Tuple tuple;
      if (peek().kind == Tok::LParen) {
        advance();
        if (peek().kind != Tok::RParen) {
          tuple.push_back(ground_value());
          while (peek().kind == Tok::Comma) {
            advance();
            tuple.push_back(ground_value());
          }
        }
        expect(Tok::RParen, "')'");
      }
      out.insert(name.text, std::move(tuple));
      if (peek().kind == Tok::Dot) advance();
    }
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw SyntaxError(msg + " (found " + detail::describe(t.kind) +
                          (t.text.empty() ? "" : " '" + t.text + "'") + ")",
                      t.line, t.column);
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    return advance();
  }

  Value ground_value() {
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      advance();
      negative = true;
      if (peek().kind != Tok::Number) fail("expected a number after '-'");
    }
    const Token& t = advance();
    switch (t.kind) {
      case Tok::Number: return Value::number(negative ? -t.number : t.number);
      case Tok::Ident:
      case Tok::String: return Value::symbol(t.text);
      default: --pos_; fail("expected a constant");
    }
  }

  Rule rule() {
    Rule r;
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
      r.label = advance().text;
      advance();
    }
    r.head = atom();
    if (peek().kind == Tok::Arrow) {
      advance();
      r.body.push_back(body_element());
      while (peek().kind == Tok::Comma) {
        advance();
        r.body.push_back(body_element());
      }
    }
    return r;
  }

  Atom atom() {
    Atom a;
    a.predicate = expect(Tok::Ident, "predicate name").text;
    if (peek().kind == Tok::LParen) {
      advance();
      if (peek().kind != Tok::RParen) {
        a.args.push_back(term());
        while (peek().kind == Tok::Comma) {
          advance();
          a.args.push_back(term());
        }
      }
      expect(Tok::RParen, "')'");
    }
    return a;
  }

  BodyElement body_element() {
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen) return atom();
    Comparison cmp{CompareOp::Eq, term(), {}};
    switch (peek().kind) {
      case Tok::Eq: cmp.op = CompareOp::Eq; break;
      case Tok::Ne: cmp.op = CompareOp::Ne; break;
      case Tok::Lt: cmp.op = CompareOp::Lt; break;
      case Tok::Le: cmp.op = CompareOp::Le; break;
      case Tok::Gt: cmp.op = CompareOp::Gt; break;
      case Tok::Ge: cmp.op = CompareOp::Ge; break;
      default: fail("expected a comparison operator");
    }
    advance();
    cmp.rhs = term();
    return cmp;
  }

  Term term() {
    Term lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const ArithOp op = advance().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
      Term rhs = product();
      lhs = Term{Arithmetic{op, {std::move(lhs), std::move(rhs)}}};
    }
    return lhs;
  }

  Term product() {
    Term lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const ArithOp op = advance().kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
      Term rhs = unary();
      lhs = Term{Arithmetic{op, {std::move(lhs), std::move(rhs)}}};
    }
    return lhs;
  }

  Term unary() {
    if (peek().kind == Tok::Minus) {
      advance();
      Term inner = unary();
      if (auto* c = std::get_if<Constant>(&inner.node); c && c->value.is_number()) {
        return make_constant(Value::number(-c->value.as_number()));
      }
      return Term{Arithmetic{ArithOp::Sub, {make_constant(Value::number(0.0)), std::move(inner)}}};
    }
    return primary();
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: advance(); return make_constant(Value::number(t.number));
      case Tok::String: advance(); return make_constant(Value::symbol(t.text));
      case Tok::Ident: advance(); return make_variable(t.text);
      case Tok::LParen: {
        advance();
        Term inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::External: {
        ExternalCall call{advance().text, {}};
        expect(Tok::LParen, "'(' after external name");
        if (peek().kind != Tok::RParen) {
          call.args.push_back(term());
          while (peek().kind == Tok::Comma) {
            advance();
            call.args.push_back(term());
          }
        }
        expect(Tok::RParen, "')'");
        return Term{std::move(call)};
      }
      case Tok::Aggregate: return aggregate();
      default: fail("expected a term");
    }
  }

  Term aggregate() {
    const Token& name = peek();
    Aggregate agg{AggregateKind::Max, {}, {}};
    if (name.text == "max") agg.kind = AggregateKind::Max;
    else if (name.text == "min") agg.kind = AggregateKind::Min;
    else if (name.text == "avg") agg.kind = AggregateKind::Avg;
    else fail("unknown aggregate #" + name.text + " (expected #max, #min or #avg)");
    advance();
    expect(Tok::LBrace, "'{'");
    agg.elements.push_back(term());
    while (peek().kind == Tok::Comma) {
      advance();
      agg.elements.push_back(term());
    }
    if (peek().kind == Tok::Colon) {
      if (agg.elements.size() != 1) fail("a comprehension aggregate takes exactly one expression");
      advance();
      agg.condition.push_back(atom());
      while (peek().kind == Tok::Comma) {
        advance();
        agg.condition.push_back(atom());
      }
    }
    expect(Tok::RBrace, "'}'");
    return Term{std::move(agg)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) {
  Parser parser(detail::tokenize(text));
  return Program(parser.program());
}

FactSet parse_facts(std::string_view text) {
  Parser parser(detail::tokenize(text));
  return parser.facts();
}

}  // namespace semcloud::datalog
