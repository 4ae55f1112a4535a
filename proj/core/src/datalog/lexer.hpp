#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace semcloud::datalog::detail {

enum class Tok {
  Ident,
  Number,
  String,
  External,   // @name
  Aggregate,  // #name
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Colon,
  Arrow,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Plus,
  Minus,
  Star,
  Slash,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Tokenizes rule or fact text. Comments run from '%' or "//" to end of line.
std::vector<Token> tokenize(std::string_view text);

std::string describe(Tok kind);

}  // namespace semcloud::datalog::detail
