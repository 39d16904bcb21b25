// SPDX-License-Identifier: Apache-2.0
#include "dualgrad/parser.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "dualgrad/error.hpp"

namespace dualgrad {
namespace {

enum class Tok { Ident, Real, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  bool adjacent_paren = false;  // identifier immediately followed by '('
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Punct, "", line, col};
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      t.adjacent_paren = j < s.size() && s[j] == '(';
      advance(j - i);
    } else if (is_digit(c) || (c == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      std::size_t j = i + 1;
      while (j < s.size() && is_digit(s[j])) ++j;
      bool real = false;
      if (j < s.size() && s[j] == '.' && j + 1 < s.size() && is_digit(s[j + 1])) {
        real = true;
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
        if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
          if (k < s.size() && is_digit(s[k])) {
            while (k < s.size() && is_digit(s[k])) ++k;
            j = k;
          }
        }
      }
      t.kind = real ? Tok::Real : Tok::Int;
      t.text = std::string(s.substr(i, j - i));
      advance(j - i);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      t.text = "->";
      advance(2);
    } else if (std::string_view("\\():.,=+{};").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* kw[] = {"let", "in", "letrec", "ifzero", "then", "else", "case",
                             "of",  "inl", "inr",   "fst",    "snd"};
  for (const char* k : kw)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  TermPtr parse_all() {
    TermPtr t = term();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after end of term");
    return t;
  }

  Type parse_type_all() {
    Type t = type();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "' after end of type");
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(peek().line, peek().col, msg); }

  bool at_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

  void expect_punct(std::string_view p) {
    if (!at_punct(p)) fail("expected '" + std::string(p) + "'" + found());
    next();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("expected '" + std::string(w) + "'" + found());
    next();
  }
  std::string found() const {
    if (peek().kind == Tok::End) return " but reached end of input";
    return " but found '" + peek().text + "'";
  }

  Symbol ident() {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier" + found());
    return Symbol(next().text);
  }

  Type lookup(Symbol s) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == s) return it->second;
    return {};
  }
  bool bound(Symbol s) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == s) return true;
    return false;
  }

  struct Scoped {
    Scoped(Parser& p, Symbol s, Type t) : p(p) { p.scope_.emplace_back(s, std::move(t)); }
    ~Scoped() { p.scope_.pop_back(); }
    Parser& p;
  };

  TermPtr term() {
    if (at_punct("\\")) {
      next();
      expect_punct("(");
      Symbol x = ident();
      expect_punct(":");
      Type t = type();
      expect_punct(")");
      expect_punct(".");
      Scoped sc(*this, x, t);
      return mk::lam(x, t, term());
    }
    if (at_word("let")) {
      next();
      Symbol x = ident();
      expect_punct(":");
      Type t = type();
      expect_punct("=");
      TermPtr rhs = term();
      expect_word("in");
      Scoped sc(*this, x, t);
      return mk::let(x, t, rhs, term());
    }
    if (at_word("letrec")) {
      next();
      Symbol f = ident();
      expect_punct(":");
      Type ft = type();
      expect_punct("=");
      expect_punct("\\");
      expect_punct("(");
      Symbol x = ident();
      expect_punct(":");
      Type xt = type();
      expect_punct(")");
      expect_punct(".");
      Scoped sf(*this, f, ft);
      TermPtr body;
      {
        Scoped sx(*this, x, xt);
        body = term();
      }
      expect_word("in");
      return mk::letrec(f, ft, x, xt, body, term());
    }
    if (at_word("ifzero")) {
      next();
      TermPtr c = term();
      expect_word("then");
      TermPtr t = term();
      expect_word("else");
      return mk::ifzero(c, t, term());
    }
    if (at_word("case")) {
      next();
      TermPtr s = term();
      expect_word("of");
      expect_punct("{");
      expect_word("inl");
      expect_punct("(");
      Symbol x = ident();
      expect_punct(")");
      expect_punct("->");
      TermPtr l;
      {
        Scoped sc(*this, x, {});
        l = term();
      }
      expect_punct(";");
      expect_word("inr");
      expect_punct("(");
      Symbol y = ident();
      expect_punct(")");
      expect_punct("->");
      TermPtr r;
      {
        Scoped sc(*this, y, {});
        r = term();
      }
      expect_punct("}");
      return mk::case_of(s, x, l, y, r);
    }
    return app();
  }

  bool starts_atom() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Real:
      case Tok::Int:
        return true;
      case Tok::Punct:
        return t.text == "(";
      case Tok::Ident:
        return !is_keyword(t.text) || t.text == "fst" || t.text == "snd" || t.text == "inl" || t.text == "inr";
      case Tok::End:
        return false;
    }
    return false;
  }

  TermPtr app() {
    if (!starts_atom()) fail("expected a term" + found());
    TermPtr t = atom();
    while (starts_atom()) t = mk::app(t, atom());
    return t;
  }

  TermPtr atom() {
    const Token& t = peek();
    if (t.kind == Tok::Real) {
      double v = 0.0;
      auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (r.ec != std::errc()) fail("real literal out of range");
      next();
      return mk::real(v);
    }
    if (t.kind == Tok::Int) {
      std::int64_t v = 0;
      auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (r.ec != std::errc()) fail("integer literal out of range");
      next();
      return mk::integer(v);
    }
    if (at_punct("(")) {
      next();
      if (at_punct(")")) {
        next();
        return mk::unit();
      }
      TermPtr a = term();
      if (at_punct(",")) {
        next();
        TermPtr b = term();
        expect_punct(")");
        return mk::pair(a, b);
      }
      expect_punct(")");
      return a;
    }
    if (at_word("fst")) {
      next();
      return mk::fst(atom_required());
    }
    if (at_word("snd")) {
      next();
      return mk::snd(atom_required());
    }
    if (at_word("inl") || at_word("inr")) {
      bool left = peek().text == "inl";
      next();
      expect_punct("(");
      TermPtr v = term();
      expect_punct(")");
      expect_punct(":");
      Type st = type();
      return left ? mk::inl(v, st) : mk::inr(v, st);
    }
    Token id = peek();
    Symbol s = ident();
    if (id.adjacent_paren && !bound(s)) {
      auto o = op_from_name(id.text);
      if (!o) throw SyntaxError(id.line, id.col, "unknown operation name '" + id.text + "'");
      expect_punct("(");
      std::vector<TermPtr> args;
      args.push_back(term());
      while (at_punct(",")) {
        next();
        args.push_back(term());
      }
      expect_punct(")");
      return mk::op(*o, std::move(args));
    }
    return mk::var(s, lookup(s));
  }

  TermPtr atom_required() {
    if (!starts_atom()) fail("expected an atom" + found());
    return atom();
  }

  Type type() {
    Type a = sum_type();
    if (at_punct("->")) {
      next();
      return Type::fun(a, type());
    }
    return a;
  }

  Type sum_type() {
    Type a = atom_type();
    while (at_punct("+")) {
      next();
      a = Type::sum(a, atom_type());
    }
    return a;
  }

  Type atom_type() {
    if (at_word("R")) {
      next();
      return Type::real();
    }
    if (at_word("Int")) {
      next();
      return Type::integer();
    }
    if (at_punct("(")) {
      next();
      if (at_punct(")")) {
        next();
        return Type::unit();
      }
      Type a = type();
      if (at_punct(",")) {
        next();
        Type b = type();
        expect_punct(")");
        return Type::pair(a, b);
      }
      expect_punct(")");
      return a;
    }
    fail("expected a type" + found());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::pair<Symbol, Type>> scope_;
};

}  // namespace

TermPtr parse_source(std::string_view text) { return Parser(text).parse_all(); }
Type parse_type(std::string_view text) { return Parser(text).parse_type_all(); }

}  // namespace dualgrad
