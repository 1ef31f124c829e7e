#include "cajal/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace cajal {

namespace {

enum class Tok {
  Ident,
  Number,
  KwTrue,
  KwFalse,
  KwSucc,
  KwIter,
  KwIf,
  KwThen,
  KwElse,
  KwBool,
  KwNat,
  Backslash,
  Colon,
  Dot,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Arrow,     // ->
  Lollipop,  // -o
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      std::string word(src.substr(i, j - i));
      Tok kind = Tok::Ident;
      if (word == "tt") kind = Tok::KwTrue;
      else if (word == "ff") kind = Tok::KwFalse;
      else if (word == "succ") kind = Tok::KwSucc;
      else if (word == "iter") kind = Tok::KwIter;
      else if (word == "if") kind = Tok::KwIf;
      else if (word == "then") kind = Tok::KwThen;
      else if (word == "else") kind = Tok::KwElse;
      else if (word == "Bool") kind = Tok::KwBool;
      else if (word == "Nat") kind = Tok::KwNat;
      out.push_back({kind, word, pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", pos});
      advance(2);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == 'o') {
      out.push_back({Tok::Lollipop, "-o", pos});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '\\': kind = Tok::Backslash; break;
      case ':': kind = Tok::Colon; break;
      case '.': kind = Tok::Dot; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      default:
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), pos});
    advance(1);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

constexpr std::size_t kMaxNumeral = 1'000'000;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr parse_program() {
    Expr e = expr();
    expect(Tok::End, "end of input");
    return e;
  }

  Ty parse_type_only() {
    Ty t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }

  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos.line, t.pos.column, "expected " + expected + ", found " + found);
  }

  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail(what);
    return next();
  }

  Ty type() {
    Ty lhs = type_atom();
    if (at(Tok::Lollipop)) {
      next();
      return Ty::fn(lhs, type());
    }
    return lhs;
  }

  Ty type_atom() {
    if (at(Tok::KwBool)) {
      next();
      return Ty::boolean();
    }
    if (at(Tok::KwNat)) {
      next();
      return Ty::nat();
    }
    if (at(Tok::LParen)) {
      next();
      Ty t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("a type");
  }

  Expr expr() {
    const Token& t = peek();
    if (t.kind == Tok::Backslash) {
      SourcePos p = next().pos;
      std::string x = expect(Tok::Ident, "a binder name").text;
      expect(Tok::Colon, "':' after lambda binder");
      Ty ann = type();
      expect(Tok::Dot, "'.'");
      return make_lam(x, ann, expr(), p);
    }
    if (t.kind == Tok::KwIf) {
      SourcePos p = next().pos;
      Expr c = expr();
      expect(Tok::KwThen, "'then'");
      Expr a = expr();
      expect(Tok::KwElse, "'else'");
      return make_if(c, a, expr(), p);
    }
    return application();
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::Number:
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  Expr application() {
    Expr head = term();
    while (starts_atom()) {
      SourcePos p = peek().pos;
      head = make_app(head, atom(), p);
    }
    return head;
  }

  Expr term() {
    if (at(Tok::KwSucc)) {
      SourcePos p = next().pos;
      return make_succ(at(Tok::KwSucc) ? term() : atom(), p);
    }
    if (at(Tok::KwIter)) {
      SourcePos p = next().pos;
      Expr base = atom();
      expect(Tok::LBrace, "'{'");
      std::string y = expect(Tok::Ident, "an iterator binder").text;
      expect(Tok::Arrow, "'->'");
      Expr step = expr();
      expect(Tok::RBrace, "'}'");
      Expr count = atom();
      return make_iter(base, y, step, count, p);
    }
    return atom();
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        const Token& tok = next();
        return make_var(tok.text, tok.pos);
      }
      case Tok::KwTrue:
        return make_true(next().pos);
      case Tok::KwFalse:
        return make_false(next().pos);
      case Tok::Number: {
        const Token& tok = next();
        if (tok.text.size() > 7 || std::stoull(tok.text) > kMaxNumeral)
          throw ParseError(tok.pos.line, tok.pos.column, "numeral too large: " + tok.text);
        std::size_t n = std::stoull(tok.text);
        Expr e = make_zero(tok.pos);
        for (std::size_t i = 0; i < n; ++i) e = make_succ(e, tok.pos);
        return e;
      }
      case Tok::LParen: {
        next();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        fail("an expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Precedence levels for printing: 0 = open expression, 1 = application
// head, 2 = atom.
std::string pretty_at(const Expr& e, int level) {
  auto paren = [&](std::string s, int needs) { return level > needs ? "(" + s + ")" : s; };
  if (auto n = as_numeral(e)) return std::to_string(*n);
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, True>) {
          return "tt";
        } else if constexpr (std::is_same_v<T, False>) {
          return "ff";
        } else if constexpr (std::is_same_v<T, Zero>) {
          return "0";
        } else if constexpr (std::is_same_v<T, Succ>) {
          return paren("succ " + pretty_at(n.body, 2), 1);
        } else if constexpr (std::is_same_v<T, Iter>) {
          return paren("iter " + pretty_at(n.base, 2) + " {" + n.binder + " -> " +
                           pretty_at(n.step, 0) + "} " + pretty_at(n.count, 2),
                       1);
        } else if constexpr (std::is_same_v<T, Lam>) {
          return paren("\\" + n.binder + ":" + to_string(n.annotation) + ". " +
                           pretty_at(n.body, 0),
                       0);
        } else if constexpr (std::is_same_v<T, App>) {
          return paren(pretty_at(n.fun, 1) + " " + pretty_at(n.arg, 2), 1);
        } else {
          return paren("if " + pretty_at(n.cond, 0) + " then " + pretty_at(n.then_branch, 0) +
                           " else " + pretty_at(n.else_branch, 0),
                       0);
        }
      },
      e.node().v);
}

}  // namespace

Expr parse(std::string_view source) {
  Parser p(lex(source));
  return alpha_rename(p.parse_program());
}

Ty parse_type(std::string_view source) {
  Parser p(lex(source));
  return p.parse_type_only();
}

std::string pretty(const Expr& e) { return pretty_at(e, 0); }

}  // namespace cajal
