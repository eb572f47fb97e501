#include <algorithm>
#include <charconv>
#include <cctype>
#include <set>
#include <utility>

#include "lyapguard/fof.hpp"

namespace lyapguard {
namespace {

constexpr int kMaxDepth = 200;

enum class Tok {
  LParen, RParen, LBracket, RBracket, Comma, Colon, Dot, Bang, Question, Amp, Implies,
  Eq, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Caret, Number, Upper, Lower, End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
  bool newline_before = false;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  bool newline = false;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        newline = true;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    t.newline_before = newline;
    newline = false;

    const auto two = src.substr(i, 2);
    std::size_t len = 1;
    if (two == "=>") {
      t.kind = Tok::Implies;
      len = 2;
    } else if (two == "<=") {
      t.kind = Tok::Le;
      len = 2;
    } else if (two == ">=") {
      t.kind = Tok::Ge;
      len = 2;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Tok::Number;
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        const std::size_t frac = j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j == frac) {
          throw FofParseError(FofParseError::Kind::Lexical, line, col,
                              "malformed number: digits expected after '.'");
        }
      }
      len = j - i;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      t.kind = std::isupper(static_cast<unsigned char>(c)) ? Tok::Upper : Tok::Lower;
      std::size_t j = i;
      while (j < src.size() && is_word(src[j])) ++j;
      len = j - i;
    } else {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case ',': t.kind = Tok::Comma; break;
        case ':': t.kind = Tok::Colon; break;
        case '.': t.kind = Tok::Dot; break;
        case '!': t.kind = Tok::Bang; break;
        case '?': t.kind = Tok::Question; break;
        case '&': t.kind = Tok::Amp; break;
        case '=': t.kind = Tok::Eq; break;
        case '<': t.kind = Tok::Lt; break;
        case '>': t.kind = Tok::Gt; break;
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '^': t.kind = Tok::Caret; break;
        default: {
          std::string shown = std::isprint(static_cast<unsigned char>(c))
                                  ? std::string(1, c)
                                  : "\\x" + std::to_string(static_cast<unsigned char>(c));
          throw FofParseError(FofParseError::Kind::Lexical, line, col,
                              "unexpected character '" + shown + "'");
        }
      }
    }
    t.text = std::string(src.substr(i, len));
    advance(len);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  end.newline_before = newline;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  FofConjecture conjecture() {
    FofConjecture c;
    expect_word("fof");
    expect(Tok::LParen, "'('");
    const Token& name = peek();
    if (name.kind != Tok::Lower && name.kind != Tok::Upper && name.kind != Tok::Number) {
      fail(name, "expected formula name, got " + describe(name));
    }
    c.name = take().text;
    expect(Tok::Comma, "','");
    const Token& role = peek();
    if (role.kind != Tok::Lower || role.text != "conjecture") {
      fail(role, "expected role 'conjecture', got " + describe(role));
    }
    take();
    expect(Tok::Comma, "','");

    expect(Tok::Bang, "'!'");
    c.universal_vars = var_list();
    expect(Tok::Colon, "':'");
    if (peek().kind == Tok::Question) {
      take();
      c.existential_vars = var_list();
      expect(Tok::Colon, "':'");
    }

    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::Implies) {
      c.hypotheses.emplace_back();
      c.hypotheses.back().push_back(atom());
      while (peek().kind == Tok::Amp) {
        const bool new_line = peek().newline_before;
        take();
        if (new_line) c.hypotheses.emplace_back();
        c.hypotheses.back().push_back(atom());
      }
    }
    expect(Tok::Implies, "'=>'");
    c.conclusion = atom();
    expect(Tok::RParen, "')'");
    expect(Tok::RParen, "')'");
    expect(Tok::Dot, "'.'");
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after '.'");
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& t, const std::string& message) const {
    throw FofParseError(FofParseError::Kind::Syntax, t.line, t.column, message);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what + ", got " + describe(peek()));
    take();
  }

  void expect_word(const char* word) {
    if (peek().kind != Tok::Lower || peek().text != word) {
      fail(peek(), std::string("expected '") + word + "', got " + describe(peek()));
    }
    take();
  }

  std::vector<std::string> var_list() {
    expect(Tok::LBracket, "'['");
    std::vector<std::string> vars;
    while (true) {
      const Token& t = peek();
      if (t.kind != Tok::Upper) fail(t, "expected variable, got " + describe(t));
      if (bound_.count(t.text)) fail(t, "variable " + t.text + " bound twice");
      bound_.insert(t.text);
      vars.push_back(take().text);
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::RBracket, "']'");
    return vars;
  }

  Atom atom() {
    Atom a;
    a.lhs = expr(0);
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Eq: a.op = RelOp::Eq; break;
      case Tok::Lt: a.op = RelOp::Lt; break;
      case Tok::Le: a.op = RelOp::Le; break;
      case Tok::Gt: a.op = RelOp::Gt; break;
      case Tok::Ge: a.op = RelOp::Ge; break;
      default: fail(t, "expected relation (=, <, <=, >, >=), got " + describe(t));
    }
    take();
    a.rhs = expr(0);
    return a;
  }

  void enter(int depth) const {
    if (depth > kMaxDepth) fail(peek(), "expression nested too deeply");
  }

  Expr expr(int depth) {
    enter(depth);
    Expr lhs = term(depth);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const char op = take().text[0];
      lhs = Expr::binary(op, std::move(lhs), term(depth));
    }
    return lhs;
  }

  Expr term(int depth) {
    Expr lhs = unary(depth);
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const char op = take().text[0];
      lhs = Expr::binary(op, std::move(lhs), unary(depth));
    }
    return lhs;
  }

  Expr unary(int depth) {
    if (peek().kind == Tok::Minus) {
      enter(depth + 1);
      take();
      return Expr::neg(unary(depth + 1));
    }
    Expr base = primary(depth);
    if (peek().kind == Tok::Caret) {
      take();
      const Token& t = peek();
      if (t.kind != Tok::Number || t.text.find('.') != std::string::npos) {
        fail(t, "expected integer exponent after '^', got " + describe(t));
      }
      int exponent = 0;
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), exponent);
      if (res.ec != std::errc() || exponent > 64) fail(t, "exponent out of range");
      take();
      base = Expr::power(std::move(base), exponent);
    }
    return base;
  }

  Expr primary(int depth) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        double value = 0.0;
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (res.ec != std::errc()) fail(t, "number out of range");
        take();
        Expr e;
        e.kind = Expr::Kind::Number;
        e.number = value;
        return e;
      }
      case Tok::Upper: {
        if (!bound_.count(t.text)) {
          throw FofParseError(FofParseError::Kind::UnboundVariable, t.line, t.column,
                              "unbound variable " + t.text);
        }
        return Expr::var(take().text);
      }
      case Tok::Lower: {
        static const std::set<std::string, std::less<>> fns = {"abs", "sqrt", "sin", "cos"};
        if (!fns.count(t.text)) fail(t, "unsupported function " + describe(t));
        std::string name = take().text;
        expect(Tok::LParen, "'('");
        enter(depth + 1);
        Expr arg = expr(depth + 1);
        expect(Tok::RParen, "')'");
        return Expr::call(std::move(name), std::move(arg));
      }
      case Tok::LParen: {
        take();
        enter(depth + 1);
        Expr inner = expr(depth + 1);
        expect(Tok::RParen, "')'");
        return Expr::group(std::move(inner));
      }
      default:
        fail(t, "expected term, got " + describe(t));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string, std::less<>> bound_;
};

std::string_view kind_label(FofParseError::Kind kind) {
  switch (kind) {
    case FofParseError::Kind::Lexical: return "lexical error";
    case FofParseError::Kind::Syntax: return "syntax error";
    case FofParseError::Kind::UnboundVariable: return "unbound variable";
  }
  return "error";
}

}  // namespace

FofParseError::FofParseError(Kind kind, std::size_t line, std::size_t column,
                             const std::string& message)
    : Error(std::string(kind_label(kind)) + " at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

FofConjecture parse(std::string_view text) {
  Parser p(lex(text));
  return p.conjecture();
}

}  // namespace lyapguard
