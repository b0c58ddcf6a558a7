#include "mourrekit/symbolic.hpp"

#include <cctype>
#include <numeric>

namespace mourre::sym {

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw ValidationError("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator-() const { return Rational(-num, den); }
Rational Rational::operator+(const Rational& o) const {
  return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const { return Rational(num * o.num, den * o.den); }
Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw ValidationError("rational: division by zero");
  return Rational(num * o.den, den * o.num);
}

GaussianRational GaussianRational::operator/(const GaussianRational& o) const {
  if (o.is_zero()) throw ValidationError("scalar: division by zero");
  const Rational n2 = o.re * o.re + o.im * o.im;
  // (a+bi)/(c+di) = (a+bi)(c-di)/(c^2+d^2)
  GaussianRational conj{o.re, -o.im};
  GaussianRational prod = (*this) * conj;
  return {prod.re / n2, prod.im / n2};
}

OpExpr OpExpr::shift(int axis, int sign) {
  OpExpr e;
  e.kind = Kind::shift_atom;
  e.axis = axis;
  e.sign = sign;
  return e;
}
OpExpr OpExpr::coord(int axis) {
  OpExpr e;
  e.kind = Kind::coord_atom;
  e.axis = axis;
  return e;
}
OpExpr OpExpr::fun(std::string name) {
  OpExpr e;
  e.kind = Kind::fun_atom;
  e.name = std::move(name);
  return e;
}
OpExpr OpExpr::sum(std::vector<OpExpr> kids) {
  OpExpr e;
  e.kind = Kind::sum;
  e.kids = std::move(kids);
  return e;
}
OpExpr OpExpr::prod(std::vector<OpExpr> kids) {
  OpExpr e;
  e.kind = Kind::prod;
  e.kids = std::move(kids);
  return e;
}
OpExpr OpExpr::scaled(BetaScalar s, OpExpr inner) {
  OpExpr e;
  e.kind = Kind::scale;
  e.scalar = s;
  e.kids.push_back(std::move(inner));
  return e;
}
OpExpr OpExpr::commutator_of(OpExpr a, OpExpr b) {
  OpExpr e;
  e.kind = Kind::commutator;
  e.kids.push_back(std::move(a));
  e.kids.push_back(std::move(b));
  return e;
}
OpExpr OpExpr::coeff_apply(CoeffOpKind k, int axis, OpExpr inner) {
  OpExpr e;
  e.kind = Kind::coeff_op;
  e.cop = k;
  e.axis = axis;
  e.kids.push_back(std::move(inner));
  return e;
}

// ---------------- parser ----------------

namespace {

struct Token {
  enum class Type {
    number,     // integer literal
    imag,       // integer followed by i, or bare i
    beta,
    word,       // identifier-like run: T1, T1adj, x2, D1, S1m, V, W, ...
    lparen, rparen, lbrack, rbrack,
    plus, minus, star, slash, caret, comma,
    end
  };
  Type type = Type::end;
  long long value = 0;
  std::string text;
  std::size_t pos = 0;
};

struct Lexer {
  const std::string& s;
  std::size_t i = 0;

  explicit Lexer(const std::string& text) : s(text) {}

  Token next() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    Token t;
    t.pos = i;
    if (i >= s.size()) return t;
    const char c = s[i];
    auto simple = [&](Token::Type ty) {
      t.type = ty;
      ++i;
      return t;
    };
    switch (c) {
      case '(': return simple(Token::Type::lparen);
      case ')': return simple(Token::Type::rparen);
      case '[': return simple(Token::Type::lbrack);
      case ']': return simple(Token::Type::rbrack);
      case '+': return simple(Token::Type::plus);
      case '-': return simple(Token::Type::minus);
      case '*': return simple(Token::Type::star);
      case '/': return simple(Token::Type::slash);
      case '^': return simple(Token::Type::caret);
      case ',': return simple(Token::Type::comma);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.value = std::stoll(s.substr(i, j - i));
      if (j < s.size() && s[j] == 'i' &&
          (j + 1 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[j + 1])))) {
        t.type = Token::Type::imag;
        i = j + 1;
      } else {
        t.type = Token::Type::number;
        i = j;
      }
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      t.text = s.substr(i, j - i);
      i = j;
      if (t.text == "beta") {
        t.type = Token::Type::beta;
      } else if (t.text == "i") {
        t.type = Token::Type::imag;
        t.value = 1;
      } else {
        t.type = Token::Type::word;
      }
      return t;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", i);
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t k = 0;

  explicit Parser(const std::string& text) {
    Lexer lx(text);
    for (;;) {
      Token t = lx.next();
      toks.push_back(t);
      if (t.type == Token::Type::end) break;
    }
  }

  const Token& peek() const { return toks[k]; }
  Token eat() { return toks[k++]; }
  void expect(Token::Type ty, const char* what) {
    if (peek().type != ty) throw SyntaxError(std::string("expected ") + what, peek().pos);
    ++k;
  }

  OpExpr parse_expr() {
    OpExpr first = parse_term();
    std::vector<OpExpr> kids;
    kids.push_back(std::move(first));
    while (peek().type == Token::Type::plus || peek().type == Token::Type::minus) {
      const bool neg = eat().type == Token::Type::minus;
      OpExpr t = parse_term();
      if (neg) t = OpExpr::scaled(BetaScalar(-GaussianRational::one()), std::move(t));
      kids.push_back(std::move(t));
    }
    if (kids.size() == 1) return std::move(kids.front());
    return OpExpr::sum(std::move(kids));
  }

  OpExpr parse_term() {
    std::vector<OpExpr> kids;
    kids.push_back(parse_factor());
    while (peek().type == Token::Type::star || peek().type == Token::Type::slash) {
      const bool div = eat().type == Token::Type::slash;
      const std::size_t pos = peek().pos;
      OpExpr f = parse_factor();
      if (div) {
        BetaScalar s;
        if (!try_scalar(f, s)) throw SyntaxError("division by a non-scalar expression", pos);
        kids.push_back(OpExpr::scaled(BetaScalar::one() / s, OpExpr::one()));
      } else {
        kids.push_back(std::move(f));
      }
    }
    if (kids.size() == 1) return std::move(kids.front());
    return OpExpr::prod(std::move(kids));
  }

  OpExpr parse_factor() {
    if (peek().type == Token::Type::minus) {
      eat();
      return OpExpr::scaled(BetaScalar(-GaussianRational::one()), parse_factor());
    }
    return parse_primary();
  }

  OpExpr parse_primary() {
    const Token t = peek();
    switch (t.type) {
      case Token::Type::number:
        eat();
        return OpExpr::scaled(BetaScalar(GaussianRational(Rational(t.value))), OpExpr::one());
      case Token::Type::imag:
        eat();
        return OpExpr::scaled(
            BetaScalar(GaussianRational(Rational(0), Rational(t.value))), OpExpr::one());
      case Token::Type::beta: {
        eat();
        int p = 1;
        if (peek().type == Token::Type::caret) {
          eat();
          bool neg = false;
          if (peek().type == Token::Type::minus) {
            eat();
            neg = true;
          }
          if (peek().type != Token::Type::number)
            throw SyntaxError("expected integer exponent after '^'", peek().pos);
          p = static_cast<int>(eat().value);
          if (neg) p = -p;
        }
        return OpExpr::scaled(BetaScalar(GaussianRational::one(), p), OpExpr::one());
      }
      case Token::Type::lparen: {
        eat();
        OpExpr e = parse_expr();
        expect(Token::Type::rparen, "')'");
        return e;
      }
      case Token::Type::lbrack: {
        eat();
        OpExpr a = parse_expr();
        expect(Token::Type::comma, "','");
        OpExpr b = parse_expr();
        expect(Token::Type::rbrack, "']'");
        return OpExpr::commutator_of(std::move(a), std::move(b));
      }
      case Token::Type::word:
        return parse_word();
      default:
        throw SyntaxError("expected an expression", t.pos);
    }
  }

  // classify T<d>[adj] | x<d> | D<d>(...) | S<d>p/m(...) | ident
  OpExpr parse_word() {
    const Token t = eat();
    const std::string& w = t.text;
    // surface syntax is 1-based, the tree stores 0-based axes
    auto axis_of = [&](std::size_t from, std::size_t to) -> int {
      const int axis = std::stoi(w.substr(from, to - from));
      if (axis < 1 || axis > 3)
        throw SyntaxError("axis index must be 1, 2 or 3", t.pos);
      return axis - 1;
    };
    auto digits_span = [&](std::size_t from) {
      std::size_t j = from;
      while (j < w.size() && std::isdigit(static_cast<unsigned char>(w[j]))) ++j;
      return j;
    };
    if (w.size() >= 2 && (w[0] == 'T' || w[0] == 'x') &&
        std::isdigit(static_cast<unsigned char>(w[1]))) {
      const std::size_t j = digits_span(1);
      if (w[0] == 'x' && j == w.size()) return OpExpr::coord(axis_of(1, j));
      if (w[0] == 'T') {
        if (j == w.size()) return OpExpr::shift(axis_of(1, j), +1);
        if (w.substr(j) == "adj") return OpExpr::shift(axis_of(1, j), -1);
      }
      throw UnknownSymbol("unknown symbol '" + w + "'");
    }
    if (w.size() >= 2 && (w[0] == 'D' || w[0] == 'S') &&
        std::isdigit(static_cast<unsigned char>(w[1])) &&
        peek().type == Token::Type::lparen) {
      const std::size_t j = digits_span(1);
      CoeffOpKind k_;
      if (w[0] == 'D' && j == w.size()) {
        k_ = CoeffOpKind::diff;
      } else if (w[0] == 'S' && j + 1 == w.size() && (w[j] == 'p' || w[j] == 'm')) {
        k_ = w[j] == 'p' ? CoeffOpKind::shift_plus : CoeffOpKind::shift_minus;
      } else {
        throw UnknownSymbol("unknown symbol '" + w + "'");
      }
      const int axis = axis_of(1, j);
      eat();  // '('
      OpExpr arg = parse_expr();
      expect(Token::Type::rparen, "')'");
      return OpExpr::coeff_apply(k_, axis, std::move(arg));
    }
    // plain function identifier
    return OpExpr::fun(w);
  }

  // collapse a pure-scalar expression into a BetaScalar; false if it mentions
  // any operator atom
  static bool try_scalar(const OpExpr& e, BetaScalar& out) {
    switch (e.kind) {
      case OpExpr::Kind::one:
        out = BetaScalar::one();
        return true;
      case OpExpr::Kind::scale: {
        BetaScalar inner;
        if (!try_scalar(e.kids[0], inner)) return false;
        out = e.scalar * inner;
        return true;
      }
      case OpExpr::Kind::prod: {
        BetaScalar acc = BetaScalar::one();
        for (const auto& k : e.kids) {
          BetaScalar s;
          if (!try_scalar(k, s)) return false;
          acc = acc * s;
        }
        out = acc;
        return true;
      }
      case OpExpr::Kind::sum: {
        // sums collapse only when all parts share the beta power
        bool first = true;
        BetaScalar acc;
        for (const auto& k : e.kids) {
          BetaScalar s;
          if (!try_scalar(k, s)) return false;
          if (first) {
            acc = s;
            first = false;
          } else {
            if (s.beta_pow != acc.beta_pow) return false;
            acc.q = acc.q + s.q;
          }
        }
        out = acc;
        return true;
      }
      default:
        return false;
    }
  }
};

}  // namespace

OpExpr parse(const std::string& text) {
  Parser p(text);
  OpExpr e = p.parse_expr();
  if (p.peek().type != Token::Type::end)
    throw SyntaxError("trailing input", p.peek().pos);
  return e;
}

// ---------------- printer ----------------

namespace {

std::string print_rational(const Rational& r) {
  std::string s = std::to_string(r.num);
  if (r.den != 1) s += "/" + std::to_string(r.den);
  return s;
}

// prints q * beta^p as a '*'-joined scalar prefix, e.g. (-1/2)*i*beta^2;
// every emitted form reparses under the same grammar
std::string print_scalar(const BetaScalar& s) {
  std::string out;
  const bool pure_re = s.q.im.is_zero();
  const bool pure_im = s.q.re.is_zero() && !s.q.im.is_zero();
  auto wrap = [](const Rational& r) {
    std::string t = print_rational(r);
    if (r.den != 1 || r.num < 0) t = "(" + t + ")";
    return t;
  };
  if (pure_re) {
    out = wrap(s.q.re);
  } else if (pure_im) {
    out = s.q.im == Rational(1) ? "i" : wrap(s.q.im) + "*i";
  } else {
    out = "(" + print_rational(s.q.re) + " + " + wrap(s.q.im) + "*i)";
  }
  if (s.beta_pow == 1) {
    out += "*beta";
  } else if (s.beta_pow != 0) {
    out += "*beta^" + std::to_string(s.beta_pow);
  }
  // suppress a bare unit in front of beta powers
  if (out.rfind("1*", 0) == 0 && s.beta_pow != 0) out = out.substr(2);
  return out;
}

int precedence(const OpExpr& e) {
  switch (e.kind) {
    case OpExpr::Kind::sum: return 0;
    case OpExpr::Kind::prod:
    case OpExpr::Kind::scale: return 1;
    default: return 2;
  }
}

std::string print_rec(const OpExpr& e, int parent_prec) {
  std::string out;
  switch (e.kind) {
    case OpExpr::Kind::one: out = "1"; break;
    case OpExpr::Kind::shift_atom:
      out = "T" + std::to_string(e.axis + 1) + (e.sign > 0 ? "" : "adj");
      break;
    case OpExpr::Kind::coord_atom: out = "x" + std::to_string(e.axis + 1); break;
    case OpExpr::Kind::fun_atom: out = e.name; break;
    case OpExpr::Kind::sum: {
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += " + ";
        out += print_rec(e.kids[i], 0);
      }
      break;
    }
    case OpExpr::Kind::prod: {
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) out += "*";
        out += print_rec(e.kids[i], 1);
      }
      break;
    }
    case OpExpr::Kind::scale: {
      out = print_scalar(e.scalar);
      if (!(e.kids[0].kind == OpExpr::Kind::one)) out += "*" + print_rec(e.kids[0], 1);
      break;
    }
    case OpExpr::Kind::commutator:
      out = "[" + print_rec(e.kids[0], 0) + ", " + print_rec(e.kids[1], 0) + "]";
      return out;  // brackets never need parens
    case OpExpr::Kind::coeff_op: {
      std::string head;
      switch (e.cop) {
        case CoeffOpKind::diff: head = "D"; break;
        case CoeffOpKind::shift_plus: head = "S"; break;
        case CoeffOpKind::shift_minus: head = "S"; break;
      }
      head += std::to_string(e.axis + 1);
      if (e.cop == CoeffOpKind::shift_plus) head += "p";
      if (e.cop == CoeffOpKind::shift_minus) head += "m";
      out = head + "(" + print_rec(e.kids[0], 0) + ")";
      return out;
    }
  }
  if (precedence(e) < parent_prec) out = "(" + out + ")";
  return out;
}

}  // namespace

std::string print(const OpExpr& e) { return print_rec(e, 0); }

}  // namespace mourre::sym
