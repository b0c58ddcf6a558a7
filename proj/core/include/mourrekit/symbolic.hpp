#ifndef MOURREKIT_SYMBOLIC_HPP
#define MOURREKIT_SYMBOLIC_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mourrekit/errors.hpp"

namespace mourre::sym {

// ---- exact scalars: Gaussian rationals times integer powers of beta ----

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d = 1);

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }

  bool is_zero() const { return num == 0; }
  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  auto operator<=>(const Rational& o) const {
    // exact comparison via cross products (desk-scale magnitudes)
    return num * o.den <=> o.num * den;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct GaussianRational {
  Rational re, im;

  GaussianRational() = default;
  GaussianRational(Rational r, Rational i = Rational(0)) : re(r), im(i) {}
  static GaussianRational one() { return GaussianRational(Rational(1)); }
  static GaussianRational i_unit() { return GaussianRational(Rational(0), Rational(1)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  GaussianRational operator-() const { return {-re, -im}; }
  GaussianRational operator+(const GaussianRational& o) const { return {re + o.re, im + o.im}; }
  GaussianRational operator-(const GaussianRational& o) const { return {re - o.re, im - o.im}; }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussianRational operator/(const GaussianRational& o) const;
  bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
  auto operator<=>(const GaussianRational& o) const {
    if (auto c = re <=> o.re; c != 0) return c;
    return im <=> o.im;
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

// q * beta^pow
struct BetaScalar {
  GaussianRational q = GaussianRational::one();
  int beta_pow = 0;

  BetaScalar() = default;
  BetaScalar(GaussianRational g, int p = 0) : q(g), beta_pow(p) {}
  static BetaScalar one() { return {}; }

  bool is_zero() const { return q.is_zero(); }
  BetaScalar operator*(const BetaScalar& o) const { return {q * o.q, beta_pow + o.beta_pow}; }
  BetaScalar operator/(const BetaScalar& o) const { return {q / o.q, beta_pow - o.beta_pow}; }
  BetaScalar operator-() const { return {-q, beta_pow}; }
  std::complex<double> value(double beta) const { return q.value() * std::pow(beta, beta_pow); }
};

// ---- operator expression tree ----
//
// Grammar (see the printer for the emitted form):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*        '/' only by scalar factors
//   factor  := ['-'] primary
//   primary := scalar | atom | coeffapp | '[' expr ',' expr ']' | '(' expr ')'
//   atom    := 'T'digits['adj'] | 'x'digits | ident
//   coeffapp:= ('D'digits | 'S'digits('p'|'m')) '(' expr ')'
//   scalar  := digits['i'] | 'i' | 'beta'['^'['-']digits]
// Coefficient-operator applications D/S act on expressions that normalize to
// pure multiplication operators.

enum class CoeffOpKind { diff, shift_plus, shift_minus };

struct OpExpr {
  enum class Kind {
    one,
    shift_atom,   // axis, sign
    coord_atom,   // axis
    fun_atom,     // name
    sum,          // kids
    prod,         // kids
    scale,        // scalar * kids[0]
    commutator,   // [kids[0], kids[1]]
    coeff_op      // cop(axis) applied to kids[0]
  };

  Kind kind = Kind::one;
  int axis = 0;
  int sign = +1;
  CoeffOpKind cop = CoeffOpKind::diff;
  std::string name;
  BetaScalar scalar;
  std::vector<OpExpr> kids;

  static OpExpr one() { return OpExpr{}; }
  static OpExpr shift(int axis, int sign);
  static OpExpr coord(int axis);
  static OpExpr fun(std::string name);
  static OpExpr sum(std::vector<OpExpr> kids);
  static OpExpr prod(std::vector<OpExpr> kids);
  static OpExpr scaled(BetaScalar s, OpExpr e);
  static OpExpr commutator_of(OpExpr a, OpExpr b);
  static OpExpr coeff_apply(CoeffOpKind k, int axis, OpExpr e);
};

// recursive-descent parser; throws SyntaxError with position, UnknownSymbol
OpExpr parse(const std::string& text);

// printer emitting the same grammar; parse(print(e)) reproduces e
std::string print(const OpExpr& e);

}  // namespace mourre::sym

#endif
