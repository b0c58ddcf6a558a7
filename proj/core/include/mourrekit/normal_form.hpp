#ifndef MOURREKIT_NORMAL_FORM_HPP
#define MOURREKIT_NORMAL_FORM_HPP

#include <Eigen/Dense>
#include <map>
#include <string>

#include "mourrekit/grid.hpp"
#include "mourrekit/symbolic.hpp"

namespace mourre::sym {

// Canonical coefficient factor: a coordinate power or a function atom carrying
// per-axis shift and forward-difference applications. Canonical factors have
// shift <= 0 per axis (positive shifts are rewritten through S+ = 1 + beta*D)
// and never mix a negative shift with a difference on the same axis
// (S-D = (1 - S-)/beta).
struct CFactor {
  enum class Base { coord, fun };
  Base base = Base::fun;
  int axis = 0;
  std::string name;
  std::array<int, 3> shift{0, 0, 0};
  std::array<int, 3> diff{0, 0, 0};
  int power = 1;

  static CFactor coord(int axis) {
    CFactor f;
    f.base = Base::coord;
    f.axis = axis;
    return f;
  }
  static CFactor fun(std::string n) {
    CFactor f;
    f.name = std::move(n);
    return f;
  }

  auto key() const { return std::tie(base, axis, name, shift, diff); }
  bool operator==(const CFactor& o) const { return key() == o.key() && power == o.power; }
  bool operator<(const CFactor& o) const { return key() < o.key(); }
};

// scalar * beta^pow * product of factors
struct CMono {
  GaussianRational q = GaussianRational::one();
  int beta_pow = 0;
  std::vector<CFactor> factors;  // sorted, merged

  bool is_zero() const { return q.is_zero(); }
};

using CPoly = std::vector<CMono>;  // canonical-sorted sum

// per-axis exponent vector of beta-shifts, e.g. {1,-1,0} = T1 * T2adj
using ShiftWord = std::array<int, 3>;

struct NormalTerm {
  CMono mono;
  ShiftWord word{0, 0, 0};
};

// Finite sum of Scale * Mult(coefficient) * ShiftWord with multiplications
// left of all shifts; terms sorted by (word, factors, beta power) and merged.
struct NormalForm {
  std::vector<NormalTerm> terms;
  bool operator==(const NormalForm& o) const;
};

NormalForm normalize(const OpExpr& e);

// true iff both sides have identical canonical forms
bool equal(const OpExpr& a, const OpExpr& b);

std::string print(const NormalForm& nf);
OpExpr to_opexpr(const NormalForm& nf);

// ---- numeric evaluation ----

using Bindings = std::map<std::string, Field>;

// dense matrix of a normal form on a concrete grid; every Fun atom must be
// bound. Coordinates bind to the sawtooth samples, shifts and differences to
// the wrapped index operations.
Eigen::MatrixXcd eval_normal(const NormalForm& nf, const GridSpec& g, const Bindings& b);

// dense matrix of an un-normalized expression, composing operators directly
Eigen::MatrixXcd eval_expr(const OpExpr& e, const GridSpec& g, const Bindings& b);

// matrix-free action of an un-normalized expression on a vector
Eigen::VectorXcd apply_expr(const OpExpr& e, const GridSpec& g, const Bindings& b,
                            const Eigen::VectorXcd& u);

// ---- golden identity corpus ----

struct GoldenIdentity {
  std::string name;
  std::string lhs;
  std::string rhs;
  int min_dim;  // smallest grid dimension the identity mentions
};

// Commutation identities for shift-built conjugate operators: the shift-form
// decomposition of A, the first-order shift/potential commutators, and the
// two double-commutator expansions (distinct and repeated axes).
const std::vector<GoldenIdentity>& golden_identities();

struct SymcheckRow {
  std::string name;
  bool symbolic_ok = false;
  bool numeric_ok = false;
  double numeric_err = 0.0;
};

struct SymcheckReport {
  std::vector<SymcheckRow> rows;
  bool all_ok = false;
  double seconds = 0.0;
};

// Runs the golden corpus: equal() per identity plus the numeric
// cross-validation of both sides on small grids with seeded random real
// potentials (interior-compressed Frobenius comparison, tolerance tol).
// flip_sign_of names an identity whose right side is negated first: the
// negative control.
SymcheckReport run_symcheck(std::uint64_t seed, double tol = 1e-10,
                            const std::string& flip_sign_of = "");

}  // namespace mourre::sym

#endif
