#ifndef MOURREKIT_OPERATORS_HPP
#define MOURREKIT_OPERATORS_HPP

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mourrekit/grid.hpp"

namespace mourre {

inline constexpr Eigen::Index kDefaultDenseCap = 4096;

// Linear operator on fields of one grid: an application routine plus
// structural flags and an optional cached dense materialization. Handles are
// cheap to copy and immutable after construction; the dense matrix is built
// once on first request (column by column through apply).
class LinearOperator {
 public:
  using ApplyFn = std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

  struct Flags {
    bool self_adjoint = false;
    bool fourier_diagonal = false;
    bool real_coefficients = false;
  };

  LinearOperator() = default;
  LinearOperator(GridSpec g, std::string label, Flags flags, ApplyFn fn,
                 std::optional<Field> symbol = std::nullopt);

  static LinearOperator from_dense(const GridSpec& g, std::string label, Flags flags,
                                   Eigen::MatrixXcd M);

  Field apply(const Field& u) const;
  Eigen::VectorXcd apply_values(const Eigen::VectorXcd& v) const;

  const GridSpec& grid() const { return impl_->grid; }
  const std::string& label() const { return impl_->label; }
  const Flags& flags() const { return impl_->flags; }
  // multiplier samples on the frequency grid; nullptr unless fourier_diagonal
  const Field* symbol() const { return impl_->symbol ? &*impl_->symbol : nullptr; }
  Eigen::Index size() const { return impl_->grid.total(); }
  bool valid() const { return impl_ != nullptr; }

  const Eigen::MatrixXcd& dense(Eigen::Index cap = kDefaultDenseCap) const;

 private:
  struct Impl {
    GridSpec grid;
    std::string label;
    Flags flags;
    ApplyFn fn;
    std::optional<Field> symbol;
    mutable std::mutex mu;
    mutable std::optional<Eigen::MatrixXcd> dense_cache;
  };
  std::shared_ptr<Impl> impl_;
};

// ---- concrete operators (axis is 0-based, axis < grid.d) ----

// (T u)(x) = u(x + sign*beta e_axis); exact index permutation, unitary
LinearOperator shift_op(const GridSpec& g, int axis, int sign);

// forward difference (T - 1)/beta
LinearOperator difference_op(const GridSpec& g, int axis);

// (T - T*)/(2 i beta); self-adjoint Fourier multiplier sin(beta xi)/beta
LinearOperator q_op(const GridSpec& g, int axis);

// kinetic operator, Fourier multiplier |xi|^2/2
LinearOperator h0_op(const GridSpec& g);

// multiplication by the sawtooth coordinate x_axis
LinearOperator coordinate_op(const GridSpec& g, int axis);

// conjugate operator A = 1/2 sum_j (Q_j x_j + x_j Q_j); exactly hermitian
LinearOperator a_op(const GridSpec& g);

// Shift-product decomposition of A:
//   A = 1/(2 i beta) sum_j (x_j T_j - x_j T_j*) + 1/(4 i) sum_j (T_j + T_j*)
// On the periodic grid this equals a_op only on interior-supported states;
// with torus_correction the exact wrap term
//   -L/(2 i beta) sum_j (D_j+ T_j + D_j- T_j*)
// is included and the equality is global (D_j± indicate the wrap rows).
LinearOperator a_op_shift_form(const GridSpec& g, bool torus_correction = false);

// generic Fourier multiplier from frequency-grid samples
LinearOperator multiplier_op(const GridSpec& g, std::string label, Field symbol,
                             bool self_adjoint);

// analytic multiplier of the commutator [H0, iA]: sum_j sin(beta xi_j) xi_j / beta
LinearOperator commutator_multiplier_op(const GridSpec& g);

// analytic multiplier of [[H0, iA], iA]
LinearOperator double_commutator_multiplier_op(const GridSpec& g);

// multiplication by a real potential; throws ComplexPotential if |Im V| > 1e-14
LinearOperator potential_op(const Field& V);

LinearOperator hamiltonian(const GridSpec& g, const Field& V);

// dense commutator AB - BA
LinearOperator commutator(const LinearOperator& A, const LinearOperator& B,
                          Eigen::Index cap = kDefaultDenseCap);

enum class WeightKind { position, conjugate };

// position: diagonal (1+|x|^2)^{-gamma/2}; conjugate: (1+A^2)^{-gamma/2}
// through the dense eigendecomposition of A
LinearOperator weight_op(const GridSpec& g, WeightKind kind, double gamma,
                         Eigen::Index cap = kDefaultDenseCap);

struct Eigensystem {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& M);

// unitary exp(i t A) for self-adjoint A (dense functional calculus)
LinearOperator matrix_exponential_group(const LinearOperator& A, double t,
                                        Eigen::Index cap = kDefaultDenseCap);
// same, reusing a precomputed eigensystem of A
Eigen::MatrixXcd unitary_group_matrix(const Eigensystem& es, double t);

// ---- small helpers shared with other modules ----

// permutation table for a shift by `steps` grid points along `axis`
std::vector<Eigen::Index> shift_permutation(const GridSpec& g, int axis, int steps);

double frobenius(const Eigen::MatrixXcd& M);

// P M P with P the diagonal interior indicator
Eigen::MatrixXcd interior_compress(const GridSpec& g, const Eigen::MatrixXcd& M,
                                   double margin_shifts = 4.0);

}  // namespace mourre

#endif
