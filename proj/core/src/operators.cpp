#include "mourrekit/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace mourre {

namespace {

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw DimensionMismatch(std::string(what) + ": operands live on different grids");
}

}  // namespace

LinearOperator::LinearOperator(GridSpec g, std::string label, Flags flags, ApplyFn fn,
                               std::optional<Field> symbol) {
  auto impl = std::make_shared<Impl>();
  impl->grid = g;
  impl->label = std::move(label);
  impl->flags = flags;
  impl->fn = std::move(fn);
  impl->symbol = std::move(symbol);
  impl_ = std::move(impl);
}

LinearOperator LinearOperator::from_dense(const GridSpec& g, std::string label, Flags flags,
                                          Eigen::MatrixXcd M) {
  if (M.rows() != g.total() || M.cols() != g.total())
    throw DimensionMismatch("from_dense: matrix does not match grid size");
  auto shared = std::make_shared<Eigen::MatrixXcd>(std::move(M));
  LinearOperator op(g, std::move(label), flags,
                    [shared](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                      out.noalias() = (*shared) * in;
                    });
  {
    std::lock_guard<std::mutex> lock(op.impl_->mu);
    op.impl_->dense_cache = *shared;
  }
  return op;
}

Field LinearOperator::apply(const Field& u) const {
  check_same_grid(impl_->grid, u.grid, "apply");
  Field out(impl_->grid);
  impl_->fn(u.values, out.values);
  return out;
}

Eigen::VectorXcd LinearOperator::apply_values(const Eigen::VectorXcd& v) const {
  if (v.size() != size()) throw DimensionMismatch("apply_values: size mismatch");
  Eigen::VectorXcd out(v.size());
  impl_->fn(v, out);
  return out;
}

const Eigen::MatrixXcd& LinearOperator::dense(Eigen::Index cap) const {
  const Eigen::Index N = size();
  if (N > cap)
    throw TooLargeForDense("dense: " + impl_->label + " has " + std::to_string(N) +
                           " rows, cap " + std::to_string(cap));
  std::lock_guard<std::mutex> lock(impl_->mu);
  if (!impl_->dense_cache) {
    Eigen::MatrixXcd M(N, N);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(N), col(N);
    for (Eigen::Index j = 0; j < N; ++j) {
      e[j] = 1.0;
      impl_->fn(e, col);
      M.col(j) = col;
      e[j] = 0.0;
    }
    impl_->dense_cache = std::move(M);
  }
  return *impl_->dense_cache;
}

std::vector<Eigen::Index> shift_permutation(const GridSpec& g, int axis, int steps) {
  const Eigen::Index N = g.total();
  std::vector<Eigen::Index> perm(N);
  const int s = ((steps % g.n) + g.n) % g.n;
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    idx[axis] = (idx[axis] + s) % g.n;
    perm[f] = g.flat(idx);
  }
  return perm;
}

LinearOperator shift_op(const GridSpec& g, int axis, int sign) {
  if (axis < 0 || axis >= g.d) throw ValidationError("shift_op: axis out of range");
  if (sign != 1 && sign != -1) throw ValidationError("shift_op: sign must be +1 or -1");
  auto perm = std::make_shared<std::vector<Eigen::Index>>(shift_permutation(g, axis, sign * g.m));
  LinearOperator::Flags fl;
  fl.fourier_diagonal = true;
  fl.real_coefficients = true;
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    const double xi = g.frequency(g.unflat(f)[axis]);
    sym.values[f] = std::polar(1.0, sign * g.beta * xi);
  }
  std::string label = "T" + std::to_string(axis + 1) + (sign > 0 ? "" : "adj");
  return LinearOperator(g, std::move(label), fl,
                        [perm](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          for (Eigen::Index f = 0; f < in.size(); ++f) out[f] = in[(*perm)[f]];
                        },
                        std::move(sym));
}

LinearOperator difference_op(const GridSpec& g, int axis) {
  if (axis < 0 || axis >= g.d) throw ValidationError("difference_op: axis out of range");
  auto perm = std::make_shared<std::vector<Eigen::Index>>(shift_permutation(g, axis, g.m));
  const double inv_beta = 1.0 / g.beta;
  LinearOperator::Flags fl;
  fl.fourier_diagonal = true;
  fl.real_coefficients = true;
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    const double xi = g.frequency(g.unflat(f)[axis]);
    sym.values[f] = (std::polar(1.0, g.beta * xi) - 1.0) * inv_beta;
  }
  return LinearOperator(g, "D" + std::to_string(axis + 1), fl,
                        [perm, inv_beta](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          for (Eigen::Index f = 0; f < in.size(); ++f)
                            out[f] = (in[(*perm)[f]] - in[f]) * inv_beta;
                        },
                        std::move(sym));
}

LinearOperator q_op(const GridSpec& g, int axis) {
  if (axis < 0 || axis >= g.d) throw ValidationError("q_op: axis out of range");
  auto fwd = std::make_shared<std::vector<Eigen::Index>>(shift_permutation(g, axis, g.m));
  auto bwd = std::make_shared<std::vector<Eigen::Index>>(shift_permutation(g, axis, -g.m));
  const Complex c(0.0, -1.0 / (2.0 * g.beta));  // 1/(2 i beta)
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  fl.fourier_diagonal = true;
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    const double xi = g.frequency(g.unflat(f)[axis]);
    sym.values[f] = std::sin(g.beta * xi) / g.beta;
  }
  return LinearOperator(g, "Q" + std::to_string(axis + 1), fl,
                        [fwd, bwd, c](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          for (Eigen::Index f = 0; f < in.size(); ++f)
                            out[f] = c * (in[(*fwd)[f]] - in[(*bwd)[f]]);
                        },
                        std::move(sym));
}

namespace {

Field kinetic_symbol(const GridSpec& g) {
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    auto idx = g.unflat(f);
    double t = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double xi = g.frequency(idx[a]);
      t += 0.5 * xi * xi;
    }
    sym.values[f] = t;
  }
  return sym;
}

}  // namespace

LinearOperator multiplier_op(const GridSpec& g, std::string label, Field symbol,
                             bool self_adjoint) {
  check_same_grid(g, symbol.grid, "multiplier_op");
  auto sym = std::make_shared<Eigen::VectorXcd>(symbol.values);
  LinearOperator::Flags fl;
  fl.self_adjoint = self_adjoint;
  fl.fourier_diagonal = true;
  GridSpec gc = g;
  return LinearOperator(g, std::move(label), fl,
                        [sym, gc](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          Field u(gc, in);
                          Field uh = transform(u);
                          uh.values.array() *= sym->array();
                          out = inverse_transform(uh).values;
                        },
                        std::move(symbol));
}

LinearOperator h0_op(const GridSpec& g) {
  return multiplier_op(g, "H0", kinetic_symbol(g), /*self_adjoint=*/true);
}

LinearOperator commutator_multiplier_op(const GridSpec& g) {
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    auto idx = g.unflat(f);
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double xi = g.frequency(idx[a]);
      s += std::sin(g.beta * xi) * xi / g.beta;
    }
    sym.values[f] = s;
  }
  return multiplier_op(g, "[H0,iA]_sym", std::move(sym), /*self_adjoint=*/true);
}

LinearOperator double_commutator_multiplier_op(const GridSpec& g) {
  Field sym(g);
  const double b = g.beta;
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    auto idx = g.unflat(f);
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double xi = g.frequency(idx[a]);
      const double sb = std::sin(b * xi);
      s += sb * (b * std::cos(b * xi) * xi + sb) / (b * b);
    }
    sym.values[f] = s;
  }
  return multiplier_op(g, "[[H0,iA],iA]_sym", std::move(sym), /*self_adjoint=*/true);
}

LinearOperator coordinate_op(const GridSpec& g, int axis) {
  if (axis < 0 || axis >= g.d) throw ValidationError("coordinate_op: axis out of range");
  auto x = std::make_shared<Eigen::VectorXd>(coordinate_samples(g, axis));
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  fl.real_coefficients = true;
  return LinearOperator(g, "x" + std::to_string(axis + 1), fl,
                        [x](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          out = x->array() * in.array();
                        });
}

LinearOperator a_op(const GridSpec& g) {
  struct AxisData {
    std::vector<Eigen::Index> fwd, bwd;
    Eigen::VectorXd x;
  };
  auto axes = std::make_shared<std::vector<AxisData>>();
  for (int a = 0; a < g.d; ++a)
    axes->push_back(
        {shift_permutation(g, a, g.m), shift_permutation(g, a, -g.m), coordinate_samples(g, a)});
  const Complex c(0.0, -1.0 / (4.0 * g.beta));  // (1/2) * 1/(2 i beta)
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  return LinearOperator(
      g, "A", fl, [axes, c](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.setZero();
        for (const auto& ax : *axes) {
          for (Eigen::Index f = 0; f < in.size(); ++f) {
            // (Q x + x Q) u at f, with Q = (T - T*)/(2 i beta)
            const Complex qxu = ax.x[ax.fwd[f]] * in[ax.fwd[f]] - ax.x[ax.bwd[f]] * in[ax.bwd[f]];
            const Complex xqu = ax.x[f] * (in[ax.fwd[f]] - in[ax.bwd[f]]);
            out[f] += c * (qxu + xqu);
          }
        }
      });
}

LinearOperator a_op_shift_form(const GridSpec& g, bool torus_correction) {
  struct AxisData {
    std::vector<Eigen::Index> fwd, bwd;
    Eigen::VectorXd x;
    Eigen::VectorXd wrap_plus, wrap_minus;
  };
  auto axes = std::make_shared<std::vector<AxisData>>();
  for (int a = 0; a < g.d; ++a) {
    AxisData ad{shift_permutation(g, a, g.m), shift_permutation(g, a, -g.m),
                coordinate_samples(g, a), Eigen::VectorXd::Zero(g.total()),
                Eigen::VectorXd::Zero(g.total())};
    for (Eigen::Index f = 0; f < g.total(); ++f) {
      ad.wrap_plus[f] = (ad.x[f] + g.beta >= g.L) ? 1.0 : 0.0;
      ad.wrap_minus[f] = (ad.x[f] - g.beta < -g.L) ? 1.0 : 0.0;
    }
    axes->push_back(std::move(ad));
  }
  const Complex c1(0.0, -1.0 / (2.0 * g.beta));  // 1/(2 i beta)
  const Complex c2(0.0, -0.25);                  // 1/(4 i)
  const Complex cw = torus_correction ? Complex(0.0, g.L / (2.0 * g.beta)) : Complex(0.0, 0.0);
  LinearOperator::Flags fl;
  fl.self_adjoint = torus_correction;
  std::string label = torus_correction ? "A_shift_form_torus" : "A_shift_form";
  return LinearOperator(
      g, std::move(label), fl, [axes, c1, c2, cw](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.setZero();
        for (const auto& ax : *axes) {
          for (Eigen::Index f = 0; f < in.size(); ++f) {
            const Complex up = in[ax.fwd[f]], um = in[ax.bwd[f]];
            out[f] += c1 * ax.x[f] * (up - um) + c2 * (up + um);
            out[f] += cw * (ax.wrap_plus[f] * up + ax.wrap_minus[f] * um);
          }
        }
      });
}

LinearOperator potential_op(const Field& V) {
  const double max_imag = V.values.imag().cwiseAbs().maxCoeff();
  if (max_imag > 1e-14)
    throw ComplexPotential("potential_op: imaginary part " + std::to_string(max_imag));
  auto v = std::make_shared<Eigen::VectorXd>(V.values.real());
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  fl.real_coefficients = true;
  return LinearOperator(V.grid, "V", fl,
                        [v](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          out = v->array() * in.array();
                        });
}

LinearOperator hamiltonian(const GridSpec& g, const Field& V) {
  check_same_grid(g, V.grid, "hamiltonian");
  LinearOperator h0 = h0_op(g);
  LinearOperator v = potential_op(V);
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  return LinearOperator(g, "H", fl,
                        [h0, v](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                          out = h0.apply_values(in) + v.apply_values(in);
                        });
}

LinearOperator commutator(const LinearOperator& A, const LinearOperator& B, Eigen::Index cap) {
  check_same_grid(A.grid(), B.grid(), "commutator");
  const Eigen::MatrixXcd& Ma = A.dense(cap);
  const Eigen::MatrixXcd& Mb = B.dense(cap);
  Eigen::MatrixXcd C = Ma * Mb - Mb * Ma;
  LinearOperator::Flags fl;
  return LinearOperator::from_dense(A.grid(), "[" + A.label() + "," + B.label() + "]", fl,
                                    std::move(C));
}

Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success)
    throw NumericalError("hermitian_eigensystem: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

LinearOperator weight_op(const GridSpec& g, WeightKind kind, double gamma, Eigen::Index cap) {
  if (gamma < 0.0) throw ValidationError("weight_op: gamma must be nonnegative");
  LinearOperator::Flags fl;
  fl.self_adjoint = true;
  if (kind == WeightKind::position) {
    auto w = std::make_shared<Eigen::VectorXd>(
        (1.0 + radius_squared_samples(g).array()).pow(-gamma / 2.0).matrix());
    fl.real_coefficients = true;
    return LinearOperator(g, "<x>^-" + std::to_string(gamma), fl,
                          [w](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
                            out = w->array() * in.array();
                          });
  }
  Eigensystem es = hermitian_eigensystem(a_op(g).dense(cap));
  Eigen::VectorXd f = (1.0 + es.values.array().square()).pow(-gamma / 2.0);
  Eigen::MatrixXcd W = es.vectors * f.asDiagonal() * es.vectors.adjoint();
  W = 0.5 * (W + W.adjoint().eval());
  return LinearOperator::from_dense(g, "<A>^-" + std::to_string(gamma), fl, std::move(W));
}

Eigen::MatrixXcd unitary_group_matrix(const Eigensystem& es, double t) {
  Eigen::VectorXcd phase(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    phase[i] = std::polar(1.0, t * es.values[i]);
  return es.vectors * phase.asDiagonal() * es.vectors.adjoint();
}

LinearOperator matrix_exponential_group(const LinearOperator& A, double t, Eigen::Index cap) {
  Eigensystem es = hermitian_eigensystem(A.dense(cap));
  LinearOperator::Flags fl;
  return LinearOperator::from_dense(A.grid(), "exp(i*" + std::to_string(t) + "*" + A.label() + ")",
                                    fl, unitary_group_matrix(es, t));
}

double frobenius(const Eigen::MatrixXcd& M) { return M.norm(); }

Eigen::MatrixXcd interior_compress(const GridSpec& g, const Eigen::MatrixXcd& M,
                                   double margin_shifts) {
  Eigen::VectorXd mask = interior_mask(g, margin_shifts);
  return mask.asDiagonal() * M * mask.asDiagonal();
}

}  // namespace mourre
