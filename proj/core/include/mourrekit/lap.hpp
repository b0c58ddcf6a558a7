#ifndef MOURREKIT_LAP_HPP
#define MOURREKIT_LAP_HPP

#include <iosfwd>
#include <vector>

#include "mourrekit/grid.hpp"
#include "mourrekit/operators.hpp"

namespace mourre {

// H = H0 + V with its dense eigendecomposition computed once; resolvent
// solves, spectral distances and weighted norms all reuse it.
struct SpectralHamiltonian {
  GridSpec grid;
  LinearOperator H;  // matrix-free apply, used for independent residual checks
  Eigensystem eig;
};

SpectralHamiltonian spectral_hamiltonian(const GridSpec& g, const Field& V,
                                         Eigen::Index cap = kDefaultDenseCap);

// solves (H - z) u = rhs through the eigendecomposition and verifies the
// residual against the matrix-free application of H (<= 1e-10 ||rhs||)
Field resolvent_apply(const SpectralHamiltonian& sh, Complex z, const Field& rhs);

// 3 * mean level spacing near lambda; below it the finite grid dominates
double eps_floor(const SpectralHamiltonian& sh, double lambda);

// Precomputed data for repeated weighted-resolvent-norm evaluations:
// with H = U diag(ev) U* and B = W U, the weighted resolvent is
// W (H-z)^{-1} W = B diag(1/(ev-z)) B*.
struct WeightedContext {
  const SpectralHamiltonian* sh = nullptr;
  WeightKind kind = WeightKind::position;
  double gamma = 0.0;
  Eigen::MatrixXcd B;
  Eigen::MatrixXcd G;  // B* B
};

WeightedContext make_weighted_context(const SpectralHamiltonian& sh, WeightKind kind,
                                      double gamma, Eigen::Index cap = kDefaultDenseCap);

// largest singular value of W (H - lambda - i eps)^{-1} W; `warm` carries the
// iteration vector across nearby (lambda, eps) points
double weighted_resolvent_norm(const WeightedContext& ctx, double lambda, double eps,
                               Eigen::VectorXcd* warm = nullptr);

// one-off convenience overload
double weighted_resolvent_norm(const SpectralHamiltonian& sh, double lambda, double eps,
                               double gamma, WeightKind kind,
                               Eigen::Index cap = kDefaultDenseCap);

enum class LapClassification { saturating, diverging, inconclusive };

const char* to_string(LapClassification c);

struct LapRow {
  double eps = 0.0;
  double norm = 0.0;
  bool below_floor = false;
};

struct LapCurve {
  double lambda = 0.0;
  double gamma = 0.0;
  WeightKind kind = WeightKind::position;
  std::vector<LapRow> rows;  // sorted by decreasing eps
  LapClassification classification = LapClassification::inconclusive;
  double saturation_value = 0.0;  // last norm when saturating, NaN otherwise
  double slope = 0.0;             // log-log fit over the classified rows
  double fit_r2 = 0.0;
  double floor = 0.0;
};

// Sweep of the weighted norm over a decreasing geometric eps list (>= 4
// points). Classification: saturating when the relative change across the
// trailing decade is < 5%; diverging when the log-log slope is <= -0.5 with
// R^2 >= 0.98; inconclusive otherwise. The eps floor is always computed and
// reported; respect_floor additionally drops sub-floor points from the
// classified set (at an isolated eigenvalue the sub-floor divergence is the
// signal, so the well probes run with respect_floor = false).
LapCurve eps_sweep(const WeightedContext& ctx, double lambda,
                   const std::vector<double>& eps_list, bool respect_floor = false);

// bit-exact schema: lambda,eps,gamma,weight,norm,classification with 17
// significant digits; meta_comment, when nonempty, lands on line 2 as
// "# <meta_comment>"
void write_lap_csv(std::ostream& os, const LapCurve& curve,
                   const std::string& meta_comment = "");

struct HolderPair {
  double lam0 = 0.0, lam1 = 0.0;
  double f0 = 0.0, f1 = 0.0;
  double ratio = 0.0;
  bool excluded = false;  // a grid eigenvalue sits inside the pair
};

struct HolderScan {
  std::vector<HolderPair> pairs;
  double max_ratio = 0.0;
  double theta = 0.5;
  double eps = 0.0;
};

// max over adjacent pairs of |F(l1)-F(l0)| / |l1-l0|^theta at fixed eps;
// pairs crossing a grid eigenvalue are flagged and excluded
HolderScan holder_scan(const WeightedContext& ctx, const std::vector<double>& lambda_grid,
                       double eps, double theta = 0.5);

// ---- C^2 regularity probe of t -> e^{itA} (H-z)^{-1} e^{-itA} ----

struct C2Report {
  double identity_rel_err = 0.0;  // || i[A,R] - R [H,iA] R || / || i[A,R] ||
  std::vector<double> t_list;
  std::vector<double> first_diff_err;    // ||(R(t)-R(-t))/2t - i[A,R]||_F
  std::vector<double> richardson_ratio;  // err(2t)/err(t) for halving pairs
  std::vector<double> second_diff_norm;  // ||(R(t)-2R+R(-t))/t^2||_F
  double second_diff_variation = 0.0;    // (max-min)/mean over t_list
};

C2Report c2_regularity_check(const SpectralHamiltonian& sh, const LinearOperator& A, Complex z,
                             const std::vector<double>& t_list,
                             Eigen::Index cap = kDefaultDenseCap);

}  // namespace mourre

#endif
