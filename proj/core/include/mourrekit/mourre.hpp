#ifndef MOURREKIT_MOURRE_HPP
#define MOURREKIT_MOURRE_HPP

#include <vector>

#include "mourrekit/grid.hpp"
#include "mourrekit/operators.hpp"
#include "mourrekit/potentials.hpp"

namespace mourre {

// Positivity window of the commutator symbol: (0, (pi/beta)^2/2).
double window_upper_limit(double beta);

// Energy window [a,b] with cutoff margin eta, constrained so that
// [a,b] sits inside (0, (pi/beta)^2/2) and inside the cutoff plateau
// [eta, ((pi/beta) - eta)^2/2].
struct EnergyWindow {
  double a = 0.0;
  double b = 0.0;
  double beta = 1.0;
  double eta = 0.0;
};

double max_eta(double a, double b, double beta);

// validates the invariants; throws WindowOutsideI. eta <= 0 picks half the
// largest admissible margin.
EnergyWindow make_window(double a, double b, double beta, double eta = 0.0);

// sum_j sin(beta xi_j) xi_j / beta
double commutator_symbol(const std::array<double, 3>& xi, int d, double beta);

// (1/beta^2) sum_j sin(beta xi_j) [beta cos(beta xi_j) xi_j + sin(beta xi_j)]
double double_commutator_symbol(const std::array<double, 3>& xi, int d, double beta);

// min of the commutator symbol over the shell sqrt(2a) <= |xi| <= sqrt(2b),
// dense direction/radius sampling refined by golden-section search
double delta_free(const EnergyWindow& w, int d);

// smooth cutoff built from the exp(-1/t) mollifier: 1 on the plateau
// [eta, ((pi/beta)-eta)^2/2], 0 outside [eta/2, ((pi/beta)-eta/2)^2/2]
struct CutoffF {
  double eta = 0.0;
  double beta = 1.0;
  double plateau_lo = 0.0, plateau_hi = 0.0;
  double support_lo = 0.0, support_hi = 0.0;
  double operator()(double t) const;
};
CutoffF cutoff_f(const EnergyWindow& w);

struct FreeMourreResult {
  double delta = 0.0;          // continuum shell minimum (delta_free)
  double delta_grid = 0.0;     // minimum over grid frequencies in the window shell
  double margin = 0.0;         // min over window frequencies of symbol - delta
  double delta_support = 0.0;  // min symbol over grid frequencies with f > 0
  double margin_f = 0.0;       // min over all grid frequencies of f^2 (symbol - delta_support)
  int window_count = 0;
  int plateau_count = 0;
};

// Pointwise verification on the frequency grid: states in the window satisfy
// the free positive-commutator bound with constant delta (margin >= 0 up to
// rounding), and the f-weighted form holds with its own support constant.
FreeMourreResult free_mourre_check(const GridSpec& g, const EnergyWindow& w);

// ---- projected estimates for H = H0 + V ----

struct ProjectedResult {
  std::vector<double> spectrum;  // eigenvalues of the compressed commutator
  int k = 0;                     // count below the certificate c
  int rank = 0;                  // dim ran E_J
};

// Dense eigendecomposition of H; E_J spans eigenvectors with eigenvalue in
// [a,b] (ties at 1e-9*(b-a)); compression of [H,iA] with the free part
// represented by its analytic multiplier (the exact matrix commutator
// compressed to exact eigenvectors vanishes on the diagonal by the virial
// identity, so it certifies nothing on a finite torus).
ProjectedResult projected_point(const GridSpec& g, const Field& V, const EnergyWindow& w,
                                double c, Eigen::Index cap = kDefaultDenseCap);

struct MourreReport {
  EnergyWindow window;
  double delta_free = 0.0;
  double c = 0.0;
  int k = 0;
  std::vector<double> spectrum;
  struct LScanRow {
    double L = 0.0;
    int k = 0;
    double c = 0.0;
  };
  std::vector<LScanRow> l_scan;
};

// base-grid projection plus the volume-stability scan over L multiplied by
// l_factors at fixed h (the finite-rank-correction proxy)
MourreReport projected_mourre(const PotentialSpec& spec, const GridSpec& g,
                              const EnergyWindow& w, double c_fraction,
                              const std::vector<int>& l_factors = {1, 2, 4},
                              Eigen::Index cap = kDefaultDenseCap);

// serialization with the schema keys
// {window:{a,b,eta,beta}, delta_free, c, k, spectrum, l_scan:[{L,k,c}]}
std::string mourre_report_to_json(const MourreReport& rep);

}  // namespace mourre

#endif
