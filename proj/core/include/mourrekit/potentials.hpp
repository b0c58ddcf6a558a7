#ifndef MOURREKIT_POTENTIALS_HPP
#define MOURREKIT_POTENTIALS_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mourrekit/grid.hpp"
#include "mourrekit/operators.hpp"

namespace mourre {

// V = 0
struct ZeroPotential {};

// three-part decaying family: amplitude * <x>^{-p} with per-part profiles
//   part 1: a1 <x>^{-2-g1}
//   part 2: a2 <x>^{-g2} * (-r exp(-r^2/2))   (derivative-of-bump profile)
//   part 3: a3 <x>^{-g3}
struct DecayingFamilyPotential {
  double g1 = 1.0, g2 = 1.0, g3 = 1.0;
  double a1 = 1.0, a2 = 1.0, a3 = 1.0;
};

// amplitude * <x>^{-gamma} W(x) with W a finite real Fourier series on the
// cell [0, beta)^d, sampled once per cell and tiled so periodicity is exact
// (byte-identical) on the grid
struct PeriodicDecayPotential {
  struct WTerm {
    std::array<int, 3> k{0, 0, 0};
    double amp = 0.0;
    double phase = 0.0;
  };
  double gamma = 1.0;
  double amplitude = 1.0;
  std::vector<WTerm> w_terms;  // empty: 5 random terms drawn from `seed`
  std::uint64_t seed = 42;
};

struct WellPotential {
  double depth = -1.0;  // must be negative
  double width = 1.0;   // box indicator |x_a| <= width/2 on every axis
};

struct CustomPotential {
  std::string path;  // field binary container
};

struct PotentialSpec {
  std::variant<ZeroPotential, DecayingFamilyPotential, PeriodicDecayPotential, WellPotential,
               CustomPotential>
      variant;
};

Field build_potential(const PotentialSpec& spec, const GridSpec& g);

// warning-level support diagnostics (SupportTouchesBoundary)
std::vector<std::string> support_warnings(const PotentialSpec& spec, const GridSpec& g);

// the sampled W factor alone (tile of the cell samples), unit amplitude
Field periodic_factor(const PeriodicDecayPotential& p, const GridSpec& g);

std::string potential_spec_to_json(const PotentialSpec& spec);
PotentialSpec potential_spec_from_json(const std::string& text);

// ---- difference fields of Assumption-type entries ----

struct DifferenceFields {
  std::vector<Field> x_diff;                // per axis j: x_j D_j V
  std::vector<std::vector<Field>> xx_diff;  // per pair j <= k: x_j x_k D_j D_k V
};
DifferenceFields difference_fields(const Field& V);

// ---- numerical proxies for the compactness/boundedness hypotheses ----

struct AssumptionRow {
  std::string entry;
  double sup_norm = 0.0;
  double decay_exponent = 0.0;  // |entry| ~ <x>^{-decay_exponent}
  double decay_r2 = 0.0;
  double sigma_max = 0.0;          // ||entry * (H0+1)^{-1}||
  double sigma_max_doubled = 0.0;  // same at 2L, NaN when unavailable
  double sv_exponent = 0.0;        // log sigma_j vs log j slope
  double sv_r2 = 0.0;
  bool compact_proxy = false;
  bool bounded_proxy = false;
  bool stability_available = false;
};

struct AssumptionReport {
  std::vector<AssumptionRow> rows;
  bool compact_rows_hold = false;  // V and the x_j D_j V rows
};

// Builds the potential from its spec (so the volume-doubling leg can rebuild
// it at 2L) and reports the proxy rows. Throws TooLargeForDense beyond cap.
AssumptionReport assumption_report(const PotentialSpec& spec, const GridSpec& g,
                                   Eigen::Index cap = kDefaultDenseCap);

std::string assumption_report_to_json(const AssumptionReport& rep);

}  // namespace mourre

#endif
