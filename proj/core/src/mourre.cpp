#include "mourrekit/mourre.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace mourre {

namespace {

constexpr double kGolden = 0.6180339887498949;

// golden-section minimization of a 1-d function on [lo, hi]
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 120) {
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(lo), f1, f2, f(hi)});
}

}  // namespace

double window_upper_limit(double beta) {
  const double p = M_PI / beta;
  return 0.5 * p * p;
}

double max_eta(double a, double b, double beta) {
  return std::min(a, M_PI / beta - std::sqrt(2.0 * b));
}

EnergyWindow make_window(double a, double b, double beta, double eta) {
  if (beta <= 0.0) throw ValidationError("window: beta must be positive");
  if (!(0.0 < a && a < b)) throw WindowOutsideI("window: need 0 < a < b");
  if (b >= window_upper_limit(beta))
    throw WindowOutsideI("window: b = " + std::to_string(b) + " not below (pi/beta)^2/2 = " +
                         std::to_string(window_upper_limit(beta)));
  const double eta_cap = max_eta(a, b, beta);
  if (eta_cap <= 0.0) throw WindowOutsideI("window: no admissible cutoff margin");
  EnergyWindow w;
  w.a = a;
  w.b = b;
  w.beta = beta;
  w.eta = eta > 0.0 ? eta : 0.5 * eta_cap;
  if (w.eta > a || b > 0.5 * std::pow(M_PI / beta - w.eta, 2))
    throw WindowOutsideI("window: eta = " + std::to_string(w.eta) +
                         " pushes [a,b] off the cutoff plateau");
  return w;
}

double commutator_symbol(const std::array<double, 3>& xi, int d, double beta) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += std::sin(beta * xi[a]) * xi[a] / beta;
  return s;
}

double double_commutator_symbol(const std::array<double, 3>& xi, int d, double beta) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    const double sb = std::sin(beta * xi[a]);
    s += sb * (beta * std::cos(beta * xi[a]) * xi[a] + sb) / (beta * beta);
  }
  return s;
}

namespace {

// symbol along direction dir (unit vector) at radius r
double radial_symbol(const std::array<double, 3>& dir, double r, int d, double beta) {
  std::array<double, 3> xi{0, 0, 0};
  for (int a = 0; a < d; ++a) xi[a] = r * dir[a];
  return commutator_symbol(xi, d, beta);
}

std::vector<std::array<double, 3>> sample_directions(int d, int count) {
  std::vector<std::array<double, 3>> dirs;
  if (d == 1) {
    dirs.push_back({1.0, 0.0, 0.0});
    return dirs;
  }
  if (d == 2) {
    // symbol is even and symmetric under axis reflection: one octant suffices,
    // but sampling the quarter circle keeps this honest
    for (int i = 0; i < count; ++i) {
      const double th = 0.5 * M_PI * i / (count - 1);
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
    return dirs;
  }
  // d = 3: Fibonacci sphere on one octant
  const int n = count;
  for (int i = 0; i < n; ++i) {
    const double z = (i + 0.5) / n;
    const double phi = i * 2.399963229728653;  // golden angle
    const double rho = std::sqrt(1.0 - z * z);
    std::array<double, 3> v{std::abs(rho * std::cos(phi)), std::abs(rho * std::sin(phi)),
                            std::abs(z)};
    dirs.push_back(v);
  }
  return dirs;
}

}  // namespace

double delta_free(const EnergyWindow& w, int d) {
  const double r_lo = std::sqrt(2.0 * w.a);
  const double r_hi = std::sqrt(2.0 * w.b);
  const int n_radii = 1200;
  const int n_dirs = d == 1 ? 1 : 10000;
  auto dirs = sample_directions(d, n_dirs);

  double best = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_dir = dirs.front();
  double best_r = r_lo;
  for (const auto& dir : dirs) {
    for (int i = 0; i <= n_radii; ++i) {
      const double r = r_lo + (r_hi - r_lo) * i / n_radii;
      const double s = radial_symbol(dir, r, d, w.beta);
      if (s < best) {
        best = s;
        best_dir = dir;
        best_r = r;
      }
    }
  }
  // refine radius at the best direction, then the direction angle (d = 2)
  const double dr = (r_hi - r_lo) / n_radii;
  auto radial = [&](double r) { return radial_symbol(best_dir, r, d, w.beta); };
  best = std::min(best, golden_min(radial, std::max(r_lo, best_r - 2 * dr),
                                   std::min(r_hi, best_r + 2 * dr)));
  if (d == 2) {
    const double th0 = std::atan2(best_dir[1], best_dir[0]);
    const double dth = 0.5 * M_PI / (n_dirs - 1);
    auto angular = [&](double th) {
      std::array<double, 3> dir{std::cos(th), std::sin(th), 0.0};
      return golden_min([&](double r) { return radial_symbol(dir, r, d, w.beta); },
                        std::max(r_lo, best_r - 2 * dr), std::min(r_hi, best_r + 2 * dr), 60);
    };
    best = std::min(best, golden_min(angular, std::max(0.0, th0 - 2 * dth),
                                     std::min(0.5 * M_PI, th0 + 2 * dth), 60));
  }
  return best;
}

namespace {

// C-infinity ramp: 0 at s<=0, 1 at s>=1, monotone
double mollifier_ramp(double s) {
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = psi(s);
  const double b = psi(1.0 - s);
  return a / (a + b);
}

}  // namespace

double CutoffF::operator()(double t) const {
  if (t <= support_lo || t >= support_hi) return 0.0;
  if (t >= plateau_lo && t <= plateau_hi) return 1.0;
  if (t < plateau_lo) return mollifier_ramp((t - support_lo) / (plateau_lo - support_lo));
  return mollifier_ramp((support_hi - t) / (support_hi - plateau_hi));
}

CutoffF cutoff_f(const EnergyWindow& w) {
  CutoffF f;
  f.eta = w.eta;
  f.beta = w.beta;
  f.plateau_lo = w.eta;
  f.plateau_hi = 0.5 * std::pow(M_PI / w.beta - w.eta, 2);
  f.support_lo = 0.5 * w.eta;
  f.support_hi = 0.5 * std::pow(M_PI / w.beta - 0.5 * w.eta, 2);
  return f;
}

FreeMourreResult free_mourre_check(const GridSpec& g, const EnergyWindow& w) {
  FreeMourreResult res;
  res.delta = delta_free(w, g.d);
  CutoffF f = cutoff_f(w);

  auto freqs = frequencies(g);
  const Eigen::Index N = g.total();
  double min_window_symbol = std::numeric_limits<double>::infinity();
  double min_support_symbol = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < N; ++i) {
    auto idx = g.unflat(i);
    std::array<double, 3> xi{0, 0, 0};
    double t = 0.0;
    for (int a = 0; a < g.d; ++a) {
      xi[a] = freqs[idx[a]];
      t += 0.5 * xi[a] * xi[a];
    }
    const double s = commutator_symbol(xi, g.d, w.beta);
    if (t >= w.a && t <= w.b) {
      ++res.window_count;
      min_window_symbol = std::min(min_window_symbol, s);
    }
    const double ft = f(t);
    if (ft > 0.0) min_support_symbol = std::min(min_support_symbol, s);
    if (ft == 1.0) ++res.plateau_count;
  }
  // the check needs a handful of plateau frequencies to mean anything
  if (res.plateau_count < 8)
    throw ResolutionTooCoarse("free_mourre_check: only " + std::to_string(res.plateau_count) +
                              " grid frequencies hit the cutoff plateau");
  if (res.window_count == 0)
    throw ResolutionTooCoarse("free_mourre_check: no grid frequency lands in the window");

  res.delta_grid = min_window_symbol;
  res.margin = min_window_symbol - res.delta;
  res.delta_support = min_support_symbol;

  double margin_f = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < N; ++i) {
    auto idx = g.unflat(i);
    std::array<double, 3> xi{0, 0, 0};
    double t = 0.0;
    for (int a = 0; a < g.d; ++a) {
      xi[a] = freqs[idx[a]];
      t += 0.5 * xi[a] * xi[a];
    }
    const double ft = f(t);
    const double s = commutator_symbol(xi, g.d, w.beta);
    margin_f = std::min(margin_f, ft * ft * (s - res.delta_support));
  }
  res.margin_f = margin_f;
  return res;
}

ProjectedResult projected_point(const GridSpec& g, const Field& V, const EnergyWindow& w,
                                double c, Eigen::Index cap) {
  if (g.total() > cap) throw TooLargeForDense("projected_point: grid exceeds dense cap");

  Eigen::MatrixXcd H = hamiltonian(g, V).dense(cap);
  H = 0.5 * (H + H.adjoint().eval());
  Eigensystem es = hermitian_eigensystem(H);

  const double tol = 1e-9 * (w.b - w.a);
  std::vector<Eigen::Index> sel;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] >= w.a - tol && es.values[i] <= w.b + tol) sel.push_back(i);
  if (sel.empty()) throw EmptyWindow("projected_point: no eigenvalue in the window");

  Eigen::MatrixXcd Uj(es.vectors.rows(), sel.size());
  for (std::size_t i = 0; i < sel.size(); ++i) Uj.col(i) = es.vectors.col(sel[i]);

  // [H, iA] = analytic free multiplier + i[V, A]
  const Eigen::MatrixXcd S = commutator_multiplier_op(g).dense(cap);
  const Eigen::MatrixXcd A = a_op(g).dense(cap);
  Eigen::VectorXd v = V.values.real();
  Eigen::MatrixXcd VA = v.asDiagonal() * A - A * v.asDiagonal();
  Eigen::MatrixXcd C = S + Complex(0.0, 1.0) * VA;

  Eigen::MatrixXcd Cc = Uj.adjoint() * C * Uj;
  Cc = 0.5 * (Cc + Cc.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ces(Cc);
  if (ces.info() != Eigen::Success) throw NumericalError("projected_point: eigensolver failed");

  ProjectedResult res;
  res.rank = static_cast<int>(sel.size());
  res.spectrum.assign(ces.eigenvalues().data(), ces.eigenvalues().data() + sel.size());
  for (double mu : res.spectrum)
    if (mu < c) ++res.k;
  return res;
}

MourreReport projected_mourre(const PotentialSpec& spec, const GridSpec& g,
                              const EnergyWindow& w, double c_fraction,
                              const std::vector<int>& l_factors, Eigen::Index cap) {
  if (c_fraction <= 0.0 || c_fraction >= 1.0)
    throw ValidationError("projected_mourre: c_fraction must be in (0,1)");
  MourreReport rep;
  rep.window = w;
  rep.delta_free = delta_free(w, g.d);
  rep.c = c_fraction * rep.delta_free;

  {
    Field V = build_potential(spec, g);
    ProjectedResult base = projected_point(g, V, w, rep.c, cap);
    rep.k = base.k;
    rep.spectrum = base.spectrum;
  }

  for (int f : l_factors) {
    if (f < 1) throw ValidationError("projected_mourre: scan factors must be >= 1");
    GridSpec gf = make_grid(g.d, f * g.L, f * g.n, g.beta);
    Field V = build_potential(spec, gf);
    ProjectedResult r = projected_point(gf, V, w, rep.c, cap);
    rep.l_scan.push_back({gf.L, r.k, rep.c});
  }
  return rep;
}

std::string mourre_report_to_json(const MourreReport& rep) {
  nlohmann::json j;
  j["window"] = {{"a", rep.window.a}, {"b", rep.window.b}, {"eta", rep.window.eta},
                 {"beta", rep.window.beta}};
  j["delta_free"] = rep.delta_free;
  j["c"] = rep.c;
  j["k"] = rep.k;
  j["spectrum"] = rep.spectrum;
  nlohmann::json scan = nlohmann::json::array();
  for (const auto& row : rep.l_scan)
    scan.push_back({{"L", row.L}, {"k", row.k}, {"c", row.c}});
  j["l_scan"] = scan;
  return j.dump(2);
}

}  // namespace mourre
