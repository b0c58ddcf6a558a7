#include "mourrekit/lap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "mourrekit/field_io.hpp"

namespace mourre {

SpectralHamiltonian spectral_hamiltonian(const GridSpec& g, const Field& V, Eigen::Index cap) {
  SpectralHamiltonian sh;
  sh.grid = g;
  sh.H = hamiltonian(g, V);
  Eigen::MatrixXcd M = sh.H.dense(cap);
  M = 0.5 * (M + M.adjoint().eval());
  sh.eig = hermitian_eigensystem(M);
  return sh;
}

Field resolvent_apply(const SpectralHamiltonian& sh, Complex z, const Field& rhs) {
  if (!(rhs.grid == sh.grid)) throw DimensionMismatch("resolvent_apply: grid mismatch");
  if (z.imag() == 0.0) {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sh.eig.values.size(); ++i)
      dist = std::min(dist, std::abs(sh.eig.values[i] - z.real()));
    if (dist <= 1e-8)
      throw NearSpectrumSingular("resolvent_apply: real z at distance " + std::to_string(dist) +
                                 " from the grid spectrum");
  }
  const Eigen::VectorXcd coeff = sh.eig.vectors.adjoint() * rhs.values;
  Eigen::VectorXcd scaled(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    scaled[i] = coeff[i] / (sh.eig.values[i] - z);
  Field u(sh.grid, sh.eig.vectors * scaled);

  // independent residual check through the matrix-free operator
  Eigen::VectorXcd r = sh.H.apply_values(u.values) - z * u.values - rhs.values;
  const double rn = r.norm(), bn = rhs.values.norm();
  if (rn > 1e-10 * bn)
    throw SolveResidualTooLarge("resolvent_apply: residual " + std::to_string(rn / bn) +
                                " of ||rhs||");
  return u;
}

double eps_floor(const SpectralHamiltonian& sh, double lambda) {
  const Eigen::VectorXd& ev = sh.eig.values;
  double halfwidth = 0.5;
  const double span = ev[ev.size() - 1] - ev[0];
  for (; halfwidth <= span; halfwidth *= 2.0) {
    std::vector<double> in;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (std::abs(ev[i] - lambda) <= halfwidth) in.push_back(ev[i]);
    if (in.size() >= 3) {
      std::sort(in.begin(), in.end());
      return 3.0 * (in.back() - in.front()) / static_cast<double>(in.size() - 1);
    }
  }
  return 0.0;  // too few levels near lambda to define a spacing
}

WeightedContext make_weighted_context(const SpectralHamiltonian& sh, WeightKind kind,
                                      double gamma, Eigen::Index cap) {
  WeightedContext ctx;
  ctx.sh = &sh;
  ctx.kind = kind;
  ctx.gamma = gamma;
  if (kind == WeightKind::position) {
    Eigen::VectorXd w =
        (1.0 + radius_squared_samples(sh.grid).array()).pow(-gamma / 2.0);
    ctx.B = w.asDiagonal() * sh.eig.vectors;
  } else {
    ctx.B = weight_op(sh.grid, kind, gamma, cap).dense(cap) * sh.eig.vectors;
  }
  ctx.G = ctx.B.adjoint() * ctx.B;
  return ctx;
}

namespace {

Eigen::VectorXcd deterministic_start(Eigen::Index n) {
  Eigen::VectorXcd v(n);
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  for (Eigen::Index i = 0; i < n; ++i) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    const double re = 2.0 * (static_cast<double>(s >> 11) * 0x1p-53) - 1.0;
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    const double im = 2.0 * (static_cast<double>(s >> 11) * 0x1p-53) - 1.0;
    v[i] = Complex(re, im);
  }
  v /= v.norm();
  return v;
}

}  // namespace

double weighted_resolvent_norm(const WeightedContext& ctx, double lambda, double eps,
                               Eigen::VectorXcd* warm) {
  const Eigen::VectorXd& ev = ctx.sh->eig.values;
  const Eigen::Index n = ev.size();
  Eigen::VectorXcd D(n);
  for (Eigen::Index i = 0; i < n; ++i) D[i] = 1.0 / (ev[i] - Complex(lambda, eps));

  // power iteration on M* M with M = B diag(D) B*; the Rayleigh value
  // ||M v||^2 = (D B* v)^H G (D B* v) reuses the cached Gram matrix
  Eigen::VectorXcd v = (warm && warm->size() == n) ? *warm : deterministic_start(n);
  double sigma = 0.0;
  int stable = 0;
  for (int it = 0; it < 30000; ++it) {
    Eigen::VectorXcd w = ctx.B.adjoint() * v;
    w.array() *= D.array();
    Eigen::VectorXcd gw = ctx.G * w;
    const double s2 = std::real(w.dot(gw));
    const double s = std::sqrt(std::max(0.0, s2));
    // one more half-step finishes M* M v
    Eigen::VectorXcd u = gw;
    u.array() *= D.array().conjugate();
    Eigen::VectorXcd mv = ctx.B * u;
    const double nn = mv.norm();
    if (nn == 0.0) return 0.0;
    v = mv / nn;
    if (it > 10 && std::abs(s - sigma) <= 1e-12 * std::max(1.0, s)) {
      if (++stable >= 3) {
        sigma = s;
        break;
      }
    } else {
      stable = 0;
    }
    sigma = s;
  }
  if (warm) *warm = v;
  return sigma;
}

double weighted_resolvent_norm(const SpectralHamiltonian& sh, double lambda, double eps,
                               double gamma, WeightKind kind, Eigen::Index cap) {
  WeightedContext ctx = make_weighted_context(sh, kind, gamma, cap);
  return weighted_resolvent_norm(ctx, lambda, eps);
}

const char* to_string(LapClassification c) {
  switch (c) {
    case LapClassification::saturating: return "saturating";
    case LapClassification::diverging: return "diverging";
    case LapClassification::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

struct LogFit {
  double slope = 0.0, r2 = 0.0;
  bool ok = false;
};

LogFit loglog_fit(const std::vector<LapRow>& rows) {
  LogFit f;
  if (rows.size() < 3) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(r.eps), y = std::log(r.norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  const double icpt = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (const auto& r : rows) {
    const double y = std::log(r.norm);
    const double pred = f.slope * std::log(r.eps) + icpt;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - mean) * (y - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.ok = true;
  return f;
}

}  // namespace

LapCurve eps_sweep(const WeightedContext& ctx, double lambda,
                   const std::vector<double>& eps_list, bool respect_floor) {
  if (eps_list.size() < 4) throw ValidationError("eps_sweep: need at least 4 sweep points");
  for (double e : eps_list)
    if (e <= 0.0) throw ValidationError("eps_sweep: eps must be positive");

  LapCurve curve;
  curve.lambda = lambda;
  curve.gamma = ctx.gamma;
  curve.kind = ctx.kind;
  curve.floor = eps_floor(*ctx.sh, lambda);

  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());

  Eigen::VectorXcd warm;
  for (double e : eps_sorted) {
    LapRow row;
    row.eps = e;
    row.norm = weighted_resolvent_norm(ctx, lambda, e, &warm);
    row.below_floor = e < curve.floor;
    curve.rows.push_back(row);
  }

  std::vector<LapRow> classified;
  for (const auto& r : curve.rows)
    if (!respect_floor || !r.below_floor) classified.push_back(r);

  curve.saturation_value = std::numeric_limits<double>::quiet_NaN();
  if (classified.size() >= 2) {
    const LapRow& last = classified.back();
    // reference point: largest swept eps inside the trailing decade
    const LapRow* ref = nullptr;
    for (const auto& r : classified)
      if (r.eps <= 10.0 * last.eps * (1.0 + 1e-12)) {
        ref = &r;
        break;
      }
    LogFit fit = loglog_fit(classified);
    curve.slope = fit.slope;
    curve.fit_r2 = fit.r2;
    if (ref && ref->eps > last.eps &&
        std::abs(last.norm - ref->norm) < 0.05 * std::abs(last.norm)) {
      curve.classification = LapClassification::saturating;
      curve.saturation_value = last.norm;
    } else if (fit.ok && fit.slope <= -0.5 && fit.r2 >= 0.98) {
      curve.classification = LapClassification::diverging;
    } else {
      curve.classification = LapClassification::inconclusive;
    }
  }
  return curve;
}

void write_lap_csv(std::ostream& os, const LapCurve& curve, const std::string& meta_comment) {
  os << "lambda,eps,gamma,weight,norm,classification\n";
  if (!meta_comment.empty()) os << "# " << meta_comment << "\n";
  const char* weight = curve.kind == WeightKind::position ? "pos" : "conj";
  const char* cls = to_string(curve.classification);
  for (const auto& r : curve.rows) {
    os << format_float(curve.lambda) << "," << format_float(r.eps) << ","
       << format_float(curve.gamma) << "," << weight << "," << format_float(r.norm) << "," << cls
       << "\n";
  }
}

HolderScan holder_scan(const WeightedContext& ctx, const std::vector<double>& lambda_grid,
                       double eps, double theta) {
  if (lambda_grid.size() < 2) throw ValidationError("holder_scan: need at least two lambdas");
  HolderScan scan;
  scan.theta = theta;
  scan.eps = eps;

  std::vector<double> lams = lambda_grid;
  std::sort(lams.begin(), lams.end());
  std::vector<double> F(lams.size());
  Eigen::VectorXcd warm;
  for (std::size_t i = 0; i < lams.size(); ++i)
    F[i] = weighted_resolvent_norm(ctx, lams[i], eps, &warm);

  const Eigen::VectorXd& ev = ctx.sh->eig.values;
  for (std::size_t i = 0; i + 1 < lams.size(); ++i) {
    HolderPair p;
    p.lam0 = lams[i];
    p.lam1 = lams[i + 1];
    p.f0 = F[i];
    p.f1 = F[i + 1];
    const double pad = 1e-12 * (p.lam1 - p.lam0);
    for (Eigen::Index j = 0; j < ev.size(); ++j)
      if (ev[j] >= p.lam0 - pad && ev[j] <= p.lam1 + pad) {
        p.excluded = true;
        break;
      }
    p.ratio = std::abs(p.f1 - p.f0) / std::pow(p.lam1 - p.lam0, theta);
    if (!p.excluded) scan.max_ratio = std::max(scan.max_ratio, p.ratio);
    scan.pairs.push_back(p);
  }
  return scan;
}

C2Report c2_regularity_check(const SpectralHamiltonian& sh, const LinearOperator& A, Complex z,
                             const std::vector<double>& t_list, Eigen::Index cap) {
  if (z.imag() == 0.0) throw ValidationError("c2_regularity_check: need Im z != 0");
  if (t_list.empty()) throw ValidationError("c2_regularity_check: empty t list");

  const Eigen::Index n = sh.eig.values.size();
  Eigen::VectorXcd D(n);
  for (Eigen::Index i = 0; i < n; ++i) D[i] = 1.0 / (sh.eig.values[i] - z);
  const Eigen::MatrixXcd R = sh.eig.vectors * D.asDiagonal() * sh.eig.vectors.adjoint();

  const Eigen::MatrixXcd Ad = A.dense(cap);
  const Eigen::MatrixXcd Hd = sh.H.dense(cap);
  const Eigen::MatrixXcd HiA = Complex(0, 1) * (Hd * Ad - Ad * Hd);
  const Eigen::MatrixXcd iAR = Complex(0, 1) * (Ad * R - R * Ad);
  const Eigen::MatrixXcd RHS = R * HiA * R;

  C2Report rep;
  rep.identity_rel_err = frobenius(iAR - RHS) / std::max(frobenius(iAR), 1e-300);

  Eigensystem aes = hermitian_eigensystem(Ad);
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end(), std::greater<double>());
  rep.t_list = ts;

  auto conjugated = [&](double t) {
    const Eigen::MatrixXcd U = unitary_group_matrix(aes, t);
    return Eigen::MatrixXcd(U * R * U.adjoint());
  };
  std::vector<double> second;
  for (double t : ts) {
    const Eigen::MatrixXcd Rp = conjugated(t);
    const Eigen::MatrixXcd Rm = conjugated(-t);
    rep.first_diff_err.push_back(frobenius((Rp - Rm) / (2.0 * t) - iAR));
    second.push_back(frobenius((Rp - 2.0 * R + Rm) / (t * t)));
  }
  rep.second_diff_norm = second;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (std::abs(ts[i] / ts[i + 1] - 2.0) < 1e-9)
      rep.richardson_ratio.push_back(rep.first_diff_err[i] / rep.first_diff_err[i + 1]);

  const double mx = *std::max_element(second.begin(), second.end());
  const double mn = *std::min_element(second.begin(), second.end());
  const double mean = std::accumulate(second.begin(), second.end(), 0.0) / second.size();
  rep.second_diff_variation = mean > 0 ? (mx - mn) / mean : 0.0;
  return rep;
}

}  // namespace mourre
