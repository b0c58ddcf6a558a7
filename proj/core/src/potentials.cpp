#include "mourrekit/potentials.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>

#include "mourrekit/field_io.hpp"
#include <nlohmann/json.hpp>

namespace mourre {

namespace {

using nlohmann::json;

double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
}

std::vector<PeriodicDecayPotential::WTerm> random_w_terms(std::uint64_t seed, int d) {
  std::mt19937_64 rng(seed);
  std::vector<PeriodicDecayPotential::WTerm> terms;
  for (int t = 0; t < 5; ++t) {
    PeriodicDecayPotential::WTerm w;
    for (int a = 0; a < d; ++a) w.k[a] = static_cast<int>(rng() % 4);
    w.amp = uniform_pm1(rng);
    w.phase = (static_cast<double>(rng() >> 11) * 0x1p-53) * 2.0 * M_PI;
    terms.push_back(w);
  }
  return terms;
}

// sample W on the m^d cell and normalize to unit sup norm
std::vector<double> cell_samples(const std::vector<PeriodicDecayPotential::WTerm>& terms,
                                 const GridSpec& g) {
  Eigen::Index cell_total = 1;
  for (int a = 0; a < g.d; ++a) cell_total *= g.m;
  std::vector<double> cell(cell_total, 0.0);
  for (Eigen::Index f = 0; f < cell_total; ++f) {
    std::array<int, 3> idx{0, 0, 0};
    Eigen::Index rem = f;
    for (int a = g.d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % g.m);
      rem /= g.m;
    }
    double v = 0.0;
    for (const auto& t : terms) {
      double arg = t.phase;
      for (int a = 0; a < g.d; ++a) arg += 2.0 * M_PI * t.k[a] * idx[a] / g.m;
      v += t.amp * std::cos(arg);
    }
    cell[f] = v;
  }
  double sup = 0.0;
  for (double v : cell) sup = std::max(sup, std::abs(v));
  if (sup > 0.0)
    for (double& v : cell) v /= sup;
  return cell;
}

}  // namespace

Field periodic_factor(const PeriodicDecayPotential& p, const GridSpec& g) {
  auto terms = p.w_terms.empty() ? random_w_terms(p.seed, g.d) : p.w_terms;
  auto cell = cell_samples(terms, g);
  Field W(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    auto idx = g.unflat(f);
    Eigen::Index cf = 0;
    for (int a = 0; a < g.d; ++a) cf = cf * g.m + (idx[a] % g.m);
    W.values[f] = cell[cf];
  }
  return W;
}

Field build_potential(const PotentialSpec& spec, const GridSpec& g) {
  Field V(g);
  if (std::holds_alternative<ZeroPotential>(spec.variant)) return V;

  if (const auto* w = std::get_if<WellPotential>(&spec.variant)) {
    if (w->depth >= 0.0) throw ValidationError("well potential: depth must be negative");
    if (w->width <= 0.0) throw ValidationError("well potential: width must be positive");
    for (Eigen::Index f = 0; f < g.total(); ++f) {
      auto idx = g.unflat(f);
      bool inside = true;
      for (int a = 0; a < g.d && inside; ++a)
        inside = std::abs(g.coordinate(idx[a])) <= w->width / 2.0;
      V.values[f] = inside ? w->depth : 0.0;
    }
    return V;
  }

  if (const auto* p = std::get_if<PeriodicDecayPotential>(&spec.variant)) {
    Field W = periodic_factor(*p, g);
    Eigen::VectorXd r2 = radius_squared_samples(g);
    for (Eigen::Index f = 0; f < g.total(); ++f)
      V.values[f] = p->amplitude * std::pow(1.0 + r2[f], -p->gamma / 2.0) * W.values[f].real();
    return V;
  }

  if (const auto* e = std::get_if<DecayingFamilyPotential>(&spec.variant)) {
    Eigen::VectorXd r2 = radius_squared_samples(g);
    for (Eigen::Index f = 0; f < g.total(); ++f) {
      const double jr2 = 1.0 + r2[f];
      const double r = std::sqrt(r2[f]);
      double v = e->a1 * std::pow(jr2, -(2.0 + e->g1) / 2.0);
      v += e->a2 * std::pow(jr2, -e->g2 / 2.0) * (-r * std::exp(-r2[f] / 2.0));
      v += e->a3 * std::pow(jr2, -e->g3 / 2.0);
      V.values[f] = v;
    }
    return V;
  }

  const auto& c = std::get<CustomPotential>(spec.variant);
  Field f = read_field(c.path);
  if (!(f.grid == g)) throw DimensionMismatch("custom potential: sample grid mismatch");
  if (f.values.imag().cwiseAbs().maxCoeff() > 1e-14)
    throw ComplexPotential("custom potential: nonzero imaginary part");
  return f;
}

std::vector<std::string> support_warnings(const PotentialSpec& spec, const GridSpec& g) {
  std::vector<std::string> warnings;
  const double half = g.interior_halfwidth();
  if (half <= 0.0) {
    warnings.push_back("grid has no interior region (L <= 4*beta)");
    return warnings;
  }
  if (const auto* w = std::get_if<WellPotential>(&spec.variant)) {
    if (w->width / 2.0 > half)
      warnings.push_back("well support touches the boundary region |x| > L - 4*beta");
  }
  Field V = build_potential(spec, g);
  Eigen::VectorXd mask = interior_mask(g);
  double outside = 0.0, inside = 0.0;
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    const double a = std::abs(V.values[f]);
    if (mask[f] > 0.5)
      inside = std::max(inside, a);
    else
      outside = std::max(outside, a);
  }
  if (inside > 0.0 && outside > 0.05 * inside)
    warnings.push_back(
        "potential carries more than 5% of its sup norm outside the interior region");
  return warnings;
}

// ---------------- json ----------------

std::string potential_spec_to_json(const PotentialSpec& spec) {
  json j;
  if (std::holds_alternative<ZeroPotential>(spec.variant)) {
    j["variant"] = "zero";
  } else if (const auto* e = std::get_if<DecayingFamilyPotential>(&spec.variant)) {
    j["variant"] = "example4";
    j["g1"] = e->g1;
    j["g2"] = e->g2;
    j["g3"] = e->g3;
    j["amplitudes"] = {e->a1, e->a2, e->a3};
  } else if (const auto* p = std::get_if<PeriodicDecayPotential>(&spec.variant)) {
    j["variant"] = "example5";
    j["gamma"] = p->gamma;
    j["amplitude"] = p->amplitude;
    j["seed"] = p->seed;
    json terms = json::array();
    for (const auto& t : p->w_terms)
      terms.push_back({{"k", {t.k[0], t.k[1], t.k[2]}}, {"amp", t.amp}, {"phase", t.phase}});
    j["w_terms"] = terms;
  } else if (const auto* w = std::get_if<WellPotential>(&spec.variant)) {
    j["variant"] = "well";
    j["depth"] = w->depth;
    j["width"] = w->width;
  } else {
    j["variant"] = "custom";
    j["path"] = std::get<CustomPotential>(spec.variant).path;
  }
  return j.dump();
}

PotentialSpec potential_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  const std::string variant = j.at("variant").get<std::string>();
  PotentialSpec spec;
  if (variant == "zero") {
    spec.variant = ZeroPotential{};
  } else if (variant == "example4") {
    DecayingFamilyPotential e;
    e.g1 = j.value("g1", 1.0);
    e.g2 = j.value("g2", 1.0);
    e.g3 = j.value("g3", 1.0);
    if (j.contains("amplitudes")) {
      auto a = j["amplitudes"];
      e.a1 = a.at(0);
      e.a2 = a.at(1);
      e.a3 = a.at(2);
    }
    spec.variant = e;
  } else if (variant == "example5") {
    PeriodicDecayPotential p;
    p.gamma = j.value("gamma", 1.0);
    p.amplitude = j.value("amplitude", 1.0);
    p.seed = j.value("seed", static_cast<std::uint64_t>(42));
    if (j.contains("w_terms"))
      for (const auto& t : j["w_terms"]) {
        PeriodicDecayPotential::WTerm w;
        if (t.contains("k"))
          for (std::size_t a = 0; a < 3 && a < t["k"].size(); ++a) w.k[a] = t["k"][a];
        w.amp = t.value("amp", 0.0);
        w.phase = t.value("phase", 0.0);
        p.w_terms.push_back(w);
      }
    spec.variant = p;
  } else if (variant == "well") {
    WellPotential w;
    w.depth = j.value("depth", -1.0);
    w.width = j.value("width", 1.0);
    spec.variant = w;
  } else if (variant == "custom") {
    spec.variant = CustomPotential{j.at("path").get<std::string>()};
  } else {
    throw ValidationError("potential spec: unknown variant '" + variant + "'");
  }
  return spec;
}

// ---------------- difference fields ----------------

namespace {

Eigen::VectorXcd grid_diff(const GridSpec& g, const Eigen::VectorXcd& v, int axis) {
  auto perm = shift_permutation(g, axis, g.m);
  Eigen::VectorXcd d(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) d[i] = (v[perm[i]] - v[i]) / g.beta;
  return d;
}

}  // namespace

DifferenceFields difference_fields(const Field& V) {
  const GridSpec& g = V.grid;
  DifferenceFields out;
  std::vector<Eigen::VectorXcd> dv(g.d);
  for (int j = 0; j < g.d; ++j) dv[j] = grid_diff(g, V.values, j);
  for (int j = 0; j < g.d; ++j) {
    Field f(g);
    f.values = coordinate_samples(g, j).cast<Complex>().cwiseProduct(dv[j]);
    out.x_diff.push_back(std::move(f));
  }
  out.xx_diff.resize(g.d);
  for (int j = 0; j < g.d; ++j)
    for (int k = j; k < g.d; ++k) {
      Field f(g);
      Eigen::VectorXcd djk = grid_diff(g, dv[j], k);
      f.values = (coordinate_samples(g, j).cwiseProduct(coordinate_samples(g, k)))
                     .cast<Complex>()
                     .cwiseProduct(djk);
      out.xx_diff[j].push_back(std::move(f));
    }
  return out;
}

// ---------------- assumption proxies ----------------

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
  bool ok = false;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 3) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  const double icpt = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = f.slope * x[i] + icpt;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.ok = true;
  return f;
}

// shell-max of |entry| against <x> on log-spaced radial shells
LineFit decay_fit(const GridSpec& g, const Eigen::VectorXcd& M, double* exponent) {
  Eigen::VectorXd r2 = radius_squared_samples(g);
  const double lo = std::max(1.0, 2.0 * g.beta);
  const double hi = std::max(lo * 1.5, g.interior_halfwidth());
  const int shells = 8;
  std::vector<double> lx, ly;
  for (int s = 0; s < shells; ++s) {
    const double e0 = lo * std::pow(hi / lo, static_cast<double>(s) / shells);
    const double e1 = lo * std::pow(hi / lo, static_cast<double>(s + 1) / shells);
    double mx = 0.0;
    bool any = false;
    for (Eigen::Index f = 0; f < g.total(); ++f) {
      const double r = std::sqrt(r2[f]);
      if (r >= e0 && r < e1) {
        any = true;
        mx = std::max(mx, std::abs(M[f]));
      }
    }
    if (any && mx > 0.0) {
      lx.push_back(std::log(std::sqrt(e0 * e1)));
      ly.push_back(std::log(mx));
    }
  }
  LineFit f = fit_line(lx, ly);
  *exponent = -f.slope;
  return f;
}

double power_iteration_sigma_max(const Eigen::MatrixXcd& K) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(K.cols());
  v /= v.norm();
  double sigma = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXcd w = K * v;
    Eigen::VectorXcd u = K.adjoint() * w;
    const double s = w.norm();
    const double n = u.norm();
    if (n == 0.0) return 0.0;
    v = u / n;
    if (it > 5 && std::abs(s - sigma) <= 1e-13 * std::max(1.0, s)) return s;
    sigma = s;
  }
  return sigma;
}

struct RowData {
  double sup = 0.0;
  double decay_exp = 0.0, decay_r2 = 0.0;
  double sigma = 0.0;
  Eigen::VectorXd svals;
};

RowData row_data(const GridSpec& g, const Eigen::VectorXcd& entry,
                 const Eigen::MatrixXcd& resolvent) {
  RowData rd;
  rd.sup = entry.cwiseAbs().maxCoeff();
  if (rd.sup == 0.0) return rd;
  LineFit df = decay_fit(g, entry, &rd.decay_exp);
  rd.decay_r2 = df.r2;
  Eigen::MatrixXcd K = entry.asDiagonal() * resolvent;
  rd.sigma = power_iteration_sigma_max(K);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(K);
  rd.svals = svd.singularValues();
  return rd;
}

LineFit sv_fit(const Eigen::VectorXd& svals) {
  if (svals.size() == 0) return {};
  const Eigen::Index jmax = std::max<Eigen::Index>(32, svals.size() / 4);
  std::vector<double> lx, ly;
  for (Eigen::Index j = 0; j < std::min(jmax, svals.size()); ++j) {
    if (svals[j] < svals[0] * 1e-12) break;
    lx.push_back(std::log(static_cast<double>(j + 1)));
    ly.push_back(std::log(svals[j]));
  }
  return fit_line(lx, ly);
}

Eigen::MatrixXcd free_resolvent_dense(const GridSpec& g, Eigen::Index cap) {
  // (H0 + 1)^{-1} as a Fourier multiplier
  Field sym(g);
  for (Eigen::Index f = 0; f < g.total(); ++f) {
    auto idx = g.unflat(f);
    double t = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double xi = g.frequency(idx[a]);
      t += 0.5 * xi * xi;
    }
    sym.values[f] = 1.0 / (1.0 + t);
  }
  return multiplier_op(g, "(H0+1)^-1", std::move(sym), true).dense(cap);
}

std::vector<std::pair<std::string, Eigen::VectorXcd>> assumption_entries(const GridSpec& g,
                                                                         const Field& V) {
  std::vector<std::pair<std::string, Eigen::VectorXcd>> entries;
  entries.emplace_back("V", V.values);
  DifferenceFields df = difference_fields(V);
  for (int j = 0; j < g.d; ++j)
    entries.emplace_back("x" + std::to_string(j + 1) + "*D" + std::to_string(j + 1) + "(V)",
                         df.x_diff[j].values);
  for (int j = 0; j < g.d; ++j)
    for (int k = j; k < g.d; ++k)
      entries.emplace_back("x" + std::to_string(j + 1) + "*x" + std::to_string(k + 1) + "*D" +
                               std::to_string(j + 1) + "(D" + std::to_string(k + 1) + "(V))",
                           df.xx_diff[j][k - j].values);
  return entries;
}

}  // namespace

AssumptionReport assumption_report(const PotentialSpec& spec, const GridSpec& g,
                                   Eigen::Index cap) {
  if (g.total() > cap) throw TooLargeForDense("assumption_report: grid exceeds dense cap");
  AssumptionReport rep;

  const Field V = build_potential(spec, g);
  const Eigen::MatrixXcd R = free_resolvent_dense(g, cap);
  auto entries = assumption_entries(g, V);

  // volume-doubling leg, skipped for custom samples or grids beyond cap
  bool can_double = !std::holds_alternative<CustomPotential>(spec.variant);
  GridSpec g2;
  std::vector<std::pair<std::string, Eigen::VectorXcd>> entries2;
  Eigen::MatrixXcd R2;
  if (can_double) {
    Eigen::Index doubled = 1;
    for (int a = 0; a < g.d; ++a) doubled *= 2 * g.n;
    if (doubled <= cap) {
      g2 = make_grid(g.d, 2 * g.L, 2 * g.n, g.beta);
      const Field V2 = build_potential(spec, g2);
      R2 = free_resolvent_dense(g2, cap);
      entries2 = assumption_entries(g2, V2);
    } else {
      can_double = false;
    }
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    AssumptionRow row;
    row.entry = entries[i].first;
    RowData rd = row_data(g, entries[i].second, R);
    row.sup_norm = rd.sup;
    if (rd.sup == 0.0) {
      // zero entries satisfy both hypotheses trivially
      row.decay_r2 = 1.0;
      row.sv_r2 = 1.0;
      row.compact_proxy = true;
      row.bounded_proxy = true;
      row.stability_available = true;
      row.sigma_max_doubled = 0.0;
      rep.rows.push_back(row);
      continue;
    }
    row.decay_exponent = rd.decay_exp;
    row.decay_r2 = rd.decay_r2;
    row.sigma_max = rd.sigma;
    LineFit sf = sv_fit(rd.svals);
    row.sv_exponent = sf.slope;
    row.sv_r2 = sf.r2;
    row.compact_proxy = row.decay_exponent > 0.0 && row.sv_exponent < -0.2 && row.sv_r2 >= 0.9;
    row.sigma_max_doubled = std::numeric_limits<double>::quiet_NaN();
    if (can_double) {
      RowData rd2 = row_data(g2, entries2[i].second, R2);
      row.sigma_max_doubled = rd2.sigma;
      row.stability_available = true;
      const double scale = std::max(row.sigma_max, 1e-300);
      row.bounded_proxy = std::isfinite(row.sigma_max) &&
                          std::abs(row.sigma_max_doubled - row.sigma_max) <= 0.1 * scale;
    } else {
      row.bounded_proxy = std::isfinite(row.sigma_max);
    }
    rep.rows.push_back(row);
  }

  rep.compact_rows_hold = true;
  for (const auto& row : rep.rows) {
    const bool first_order =
        row.entry == "V" ||
        (row.entry.find("*D") != std::string::npos && row.entry.find("(D") == std::string::npos);
    if (first_order) rep.compact_rows_hold = rep.compact_rows_hold && row.compact_proxy;
  }
  return rep;
}

std::string assumption_report_to_json(const AssumptionReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json j{{"entry", r.entry},
           {"sup_norm", r.sup_norm},
           {"decay_exponent", r.decay_exponent},
           {"decay_r2", r.decay_r2},
           {"sigma_max", r.sigma_max},
           {"sv_exponent", r.sv_exponent},
           {"sv_r2", r.sv_r2},
           {"compact_proxy", r.compact_proxy},
           {"bounded_proxy", r.bounded_proxy},
           {"stability_available", r.stability_available}};
    if (std::isfinite(r.sigma_max_doubled))
      j["sigma_max_doubled"] = r.sigma_max_doubled;
    else
      j["sigma_max_doubled"] = nullptr;
    rows.push_back(j);
  }
  json out{{"rows", rows}, {"compact_rows_hold", rep.compact_rows_hold}};
  return out.dump(2);
}

}  // namespace mourre
