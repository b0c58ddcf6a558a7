#include "doctest.h"

#include <mourrekit/mourre.hpp>

#include "oracles.hpp"

using namespace mourre;

TEST_CASE("window validation") {
  CHECK_THROWS_AS(make_window(1.0, 5.0, 1.0), WindowOutsideI);  // b beyond pi^2/2
  CHECK_THROWS_AS(make_window(-1.0, 2.0, 1.0), WindowOutsideI);
  CHECK_THROWS_AS(make_window(2.0, 1.0, 1.0), WindowOutsideI);
  CHECK_THROWS_AS(make_window(0.1, 4.9, 1.0), WindowOutsideI);  // no admissible eta
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  CHECK(w.eta > 0.0);
  CHECK(w.eta <= 1.0);
  CHECK(2.0 <= 0.5 * std::pow(M_PI - w.eta, 2));
}

TEST_CASE("commutator symbol values") {
  CHECK(commutator_symbol({M_PI / 2, 0, 0}, 1, 1.0) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(commutator_symbol({0, 0, 0}, 1, 1.0) == 0.0);
  CHECK(std::abs(commutator_symbol({M_PI, 0, 0}, 1, 1.0)) <= 1e-12);
  // even in each variable
  CHECK(commutator_symbol({-1.3, 0.4, 0}, 2, 1.0) ==
        doctest::Approx(commutator_symbol({1.3, -0.4, 0}, 2, 1.0)).epsilon(1e-14));
}

TEST_CASE("double commutator symbol values") {
  CHECK(double_commutator_symbol({0, 0, 0}, 1, 1.0) == 0.0);
  CHECK(double_commutator_symbol({M_PI / 2, 0, 0}, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double xi = 0.7, b = 2.0;
  const double expect = std::sin(b * xi) * (b * std::cos(b * xi) * xi + std::sin(b * xi)) / (b * b);
  CHECK(double_commutator_symbol({xi, 0, 0}, 1, b) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("delta_free against the scan oracles") {
  EnergyWindow w = make_window(1.0, 2.0, 1.0);

  const double d1 = delta_free(w, 1);
  const double oracle1 = oracles::delta_free_1d(1.0, 2.0, 1.0);
  CHECK(std::abs(d1 - oracle1) <= 1e-3);
  // frozen value: min over [sqrt(2), 2] of r sin r, attained at r = sqrt(2)
  CHECK(d1 == doctest::Approx(1.396911997273217).epsilon(1e-9));

  const double d2 = delta_free(w, 2);
  const double oracle2 = oracles::delta_free_2d(1.0, 2.0, 1.0);
  CHECK(std::abs(d2 - oracle2) <= 0.01 * oracle2);
  CHECK(d2 == doctest::Approx(1.396911997273217).epsilon(1e-6));  // axis direction wins
}

TEST_CASE("delta_free is monotone non-increasing under window growth") {
  const double d_small = delta_free(make_window(1.2, 1.8, 1.0), 1);
  const double d_mid = delta_free(make_window(1.0, 2.0, 1.0), 1);
  const double d_big = delta_free(make_window(0.8, 2.6, 1.0), 1);
  CHECK(d_small >= d_mid);
  CHECK(d_mid >= d_big);
}

TEST_CASE("delta vanishes toward the window endpoint") {
  const double lim = window_upper_limit(1.0);
  EnergyWindow w = make_window(2.0, lim - 1e-4, 1.0, 0.02);
  CHECK(delta_free(w, 1) <= 0.05);
}

TEST_CASE("cutoff function") {
  EnergyWindow w = make_window(1.0, 2.0, 1.0, 0.5);
  CutoffF f = cutoff_f(w);
  CHECK(f(1.0) == 1.0);
  CHECK(f(2.0) == 1.0);
  CHECK(f(0.0) == 0.0);
  CHECK(f(f.support_hi + 0.1) == 0.0);
  CHECK(f(0.5 * (f.support_lo + f.plateau_lo)) > 0.0);
  CHECK(f(0.5 * (f.support_lo + f.plateau_lo)) < 1.0);
  // monotone on the ramps
  double prev = -1.0;
  for (int i = 0; i <= 50; ++i) {
    const double t = f.support_lo + (f.plateau_lo - f.support_lo) * i / 50.0;
    CHECK(f(t) >= prev - 1e-15);
    prev = f(t);
  }
  prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    const double t = f.plateau_hi + (f.support_hi - f.plateau_hi) * i / 50.0;
    CHECK(f(t) <= prev + 1e-15);
    prev = f(t);
  }
}

TEST_CASE("free mourre check: margins on the spec grid") {
  GridSpec g = make_grid(1, 16.0, 512, 1.0);
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  FreeMourreResult r = free_mourre_check(g, w);
  CHECK(r.margin >= -1e-12);
  CHECK(r.margin_f >= -1e-12);
  CHECK(r.delta == doctest::Approx(1.396911997273217).epsilon(1e-9));
  CHECK(r.window_count > 0);
  CHECK(r.plateau_count >= 8);
  CHECK(r.delta_support <= r.delta_grid + 1e-15);
}

TEST_CASE("free mourre check: grid delta approaches the dense scan") {
  GridSpec g = make_grid(1, 128.0, 1024, 1.0);
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  FreeMourreResult r = free_mourre_check(g, w);
  CHECK(std::abs(r.delta_grid - r.delta) <= 0.01 * r.delta);
}

TEST_CASE("free mourre check rejects hopeless resolutions") {
  GridSpec g = make_grid(1, 2.0, 16, 0.5);
  EnergyWindow w = make_window(2.0, 6.0, 0.5);
  CHECK_THROWS_AS(free_mourre_check(g, w), ResolutionTooCoarse);
}

TEST_CASE("symbol positivity on every resolved frequency inside the window") {
  GridSpec g = make_grid(2, 8.0, 64, 1.0);
  auto xi = frequencies(g);
  const double limit = M_PI / g.beta;
  int checked = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(xi[i], xi[j]);
      if (r > 0.0 && r < limit) {
        CHECK(commutator_symbol({xi[i], xi[j], 0}, 2, g.beta) > 0.0);
        ++checked;
      }
    }
  CHECK(checked > 100);
  CHECK(std::abs(commutator_symbol({limit, 0, 0}, 2, g.beta)) <= 1e-12);
}

TEST_CASE("projected estimate: free case equals the symbol values with k = 0") {
  GridSpec g = make_grid(1, 8.0, 128, 1.0);
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  Field V(g);
  const double delta = delta_free(w, 1);
  ProjectedResult r = projected_point(g, V, w, delta);
  CHECK(r.k == 0);
  CHECK(r.rank > 0);

  std::vector<double> expect;
  for (double x : frequencies(g)) {
    const double t = 0.5 * x * x;
    if (t >= w.a - 1e-12 && t <= w.b + 1e-12)
      expect.push_back(std::sin(g.beta * x) * x / g.beta);
  }
  std::sort(expect.begin(), expect.end());
  REQUIRE(static_cast<int>(expect.size()) == r.rank);
  for (std::size_t i = 0; i < expect.size(); ++i)
    CHECK(std::abs(r.spectrum[i] - expect[i]) <= 1e-10);
}

TEST_CASE("projected estimate: weak periodic-decay coupling keeps k = 0") {
  GridSpec g = make_grid(1, 16.0, 256, 1.0);
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  const double delta = delta_free(w, 1);
  PotentialSpec spec;
  PeriodicDecayPotential p;
  p.gamma = 2.0;
  p.amplitude = delta / 10.0;  // sup |V| <= delta/10
  spec.variant = p;
  Field V = build_potential(spec, g);
  ProjectedResult r = projected_point(g, V, w, 0.5 * delta);
  CHECK(r.k == 0);
}

TEST_CASE("projected estimate: empty window errors") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  Field V(g);
  // pick a window between consecutive levels xi^2/2, xi = pi k / 4
  EnergyWindow w = make_window(1.02, 1.08, 1.0, 0.5);
  CHECK_THROWS_AS(projected_point(g, V, w, 0.5), EmptyWindow);
}

TEST_CASE("l-scan: negative count non-increasing for the decaying periodic example") {
  GridSpec g = make_grid(1, 8.0, 128, 1.0);
  EnergyWindow w = make_window(1.0, 2.0, 1.0);
  PotentialSpec spec;
  PeriodicDecayPotential p;
  p.gamma = 2.0;
  p.amplitude = 0.5;
  spec.variant = p;
  MourreReport rep = projected_mourre(spec, g, w, 0.5, {1, 2, 4});
  REQUIRE(rep.l_scan.size() == 3);
  CHECK(rep.l_scan[0].k >= rep.l_scan[1].k);
  CHECK(rep.l_scan[1].k >= rep.l_scan[2].k);
  CHECK(rep.c == doctest::Approx(0.5 * rep.delta_free));

  const std::string json = mourre_report_to_json(rep);
  for (const char* key : {"\"window\"", "\"a\"", "\"delta_free\"", "\"c\"", "\"k\"",
                          "\"spectrum\"", "\"l_scan\"", "\"L\""})
    CHECK(json.find(key) != std::string::npos);
}
