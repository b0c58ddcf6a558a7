#include "doctest.h"

#include <mourrekit/field_io.hpp>
#include <mourrekit/grid.hpp>

#include <random>
#include <sstream>

#include "oracles.hpp"

using namespace mourre;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field f(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const double re = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    const double im = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    f.values[i] = Complex(re, im);
  }
  return f;
}

}  // namespace

TEST_CASE("make_grid accepts commensurate shifts") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  CHECK(g.h == 0.125);
  CHECK(g.m == 8);
  CHECK(g.beta == g.m * g.h);

  GridSpec g2 = make_grid(2, 8.0, 128, 1.0);
  CHECK(g2.h == 0.125);
  CHECK(g2.m == 8);
  CHECK(g2.total() == 128 * 128);
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid(1, M_PI, 8, 1.0), NonCommensurate);
  CHECK_THROWS_AS(make_grid(1, 4.0, 64, 0.25), TooCoarse);   // m = 2
  CHECK_THROWS_AS(make_grid(1, 1.0, 16, 1.0), TooCoarse);    // n < 4m
  CHECK_THROWS_AS(make_grid(1, 4.0, 63, 1.0), ValidationError);
  CHECK_THROWS_AS(make_grid(4, 4.0, 64, 1.0), ValidationError);
}

TEST_CASE("frequencies follow pi k / L") {
  GridSpec g = make_grid(1, M_PI, 32, M_PI / 4.0);
  auto xi = frequencies(g);
  CHECK(xi.front() == doctest::Approx(-16.0));
  CHECK(xi[16] == 0.0);
  CHECK(xi.back() == doctest::Approx(15.0));

  GridSpec g2 = make_grid(1, 4.0, 64, 1.0);
  auto xi2 = frequencies(g2);
  CHECK(xi2[32] == 0.0);
  CHECK(xi2[33] == doctest::Approx(M_PI / 4.0));
  // Nyquist: max |xi| = pi/h
  CHECK(std::abs(xi2.front()) == doctest::Approx(M_PI / g2.h));
}

TEST_CASE("transform is unitary and matches the direct DFT") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  Field u = random_field(g, 7);

  Field uh = transform(u);
  Field back = inverse_transform(uh);
  CHECK((back.values - u.values).norm() <= 1e-12 * u.values.norm());
  CHECK(uh.norm() == doctest::Approx(u.norm()).epsilon(1e-12));

  Eigen::MatrixXcd F = oracles::dft_matrix_1d(g.L, g.n);
  CHECK((uh.values - F * u.values).norm() <= 1e-11 * u.values.norm());
}

TEST_CASE("constant and plane-wave fields transform to one-hot coefficients") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  Field c(g);
  c.values.setOnes();
  Field ch = transform(c);
  for (int j = 0; j < g.n; ++j) {
    if (j == g.n / 2)
      CHECK(std::abs(ch.values[j]) == doctest::Approx(std::sqrt(double(g.n))));
    else
      CHECK(std::abs(ch.values[j]) <= 1e-12 * std::sqrt(double(g.n)));
  }

  Field pw = plane_wave(g, {11, 0, 0});
  Field pwh = transform(pw);
  for (int j = 0; j < g.n; ++j)
    if (j != 11) CHECK(std::abs(pwh.values[j]) <= 1e-11 * std::sqrt(double(g.n)));
  CHECK(std::abs(pwh.values[11]) == doctest::Approx(std::sqrt(double(g.n))));
}

TEST_CASE("shifting a sampled plane wave multiplies its coefficient by exp(i beta xi)") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  for (int slot : {3, 17, 32, 40, 63}) {
    Field pw = plane_wave(g, {slot, 0, 0});
    // shift by beta = m*h is the exact index roll
    Field shifted(g);
    for (int i = 0; i < g.n; ++i) shifted.values[i] = pw.values[(i + g.m) % g.n];
    Field a = transform(shifted);
    Field b = transform(pw);
    const Complex phase = std::polar(1.0, g.beta * g.frequency(slot));
    CHECK((a.values - phase * b.values).norm() <= 1e-11 * b.values.norm());
  }
}

TEST_CASE("transform round trip in two dimensions") {
  GridSpec g = make_grid(2, 2.0, 32, 0.5);
  Field u = random_field(g, 11);
  Field back = inverse_transform(transform(u));
  CHECK((back.values - u.values).norm() <= 1e-12 * u.values.norm());
  CHECK(transform(u).norm() == doctest::Approx(u.norm()).epsilon(1e-12));
}

TEST_CASE("interior mask and coordinates") {
  GridSpec g = make_grid(1, 8.0, 128, 1.0);
  Eigen::VectorXd x = coordinate_samples(g, 0);
  CHECK(x[0] == doctest::Approx(-8.0));
  CHECK(x[64] == 0.0);
  Eigen::VectorXd mask = interior_mask(g);
  for (int i = 0; i < g.n; ++i) {
    const bool in = std::abs(x[i]) <= 4.0;
    CHECK(mask[i] == (in ? 1.0 : 0.0));
  }
}

TEST_CASE("binary container round trips fields and dense payloads") {
  GridSpec g = make_grid(1, 4.0, 64, 1.0);
  Field f = random_field(g, 3);
  std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
  write_field(ss, f);
  Field back = read_field(ss);
  CHECK(back.grid == g);
  CHECK((back.values - f.values).norm() == 0.0);

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Random(g.total(), g.total());
  std::stringstream ms(std::ios::in | std::ios::out | std::ios::binary);
  write_dense(ms, g, M);
  GridSpec gg;
  Eigen::MatrixXcd back_m = read_dense(ms, &gg);
  CHECK(gg == g);
  CHECK((back_m - M).norm() == 0.0);
}

TEST_CASE("field csv has index columns and 17 significant digits") {
  GridSpec g = make_grid(2, 2.0, 32, 0.5);
  Field f(g);
  f.values[0] = Complex(1.0 / 3.0, -2.0);
  std::ostringstream os;
  write_field_csv(os, f);
  const std::string text = os.str();
  CHECK(text.rfind("i1,i2,re,im\n", 0) == 0);
  CHECK(text.find("0,0,0.33333333333333331,-2\n") != std::string::npos);
}
