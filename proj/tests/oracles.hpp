// Independent oracles for the derived expected values. These deliberately
// avoid the library code paths they are used to check.
#ifndef MOURREKIT_TESTS_ORACLES_HPP
#define MOURREKIT_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace oracles {

inline double symbol_1d(double r, double beta) { return std::sin(beta * r) * r / beta; }

// brute-force scan of min_{sqrt(2a) <= r <= sqrt(2b)} sin(beta r) r / beta
inline double delta_free_1d(double a, double b, double beta, int n = 2000001) {
  const double lo = std::sqrt(2.0 * a), hi = std::sqrt(2.0 * b);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double r = lo + (hi - lo) * i / n;
    best = std::min(best, symbol_1d(r, beta));
  }
  return best;
}

// grid search over sphere x radius followed by a local refinement pass
inline double delta_free_2d(double a, double b, double beta) {
  const double lo = std::sqrt(2.0 * a), hi = std::sqrt(2.0 * b);
  auto value = [&](double th, double r) {
    const double x = r * std::cos(th), y = r * std::sin(th);
    return (std::sin(beta * x) * x + std::sin(beta * y) * y) / beta;
  };
  double best = std::numeric_limits<double>::infinity();
  double bth = 0, br = lo;
  const int nth = 721, nr = 2001;
  for (int i = 0; i < nth; ++i) {
    const double th = 0.5 * M_PI * i / (nth - 1);
    for (int j = 0; j <= nr; ++j) {
      const double r = lo + (hi - lo) * j / nr;
      const double v = value(th, r);
      if (v < best) {
        best = v;
        bth = th;
        br = r;
      }
    }
  }
  double dth = 0.5 * M_PI / (nth - 1), dr = (hi - lo) / nr;
  for (int pass = 0; pass < 40; ++pass) {
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        const double th = std::clamp(bth + i * dth / 2, 0.0, 0.5 * M_PI);
        const double r = std::clamp(br + j * dr / 2, lo, hi);
        const double v = value(th, r);
        if (v < best) {
          best = v;
          bth = th;
          br = r;
        }
      }
    dth /= 2;
    dr /= 2;
  }
  return best;
}

// direct O(N^2) unitary DFT matrix for a 1-d grid
inline Eigen::MatrixXcd dft_matrix_1d(double L, int n) {
  Eigen::MatrixXcd F(n, n);
  for (int j = 0; j < n; ++j) {
    const double xi = M_PI * (j - n / 2) / L;
    for (int i = 0; i < n; ++i) {
      const double x = -L + 2.0 * L / n * i;
      F(j, i) = std::polar(1.0 / std::sqrt(static_cast<double>(n)), -xi * x);
    }
  }
  return F;
}

// analytic free-resolvent kernel in one dimension: (i/k) e^{ik|x-y|}
inline std::complex<double> green_kernel_1d(double x, double y, std::complex<double> z) {
  std::complex<double> k = std::sqrt(2.0 * z);
  if (k.imag() < 0) k = -k;
  return std::complex<double>(0, 1) / k * std::exp(std::complex<double>(0, 1) * k * std::abs(x - y));
}

}  // namespace oracles

#endif
