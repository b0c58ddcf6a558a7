#ifndef MOURREKIT_GRID_HPP
#define MOURREKIT_GRID_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "mourrekit/errors.hpp"

namespace mourre {

using Complex = std::complex<double>;

// Periodic discretization of [-L, L)^d with n points per axis. The shift
// length beta is snapped to an exact multiple m*h of the spacing so that
// translations by beta act as index permutations.
struct GridSpec {
  int d = 1;
  double L = 0.0;
  int n = 0;
  double h = 0.0;
  double beta = 0.0;
  int m = 0;

  Eigen::Index total() const {
    Eigen::Index t = 1;
    for (int a = 0; a < d; ++a) t *= n;
    return t;
  }

  // row-major flattening, axis 0 slowest
  Eigen::Index flat(const std::array<int, 3>& idx) const {
    Eigen::Index f = 0;
    for (int a = 0; a < d; ++a) f = f * n + idx[a];
    return f;
  }
  std::array<int, 3> unflat(Eigen::Index f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % n);
      f /= n;
    }
    return idx;
  }

  double coordinate(int i) const { return -L + h * i; }
  // frequency slot j <-> xi = pi*(j - n/2)/L
  double frequency(int j) const { return M_PI * (j - n / 2) / L; }

  double interior_halfwidth(double margin_shifts = 4.0) const {
    return L - margin_shifts * beta;
  }

  bool operator==(const GridSpec& o) const {
    return d == o.d && L == o.L && n == o.n && m == o.m;
  }
};

GridSpec make_grid(int d, double L, int n, double beta);

// per-axis frequency list xi_k = pi k / L, k in [-n/2, n/2)
std::vector<double> frequencies(const GridSpec& g);

// Complex-valued grid function, row-major over axes.
struct Field {
  GridSpec grid;
  Eigen::VectorXcd values;

  Field() = default;
  explicit Field(const GridSpec& g) : grid(g), values(Eigen::VectorXcd::Zero(g.total())) {}
  Field(const GridSpec& g, Eigen::VectorXcd v) : grid(g), values(std::move(v)) {}

  // discrete L2 norm, weight h^{d/2}
  double norm() const {
    return std::pow(grid.h, grid.d * 0.5) * values.norm();
  }
  Complex inner(const Field& other) const {
    return std::pow(grid.h, grid.d) * values.dot(other.values);
  }
};

// Unitary discrete Fourier transform aligned with xi_k = pi k / L.
// A sampled plane wave exp(i xi_k . x) maps to a one-hot coefficient.
Field transform(const Field& u);
Field inverse_transform(const Field& u_hat);

// samples of exp(i xi . x) for a frequency slot vector (one entry per axis)
Field plane_wave(const GridSpec& g, const std::array<int, 3>& freq_slots);

// coordinate samples along one axis (sawtooth branch with values in [-L, L-h])
Eigen::VectorXd coordinate_samples(const GridSpec& g, int axis);

// squared euclidean norm |x|^2 per grid point
Eigen::VectorXd radius_squared_samples(const GridSpec& g);

// 1.0 on points with |x_a| <= L - margin_shifts*beta for every axis, else 0.0
Eigen::VectorXd interior_mask(const GridSpec& g, double margin_shifts = 4.0);

}  // namespace mourre

#endif
