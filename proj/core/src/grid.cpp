#include "mourrekit/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace mourre {

GridSpec make_grid(int d, double L, int n, double beta) {
  if (d < 1 || d > 3) throw ValidationError("grid: d must be 1, 2 or 3");
  if (L <= 0.0) throw ValidationError("grid: L must be positive");
  if (n <= 0 || n % 2 != 0) throw ValidationError("grid: n must be even and positive");
  if (beta <= 0.0) throw ValidationError("grid: beta must be positive");

  GridSpec g;
  g.d = d;
  g.L = L;
  g.n = n;
  g.h = 2.0 * L / n;

  const double ratio = beta / g.h;
  const long long m = std::llround(ratio);
  if (m < 1 || std::abs(beta - static_cast<double>(m) * g.h) > 1e-9 * beta)
    throw NonCommensurate("grid: beta/h = " + std::to_string(ratio) + " is not an integer");
  g.m = static_cast<int>(m);
  // snap so beta = m*h holds exactly in working arithmetic
  g.beta = g.m * g.h;

  if (g.m < 4) throw TooCoarse("grid: m = " + std::to_string(g.m) + " < 4");
  if (n < 4 * g.m) throw TooCoarse("grid: n = " + std::to_string(n) + " < 4m = " + std::to_string(4 * g.m));
  return g;
}

std::vector<double> frequencies(const GridSpec& g) {
  std::vector<double> xi(g.n);
  for (int j = 0; j < g.n; ++j) xi[j] = g.frequency(j);
  return xi;
}

namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

// FFTW plans are not thread-safe to create/destroy; execution on private
// buffers is. Guard planning with a global mutex.
struct PlanGuard {
  fftw_plan plan;
  PlanGuard(int rank, const int* dims, fftw_complex* in, fftw_complex* out, int sign) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(rank, dims, in, out, sign, FFTW_ESTIMATE);
  }
  ~PlanGuard() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};

}  // namespace

Field transform(const Field& u) {
  const GridSpec& g = u.grid;
  const Eigen::Index N = g.total();
  Eigen::VectorXcd in = u.values;
  Eigen::VectorXcd raw(N);

  int dims[3] = {g.n, g.n, g.n};
  PlanGuard pg(g.d, dims, reinterpret_cast<fftw_complex*>(in.data()),
               reinterpret_cast<fftw_complex*>(raw.data()), FFTW_FORWARD);
  fftw_execute(pg.plan);

  // out[j] = n^{-d/2} (-1)^{sum_a (j_a - n/2)} raw[(j_a + n/2) mod n]
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  Field out(g);
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    std::array<int, 3> src{0, 0, 0};
    int parity = 0;
    for (int a = 0; a < g.d; ++a) {
      src[a] = (idx[a] + g.n / 2) % g.n;
      parity ^= (idx[a] - g.n / 2) & 1;
    }
    const double sign = parity ? -scale : scale;
    out.values[f] = sign * raw[g.flat(src)];
  }
  return out;
}

Field inverse_transform(const Field& u_hat) {
  const GridSpec& g = u_hat.grid;
  const Eigen::Index N = g.total();
  Eigen::VectorXcd in(N);
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    std::array<int, 3> src{0, 0, 0};
    int parity = 0;
    for (int a = 0; a < g.d; ++a) {
      src[a] = (idx[a] + g.n / 2) % g.n;
      parity ^= (idx[a] - g.n / 2) & 1;
    }
    in[g.flat(src)] = parity ? -u_hat.values[f] : u_hat.values[f];
  }

  Eigen::VectorXcd raw(N);
  int dims[3] = {g.n, g.n, g.n};
  PlanGuard pg(g.d, dims, reinterpret_cast<fftw_complex*>(in.data()),
               reinterpret_cast<fftw_complex*>(raw.data()), FFTW_BACKWARD);
  fftw_execute(pg.plan);

  Field out(g);
  out.values = raw / std::sqrt(static_cast<double>(N));
  return out;
}

Field plane_wave(const GridSpec& g, const std::array<int, 3>& freq_slots) {
  Field u(g);
  const Eigen::Index N = g.total();
  std::array<double, 3> xi{0, 0, 0};
  for (int a = 0; a < g.d; ++a) xi[a] = g.frequency(freq_slots[a]);
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    double phase = 0.0;
    for (int a = 0; a < g.d; ++a) phase += xi[a] * g.coordinate(idx[a]);
    u.values[f] = std::polar(1.0, phase);
  }
  return u;
}

Eigen::VectorXd coordinate_samples(const GridSpec& g, int axis) {
  const Eigen::Index N = g.total();
  Eigen::VectorXd x(N);
  for (Eigen::Index f = 0; f < N; ++f) x[f] = g.coordinate(g.unflat(f)[axis]);
  return x;
}

Eigen::VectorXd radius_squared_samples(const GridSpec& g) {
  const Eigen::Index N = g.total();
  Eigen::VectorXd r2(N);
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double c = g.coordinate(idx[a]);
      s += c * c;
    }
    r2[f] = s;
  }
  return r2;
}

Eigen::VectorXd interior_mask(const GridSpec& g, double margin_shifts) {
  const double half = g.interior_halfwidth(margin_shifts);
  const Eigen::Index N = g.total();
  Eigen::VectorXd mask(N);
  for (Eigen::Index f = 0; f < N; ++f) {
    auto idx = g.unflat(f);
    bool in = half > 0.0;
    for (int a = 0; a < g.d && in; ++a) in = std::abs(g.coordinate(idx[a])) <= half;
    mask[f] = in ? 1.0 : 0.0;
  }
  return mask;
}

}  // namespace mourre
