#include "mourrekit/field_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace mourre {

namespace {

void put_i64(std::ostream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::int64_t get_i64(std::istream& is) {
  std::int64_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void put_header(std::ostream& os, const GridSpec& g) {
  put_i64(os, g.d);
  put_f64(os, g.L);
  put_i64(os, g.n);
  put_f64(os, g.beta);
}

GridSpec get_header(std::istream& is) {
  const std::int64_t d = get_i64(is);
  const double L = get_f64(is);
  const std::int64_t n = get_i64(is);
  const double beta = get_f64(is);
  if (!is) throw ValidationError("field io: truncated header");
  return make_grid(static_cast<int>(d), L, static_cast<int>(n), beta);
}

}  // namespace

void write_field(std::ostream& os, const Field& f) {
  put_header(os, f.grid);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    put_f64(os, f.values[i].real());
    put_f64(os, f.values[i].imag());
  }
}

Field read_field(std::istream& is) {
  GridSpec g = get_header(is);
  Field f(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    f.values[i] = Complex(re, im);
  }
  if (!is) throw ValidationError("field io: truncated payload");
  return f;
}

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("field io: cannot open " + path);
  write_field(os, f);
}

Field read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("field io: cannot open " + path);
  return read_field(is);
}

void write_dense(std::ostream& os, const GridSpec& g, const Eigen::MatrixXcd& M) {
  if (M.rows() != g.total() || M.cols() != g.total())
    throw DimensionMismatch("field io: dense payload must be n^d x n^d");
  put_header(os, g);
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      put_f64(os, M(r, c).real());
      put_f64(os, M(r, c).imag());
    }
}

Eigen::MatrixXcd read_dense(std::istream& is, GridSpec* grid_out) {
  GridSpec g = get_header(is);
  const Eigen::Index N = g.total();
  Eigen::MatrixXcd M(N, N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      M(r, c) = Complex(re, im);
    }
  if (!is) throw ValidationError("field io: truncated payload");
  if (grid_out) *grid_out = g;
  return M;
}

void write_dense(const std::string& path, const GridSpec& g, const Eigen::MatrixXcd& M) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("field io: cannot open " + path);
  write_dense(os, g, M);
}

std::string format_float(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& os, const Field& f) {
  const GridSpec& g = f.grid;
  for (int a = 0; a < g.d; ++a) os << "i" << (a + 1) << ",";
  os << "re,im\n";
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    auto idx = g.unflat(i);
    for (int a = 0; a < g.d; ++a) os << idx[a] << ",";
    os << format_float(f.values[i].real()) << "," << format_float(f.values[i].imag()) << "\n";
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw ValidationError("field io: cannot open " + path);
  write_field_csv(os, f);
}

}  // namespace mourre
