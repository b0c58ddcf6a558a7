#ifndef MOURREKIT_FIELD_IO_HPP
#define MOURREKIT_FIELD_IO_HPP

#include <iosfwd>
#include <string>

#include "mourrekit/grid.hpp"

namespace mourre {

// Binary container. Header: d, L, n, beta as little-endian 64-bit values
// (d and n as int64, L and beta as float64). Payload: interleaved re/im
// float64, row-major. A field stores n^d entries, a dense matrix n^d x n^d.
void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

void write_dense(std::ostream& os, const GridSpec& g, const Eigen::MatrixXcd& M);
Eigen::MatrixXcd read_dense(std::istream& is, GridSpec* grid_out = nullptr);
void write_dense(const std::string& path, const GridSpec& g, const Eigen::MatrixXcd& M);

// CSV with index columns i1[,i2[,i3]],re,im; floats with 17 significant digits
void write_field_csv(std::ostream& os, const Field& f);
void write_field_csv(const std::string& path, const Field& f);

// 17-significant-digit float formatting used by all CSV writers
std::string format_float(double v);

}  // namespace mourre

#endif
