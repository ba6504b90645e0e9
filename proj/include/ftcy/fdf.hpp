#pragma once

#include <iosfwd>
#include <string>

#include "ftcy/field.hpp"
#include "ftcy/matrix_field.hpp"

namespace ftcy {

// Field dump format FDF/1.
//
// Text header:
//   FDF1
//   kind = scalar | hermitian | psi | metric
//   n = <complex dimension>
//   active_axes = <comma separated, 1-based>
//   grid_shape = <comma separated>
//   end_header
// followed by little-endian IEEE-754 doubles, (re, im) interleaved, row-major
// over the grid.  Matrix kinds store n*n planes in entry order (i*n + j).

struct FdfHeader {
  std::string kind;
  int n = 0;
  std::vector<int> active_axes;
  std::vector<int> grid_shape;
};

FdfHeader read_fdf_header(const std::string& path);

void write_fdf(const std::string& path, const ScalarField& f);
void write_fdf(const std::string& path, const HermitianField& f,
               const std::string& kind = "hermitian");

ScalarField read_fdf_scalar(const std::string& path);
HermitianField read_fdf_matrix(const std::string& path, FdfHeader* header = nullptr);

}  // namespace ftcy
