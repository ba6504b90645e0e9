#pragma once

#include <cstdint>
#include <vector>

namespace ftcy {

// Discrete model of the complex n-torus C^n / (2 pi Z)^{2n}.
//
// Real coordinates are x_1 .. x_{2n} with z_i = x_{2i-1} + sqrt(-1) x_{2i},
// every axis has period 2 pi.  Only the axes listed in active_axes carry a
// grid; fields are constant along the remaining ones.  Storage is row-major
// over grid_shape in the order of active_axes.
struct TorusGeometry {
  int n = 0;                     // complex dimension, >= 3
  std::vector<int> active_axes;  // 1-based real axes, strictly increasing
  std::vector<int> grid_shape;   // one even size >= 8 per active axis

  static TorusGeometry make(int n, std::vector<int> active_axes,
                            std::vector<int> grid_shape);

  int dims() const { return static_cast<int>(active_axes.size()); }
  std::int64_t total_points() const;

  // Storage dimension of a real axis, or -1 when the axis is inactive.
  int dim_of_axis(int axis) const;
  bool axis_active(int axis) const { return dim_of_axis(axis) >= 0; }

  // Row-major strides, one per storage dimension.
  std::vector<std::int64_t> strides() const;

  std::vector<int> unravel(std::int64_t index) const;

  // Coordinate values of a grid point on all 2n real axes (0 on inactive
  // axes).  x_j = 2 pi j / N on active ones.
  std::vector<double> coords(std::int64_t index) const;

  bool operator==(const TorusGeometry&) const = default;
};

// (2 pi)^{2n}; inactive axes contribute their full period factor.
double torus_volume(const TorusGeometry& g);

}  // namespace ftcy
