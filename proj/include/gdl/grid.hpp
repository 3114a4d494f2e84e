#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gdl/linalg.hpp"

namespace gdl {

/// Axis-aligned rectangle in the z-plane.
struct Window {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
  friend bool operator==(const Window&, const Window&) = default;
};

/// Lattice of nx * ny nodes covering a window with square cells. Nodes are stored
/// row-major: index = iy * nx + ix, with re increasing along a row.
struct GridSpec {
  Window window;
  std::size_t nx = 0;
  std::size_t ny = 0;

  /// nx = ny = resolution nodes on `window`.
  static GridSpec square(const Window& window, std::size_t resolution);

  /// Throws ConfigError unless the window is nonempty, nx, ny >= 2 and the cells are
  /// square (step equal in both axes within 1e-12).
  void validate() const;

  double step() const { return (window.re_max - window.re_min) / static_cast<double>(nx - 1); }
  std::size_t node_count() const { return nx * ny; }
  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
  cplx node(std::size_t ix, std::size_t iy) const {
    const double h = step();
    return {window.re_min + h * static_cast<double>(ix),
            window.im_min + h * static_cast<double>(iy)};
  }
  cplx node(std::size_t index) const { return node(index % nx, index / nx); }
  bool is_interior(std::size_t index) const {
    const std::size_t ix = index % nx, iy = index / nx;
    return ix > 0 && iy > 0 && ix + 1 < nx && iy + 1 < ny;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class FieldKind { Predicted, PredictedEps, Empirical };

const char* to_string(FieldKind kind);

/// Density samples on a grid. Nodes without a value (empirical boundary nodes) hold NaN.
struct DensityField {
  GridSpec grid;
  FieldKind kind = FieldKind::Predicted;
  double eps = 0.0;         ///< regularization, PredictedEps and Empirical kinds
  std::size_t samples = 0;  ///< Monte Carlo samples, Empirical kind
  std::vector<double> values;
  /// Nodes whose evaluation failed and were filled from their neighbours.
  std::vector<std::size_t> flagged;

  bool has_value(std::size_t index) const;
  /// Riemann sum of the finite values times step^2.
  double mass() const;
};

/// CSV "re,im,rho", one row per node in storage order; nodes without a value print "nan".
std::string field_csv(const DensityField& field);

}  // namespace gdl
