#pragma once

#include <vector>

namespace wavefreeze {

/// Uniform grid on [a,b] with M cells: x_j = a + j dx, j = 0..M.
struct GridSpec {
  double a = 0.0;
  double b = 1.0;
  int cells = 8;

  static GridSpec from_cells(double a, double b, int cells);
  /// Symmetric interval [-J, J] with spacing as close to dx as an integer cell count allows.
  static GridSpec symmetric(double half_width, double dx);

  double dx() const { return (b - a) / cells; }
  int nodes() const { return cells + 1; }
  double x(int j) const { return j == cells ? b : a + j * dx(); }
  std::vector<double> coordinates() const;
};

}  // namespace wavefreeze
