#include "wavefreeze/grid.hpp"

#include <cmath>
#include <sstream>

#include "wavefreeze/errors.hpp"

namespace wavefreeze {

GridSpec GridSpec::from_cells(double a, double b, int cells) {
  if (!(std::isfinite(a) && std::isfinite(b) && b > a)) fail(ErrorKind::Precondition, "grid requires a < b");
  if (cells < 8) {
    std::ostringstream os;
    os << "grid requires at least 8 cells, got " << cells;
    fail(ErrorKind::Precondition, os.str());
  }
  return GridSpec{a, b, cells};
}

GridSpec GridSpec::symmetric(double half_width, double dx) {
  require(half_width > 0.0 && dx > 0.0, "symmetric grid requires J > 0 and dx > 0");
  return from_cells(-half_width, half_width, static_cast<int>(std::lround(2.0 * half_width / dx)));
}

std::vector<double> GridSpec::coordinates() const {
  std::vector<double> x(static_cast<std::size_t>(nodes()));
  for (int j = 0; j <= cells; ++j) x[static_cast<std::size_t>(j)] = this->x(j);
  return x;
}

}  // namespace wavefreeze
