#include "vpclt/grid.hpp"

#include <cmath>

namespace vpclt {

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid))
    throw validation_error("grid mismatch in sup_distance");
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j)
    m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

}  // namespace vpclt
