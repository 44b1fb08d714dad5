#ifndef VPCLT_GRID_HPP
#define VPCLT_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vpclt {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Thrown on bad configuration/parameters (CLI exit code 1).
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& what, std::string field = "")
      : std::invalid_argument(what), field(std::move(field)) {}
  std::string field;
};

// Thrown on numeric failure such as PSD breakdown (CLI exit code 2).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// N equispaced nodes t_j = 2*pi*j/N on [0, 2*pi). N must be even and >= 4
// so spectra of degree < N/2 are alias-free and symmetric.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int size) : size_(size) {
    if (size < 4 || size % 2 != 0)
      throw validation_error("grid size must be even and >= 4", "grid.size");
  }

  int size() const { return size_; }
  double step() const { return kTwoPi / size_; }
  double node(int j) const { return kTwoPi * j / size_; }

  std::vector<double> nodes() const {
    std::vector<double> t(size_);
    for (int j = 0; j < size_; ++j) t[j] = node(j);
    return t;
  }

  bool operator==(const PeriodicGrid& o) const { return size_ == o.size_; }

 private:
  int size_;
};

// Real-valued function sampled on a periodic grid. values[j] = f(t_j),
// with f(t_N) = f(t_0) by periodicity.
struct GridFunction {
  PeriodicGrid grid;
  std::vector<double> values;

  GridFunction(PeriodicGrid g, std::vector<double> v)
      : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.size())
      throw validation_error("value count does not match grid size");
  }

  static GridFunction zero(PeriodicGrid g) {
    return GridFunction(g, std::vector<double>(g.size(), 0.0));
  }
};

double sup_norm(const GridFunction& f);
double sup_distance(const GridFunction& a, const GridFunction& b);

}  // namespace vpclt

#endif  // VPCLT_GRID_HPP
