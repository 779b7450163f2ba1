#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace dtbh {

// Invalid configuration or malformed input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature / root-finding / normalization failure. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point in one or two dimensions. Implicit from double for the 1-D case.
struct Point {
  int dim = 1;
  std::array<double, 2> coord{0.0, 0.0};

  Point() = default;
  Point(double x) : dim(1), coord{x, 0.0} {}
  Point(double x, double y) : dim(2), coord{x, y} {}

  double x() const { return coord[0]; }
  double y() const { return coord[1]; }
  double operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

}  // namespace dtbh
