#pragma once

#include <complex>
#include <string>

namespace holosplit {

using Cx = std::complex<double>;

// Axis-aligned bounding box in the plane.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(Cx z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  Box expanded(double r) const { return {x0 - r, y0 - r, x1 + r, y1 + r}; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

// snprintf-backed number formatting (GCC 11 has no std::format).
std::string fmt(const char* spec, double v);
std::string fmt_cx(Cx z);

}  // namespace holosplit
