#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "holosplit/error.hpp"
#include "holosplit/types.hpp"

namespace holosplit::testing {

inline std::mt19937_64 rng(std::uint64_t seed = 42) { return std::mt19937_64{seed}; }

inline Cx random_point(std::mt19937_64& g, double x0, double y0, double x1, double y1) {
  std::uniform_real_distribution<double> dx(x0, x1), dy(y0, y1);
  return {dx(g), dy(g)};
}

inline Cx random_unit(std::mt19937_64& g) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  return std::polar(1.0, 2.0 * 3.14159265358979323846 * d(g));
}

// Coefficients c_2..c_{deg} of a small perturbation sum c_k z^k, scaled so
// the sup of the perturbation over |z| <= radius is about eps.
inline std::vector<Cx> random_perturbation(std::mt19937_64& g, double eps, int deg,
                                           double radius) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<Cx> c(deg + 1, Cx{0.0, 0.0});
  double scale = 0.0;
  for (int k = 2; k <= deg; ++k) {
    c[k] = Cx{d(g), d(g)};
    scale += std::abs(c[k]) * std::pow(radius, k);
  }
  for (int k = 2; k <= deg; ++k) c[k] *= eps / scale;
  return c;
}

// Kind string of the Error thrown by f, or "" if nothing was thrown.
template <class F>
std::string thrown_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    std::string w = e.what();
    auto pos = w.find(':');
    return pos == std::string::npos ? w : w.substr(0, pos);
  }
  return "";
}

}  // namespace holosplit::testing
