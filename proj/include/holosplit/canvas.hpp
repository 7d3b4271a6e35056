#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "holosplit/types.hpp"

namespace holosplit {

// Uniform node lattice over a rectangle. Node (i,j) sits at
// (x0 + i*h, y0 + j*h); quadrature treats each node as the center of an
// h-by-h cell. All fields, masks and distance transforms in the library
// live on one of these.
struct Canvas {
  double x0 = 0.0, y0 = 0.0, h = 1.0;
  int nx = 0, ny = 0;

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  Cx node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  Cx node(int k) const { return node(k % nx, k / nx); }
  bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
  Box box() const { return {x0, y0, x0 + (nx - 1) * h, y0 + (ny - 1) * h}; }

  // Fractional lattice coordinates of a point.
  double u(Cx z) const { return (z.real() - x0) / h; }
  double v(Cx z) const { return (z.imag() - y0) / h; }

  // Smallest lattice with spacing h whose nodes cover `b`.
  static Canvas cover(Box b, double h);

  bool same_lattice(const Canvas& o) const;
};

using Mask = std::vector<std::uint8_t>;

int mask_count(const Mask& m);

// Morphology in cell units (8-neighbor structuring element, k rounds).
Mask erode_cells(const Canvas& cv, const Mask& m, int k);
Mask dilate_cells(const Canvas& cv, const Mask& m, int k);

Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
Mask mask_minus(const Mask& a, const Mask& b);

// Exact Euclidean distance (world units) from every node to the nearest
// true node of `m`; squared-distance transform of Felzenszwalb-Huttenlocher
// underneath. Nodes of `m` itself get 0.
std::vector<double> distance_field(const Canvas& cv, const Mask& m);

// Scalar field with bilinear interpolation. Used for distance fields:
// bilinear is monotone and a 1-Lipschitz function is reproduced to O(h).
struct ScalarField {
  Canvas cv;
  std::vector<double> v;

  bool in_range(Cx z) const;
  double interp(Cx z) const;  // clamped bilinear; caller checks in_range
};

// Complex field with a per-node validity mask and 4x4 Lagrange (bicubic)
// interpolation, exact on per-axis cubics. Interpolation requires the full
// stencil to be valid.
struct Field {
  Canvas cv;
  std::vector<Cx> v;
  Mask valid;

  Field() = default;
  Field(const Canvas& c) : cv(c), v(c.size(), Cx{0.0, 0.0}), valid(c.size(), 0) {}

  bool interpolable(Cx z) const;
  Cx interp(Cx z) const;  // throws Error("domain-violation") off the valid set

  // Max of |v| over a mask (nodes where both mask and valid are true).
  double sup_on(const Mask& m) const;
};

// In-place 2-D complex FFT (row-major, ny rows of nx), FFTW underneath with
// FFTW_ESTIMATE plans for run-to-run determinism. inverse=true includes the
// 1/(nx*ny) normalization.
void fft2d(std::vector<Cx>& data, int nx, int ny, bool inverse);

int next_pow2(int n);

// Scanline fill of a closed polygon (even-odd rule) onto a canvas mask.
Mask rasterize_polygon(const Canvas& cv, const std::vector<Cx>& poly);

}  // namespace holosplit
