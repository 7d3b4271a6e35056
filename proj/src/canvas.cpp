#include "holosplit/canvas.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>

#include "holosplit/error.hpp"

namespace holosplit {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt_cx(Cx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.9g, %.9g)", z.real(), z.imag());
  return buf;
}

Canvas Canvas::cover(Box b, double h) {
  require(h > 0.0, "invalid-grid", "canvas spacing must be positive");
  require(b.x1 >= b.x0 && b.y1 >= b.y0, "invalid-grid", "degenerate canvas box");
  Canvas c;
  c.h = h;
  c.x0 = std::floor(b.x0 / h) * h;
  c.y0 = std::floor(b.y0 / h) * h;
  c.nx = static_cast<int>(std::ceil((b.x1 - c.x0) / h)) + 1;
  c.ny = static_cast<int>(std::ceil((b.y1 - c.y0) / h)) + 1;
  return c;
}

bool Canvas::same_lattice(const Canvas& o) const {
  return std::abs(h - o.h) < 1e-15 && std::abs(x0 - o.x0) < 1e-12 &&
         std::abs(y0 - o.y0) < 1e-12 && nx == o.nx && ny == o.ny;
}

int mask_count(const Mask& m) {
  int n = 0;
  for (auto b : m) n += b ? 1 : 0;
  return n;
}

Mask erode_cells(const Canvas& cv, const Mask& m, int k) {
  Mask cur = m;
  for (int round = 0; round < k; ++round) {
    Mask next(cur.size(), 0);
    for (int j = 0; j < cv.ny; ++j)
      for (int i = 0; i < cv.nx; ++i) {
        bool keep = cur[cv.idx(i, j)] != 0;
        for (int dj = -1; keep && dj <= 1; ++dj)
          for (int di = -1; keep && di <= 1; ++di) {
            int ii = i + di, jj = j + dj;
            keep = cv.in_bounds(ii, jj) && cur[cv.idx(ii, jj)] != 0;
          }
        next[cv.idx(i, j)] = keep ? 1 : 0;
      }
    cur.swap(next);
  }
  return cur;
}

Mask dilate_cells(const Canvas& cv, const Mask& m, int k) {
  Mask cur = m;
  for (int round = 0; round < k; ++round) {
    Mask next(cur.size(), 0);
    for (int j = 0; j < cv.ny; ++j)
      for (int i = 0; i < cv.nx; ++i) {
        bool hit = false;
        for (int dj = -1; !hit && dj <= 1; ++dj)
          for (int di = -1; !hit && di <= 1; ++di) {
            int ii = i + di, jj = j + dj;
            hit = cv.in_bounds(ii, jj) && cur[cv.idx(ii, jj)] != 0;
          }
        next[cv.idx(i, j)] = hit ? 1 : 0;
      }
    cur.swap(next);
  }
  return cur;
}

Mask mask_and(const Mask& a, const Mask& b) {
  Mask r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = (a[k] && b[k]) ? 1 : 0;
  return r;
}

Mask mask_or(const Mask& a, const Mask& b) {
  Mask r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = (a[k] || b[k]) ? 1 : 0;
  return r;
}

Mask mask_minus(const Mask& a, const Mask& b) {
  Mask r(a.size());
  for (size_t k = 0; k < a.size(); ++k) r[k] = (a[k] && !b[k]) ? 1 : 0;
  return r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared distance transform (lower envelope of parabolas).
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n,
          std::vector<int>& v, std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == kInf) {
      continue;
    }
    double s;
    while (true) {
      if (f[v[k]] == kInf) {
        // No finite parabola yet; replace.
        if (k == 0) {
          v[0] = q;
          z[0] = -kInf;
          z[1] = kInf;
          goto placed;
        }
        --k;
        continue;
      }
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  placed:;
  }
  int kk = 0;
  for (int q = 0; q < n; ++q) {
    if (f[v[kk]] == kInf) {
      d[q] = kInf;
      continue;
    }
    while (z[kk + 1] < q) ++kk;
    d[q] = (q - v[kk]) * (double)(q - v[kk]) + f[v[kk]];
  }
}

}  // namespace

std::vector<double> distance_field(const Canvas& cv, const Mask& m) {
  const int nx = cv.nx, ny = cv.ny;
  std::vector<double> g(cv.size());
  for (int k = 0; k < cv.size(); ++k) g[k] = m[k] ? 0.0 : kInf;

  int n = std::max(nx, ny);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Columns.
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) f[j] = g[cv.idx(i, j)];
    dt1d(f, d, ny, v, z);
    for (int j = 0; j < ny; ++j) g[cv.idx(i, j)] = d[j];
  }
  // Rows.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) f[i] = g[cv.idx(i, j)];
    dt1d(f, d, nx, v, z);
    for (int i = 0; i < nx; ++i) g[cv.idx(i, j)] = d[i];
  }
  for (auto& x : g) x = (x == kInf) ? kInf : std::sqrt(x) * cv.h;
  return g;
}

bool ScalarField::in_range(Cx z) const {
  double u = cv.u(z), w = cv.v(z);
  return u >= 0.0 && u <= cv.nx - 1 && w >= 0.0 && w <= cv.ny - 1;
}

double ScalarField::interp(Cx z) const {
  double u = std::clamp(cv.u(z), 0.0, (double)cv.nx - 1);
  double w = std::clamp(cv.v(z), 0.0, (double)cv.ny - 1);
  int i = std::min((int)u, cv.nx - 2), j = std::min((int)w, cv.ny - 2);
  if (cv.nx == 1) i = 0;
  if (cv.ny == 1) j = 0;
  double a = u - i, b = w - j;
  double v00 = v[cv.idx(i, j)], v10 = v[cv.idx(std::min(i + 1, cv.nx - 1), j)];
  double v01 = v[cv.idx(i, std::min(j + 1, cv.ny - 1))];
  double v11 = v[cv.idx(std::min(i + 1, cv.nx - 1), std::min(j + 1, cv.ny - 1))];
  return (1 - a) * (1 - b) * v00 + a * (1 - b) * v10 + (1 - a) * b * v01 + a * b * v11;
}

namespace {

// 4-point Lagrange weights at nodes {-1,0,1,2} for parameter t in [0,1].
inline void lagrange4(double t, double w[4]) {
  double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
  w[0] = -t * tm * t2 / 6.0;
  w[1] = tp * tm * t2 / 2.0;
  w[2] = -tp * t * t2 / 2.0;
  w[3] = tp * t * tm / 6.0;
}

}  // namespace

bool Field::interpolable(Cx z) const {
  double u = cv.u(z), w = cv.v(z);
  if (!(u >= 1.0 && u <= cv.nx - 2.0 && w >= 1.0 && w <= cv.ny - 2.0)) return false;
  int i1 = std::min((int)u, cv.nx - 3);
  int j1 = std::min((int)w, cv.ny - 3);
  for (int dj = -1; dj <= 2; ++dj)
    for (int di = -1; di <= 2; ++di)
      if (!valid[cv.idx(i1 + di, j1 + dj)]) return false;
  return true;
}

Cx Field::interp(Cx z) const {
  double u = cv.u(z), w = cv.v(z);
  if (!(u >= 1.0 && u <= cv.nx - 2.0 && w >= 1.0 && w <= cv.ny - 2.0))
    fail("domain-violation", "interpolation point " + fmt_cx(z) + " outside field lattice");
  int i1 = std::min((int)u, cv.nx - 3);
  int j1 = std::min((int)w, cv.ny - 3);
  double wx[4], wy[4];
  lagrange4(u - i1, wx);
  lagrange4(w - j1, wy);
  Cx acc{0.0, 0.0};
  for (int dj = -1; dj <= 2; ++dj) {
    Cx row{0.0, 0.0};
    int base = cv.idx(i1 - 1, j1 + dj);
    for (int di = 0; di < 4; ++di) {
      if (!valid[base + di])
        fail("domain-violation",
             "interpolation stencil at " + fmt_cx(z) + " touches undefined nodes");
      row += wx[di] * v[base + di];
    }
    acc += wy[dj + 1] * row;
  }
  return acc;
}

double Field::sup_on(const Mask& m) const {
  double s = 0.0;
  for (size_t k = 0; k < m.size(); ++k)
    if (m[k] && valid[k]) s = std::max(s, std::abs(v[k]));
  return s;
}

namespace {
std::mutex& fftw_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

void fft2d(std::vector<Cx>& data, int nx, int ny, bool inverse) {
  require((int)data.size() == nx * ny, "invalid-grid", "fft2d size mismatch");
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_2d(ny, nx, reinterpret_cast<fftw_complex*>(data.data()),
                            reinterpret_cast<fftw_complex*>(data.data()),
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  if (inverse) {
    double s = 1.0 / (double(nx) * double(ny));
    for (auto& z : data) z *= s;
  }
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

Mask rasterize_polygon(const Canvas& cv, const std::vector<Cx>& poly) {
  require(poly.size() >= 3, "invalid-input", "polygon needs at least 3 vertices");
  Mask m(cv.size(), 0);
  const int n = (int)poly.size();
  std::vector<double> xs;
  xs.reserve(16);
  for (int j = 0; j < cv.ny; ++j) {
    double y = cv.y0 + j * cv.h;
    xs.clear();
    for (int k = 0; k < n; ++k) {
      Cx p = poly[k], q = poly[(k + 1) % n];
      double y0 = p.imag(), y1 = q.imag();
      if ((y0 <= y && y1 > y) || (y1 <= y && y0 > y)) {
        double t = (y - y0) / (y1 - y0);
        xs.push_back(p.real() + t * (q.real() - p.real()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      int i0 = (int)std::ceil((xs[k] - cv.x0) / cv.h);
      int i1 = (int)std::floor((xs[k + 1] - cv.x0) / cv.h);
      i0 = std::max(i0, 0);
      i1 = std::min(i1, cv.nx - 1);
      for (int i = i0; i <= i1; ++i) m[cv.idx(i, j)] = 1;
    }
  }
  return m;
}

}  // namespace holosplit
