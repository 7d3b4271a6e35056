#include "holosplit/dbar.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "holosplit/error.hpp"

namespace holosplit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Near-field half-width, in cells, inside which the exact cell integral
// replaces the midpoint rule. The midpoint error per cell is O(h^4/|delta|^3),
// so beyond 3 cells it is already below the global O(h^2) budget.
constexpr int kNearCells = 3;

bool near_field(double dx, double dy, double h) {
  return std::abs(dx) <= (kNearCells + 0.5) * h && std::abs(dy) <= (kNearCells + 0.5) * h;
}

}  // namespace

Cx cell_kernel(Cx delta, double h) {
  // integral over the cell of dA(u)/(delta - u), by Stokes:
  //   (1/2i) contour integral of conj(u)/(delta - u) du + pi*conj(delta)*[delta in cell].
  // Each straight edge p0 -> p0 + L*e contributes
  //   conj(p0)*(-Lam) + conj(e)*(-L - q*Lam),  q = (delta - p0)/e,
  //   Lam = Log(q - L) - Log(q),
  // and the path q - t stays on one horizontal line, so principal logs agree
  // with the continuous branch whenever delta is off the edge itself.
  const double a = h / 2;
  const Cx corner[4] = {{-a, -a}, {a, -a}, {a, a}, {-a, a}};
  Cx boundary = 0;
  for (int k = 0; k < 4; ++k) {
    Cx p0 = corner[k];
    Cx p1 = corner[(k + 1) % 4];
    Cx e = (p1 - p0) / h;
    Cx q = (delta - p0) / e;
    Cx lam = std::log(q - h) - std::log(q);
    boundary += std::conj(p0) * (-lam) + std::conj(e) * (-h - q * lam);
  }
  Cx val = boundary / Cx{0, 2};
  if (std::abs(delta.real()) < a && std::abs(delta.imag()) < a) val += kPi * std::conj(delta);
  return val;
}

Form01Sample Form01Sample::zero(const Canvas& cv) {
  Form01Sample f;
  f.cv = cv;
  f.v.assign(static_cast<size_t>(cv.nx) * cv.ny, Cx{0, 0});
  f.support.assign(f.v.size(), 0);
  return f;
}

Form01Sample Form01Sample::from_function(const Canvas& cv, const std::function<Cx(Cx)>& fn,
                                         const Mask& candidate, double eps) {
  require(candidate.size() == static_cast<size_t>(cv.nx) * cv.ny, "invalid-input",
          "candidate mask size does not match the canvas");
  Form01Sample f = zero(cv);
  f.eps = eps;
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i) {
      size_t id = cv.idx(i, j);
      if (!candidate[id]) continue;
      Cx val = fn(cv.node(i, j));
      if (val == Cx{0, 0}) continue;  // support only where the coefficient is nonzero
      f.v[id] = val;
      f.support[id] = 1;
    }
  return f;
}

double Form01Sample::sup() const {
  double s = 0;
  for (size_t id = 0; id < v.size(); ++id)
    if (support[id]) s = std::max(s, std::abs(v[id]));
  return s;
}

double operator_constant(const JordanDomain& omega, double tau0) {
  require(tau0 > 0, "invalid-parameter", "tau0 must be positive");
  return 2.0 * (omega.diameter() + 2.0 * tau0);
}

Cx cauchy_transform(const Form01Sample& f, Cx z) {
  const Canvas& cv = f.cv;
  Box box{cv.x0, cv.y0, cv.x0 + (cv.nx - 1) * cv.h, cv.y0 + (cv.ny - 1) * cv.h};
  require(box.contains(z), "out-of-range", "evaluation point outside the sampled box");
  const double h = cv.h;
  const double h2 = h * h;
  Cx sum = 0;
  for (int j = 0; j < cv.ny; ++j) {
    double dy = z.imag() - (cv.y0 + j * cv.h);
    for (int i = 0; i < cv.nx; ++i) {
      size_t id = cv.idx(i, j);
      if (!f.support[id]) continue;
      double dx = z.real() - (cv.x0 + i * cv.h);
      Cx delta{dx, dy};
      sum += f.v[id] * (near_field(dx, dy, h) ? cell_kernel(delta, h) : h2 / delta);
    }
  }
  return sum / kPi;
}

namespace {

// FFT image of the convolution kernel, cached per lattice signature. Keyed on
// padded dims and the spacing only; displacement structure is origin-free.
using KernelKey = std::tuple<int, int, long long>;
std::map<KernelKey, std::shared_ptr<const std::vector<Cx>>> g_kernel_cache;
std::mutex g_kernel_mutex;

std::shared_ptr<const std::vector<Cx>> kernel_fft(int nx2, int ny2, double h) {
  KernelKey key{nx2, ny2, llround(h * (1LL << 40))};
  {
    std::lock_guard<std::mutex> lock(g_kernel_mutex);
    auto it = g_kernel_cache.find(key);
    if (it != g_kernel_cache.end()) return it->second;
  }
  auto k = std::make_shared<std::vector<Cx>>(static_cast<size_t>(nx2) * ny2, Cx{0, 0});
  const double h2 = h * h;
  for (int j = 0; j < ny2; ++j) {
    int sy = j <= ny2 / 2 ? j : j - ny2;
    for (int i = 0; i < nx2; ++i) {
      int sx = i <= nx2 / 2 ? i : i - nx2;
      if (sx == 0 && sy == 0) continue;  // self cell integrates to zero
      Cx delta{sx * h, sy * h};
      Cx val = (std::abs(sx) <= kNearCells && std::abs(sy) <= kNearCells)
                   ? cell_kernel(delta, h)
                   : h2 / delta;
      (*k)[static_cast<size_t>(j) * nx2 + i] = val / kPi;
    }
  }
  fft2d(*k, nx2, ny2, false);
  std::lock_guard<std::mutex> lock(g_kernel_mutex);
  auto [it, inserted] = g_kernel_cache.emplace(key, std::move(k));
  (void)inserted;
  return it->second;
}

}  // namespace

DbarSolution solve_dbar(const Form01Sample& f, const Mask& target, double constant,
                        const Mask* residual_mask) {
  const Canvas& cv = f.cv;
  const size_t n = static_cast<size_t>(cv.nx) * cv.ny;
  require(f.v.size() == n && f.support.size() == n, "invalid-input",
          "form arrays do not match the canvas");
  require(target.size() == n, "invalid-input", "target mask does not match the canvas");
  require(constant > 0, "invalid-parameter", "norm-bound constant must be positive");

  int nx2 = next_pow2(2 * cv.nx - 1);
  int ny2 = next_pow2(2 * cv.ny - 1);
  auto kfft = kernel_fft(nx2, ny2, cv.h);

  std::vector<Cx> buf(static_cast<size_t>(nx2) * ny2, Cx{0, 0});
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i) {
      size_t id = cv.idx(i, j);
      if (f.support[id]) buf[static_cast<size_t>(j) * nx2 + i] = f.v[id];
    }
  fft2d(buf, nx2, ny2, false);
  for (size_t id = 0; id < buf.size(); ++id) buf[id] *= (*kfft)[id];
  fft2d(buf, nx2, ny2, true);

  DbarSolution sol;
  sol.u = Field(cv);
  sol.constant = constant;
  sol.h = cv.h;
  sol.f_sup = f.sup();
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i) {
      size_t id = cv.idx(i, j);
      if (!target[id]) continue;
      sol.u.v[id] = buf[static_cast<size_t>(j) * nx2 + i];
      sol.u.valid[id] = 1;
      sol.u_sup = std::max(sol.u_sup, std::abs(sol.u.v[id]));
    }
  sol.norm_bound_ok = sol.u_sup <= constant * sol.f_sup + 1e-12;
  // Conservative roundoff scale of the padded transform pair; stopping rules
  // downstream treat multiples of this as the smallest meaningful residual.
  sol.noise_floor = 1e-14 * std::max(1.0, constant * sol.f_sup);

  const Mask& rm = residual_mask ? *residual_mask : target;
  require(rm.size() == n, "invalid-input", "residual mask does not match the canvas");
  double res = 0;
  bool any = false;
  for (int j = 1; j + 1 < cv.ny; ++j)
    for (int i = 1; i + 1 < cv.nx; ++i) {
      size_t id = cv.idx(i, j);
      if (!rm[id]) continue;
      if (!sol.u.valid[id] || !sol.u.valid[cv.idx(i - 1, j)] || !sol.u.valid[cv.idx(i + 1, j)] ||
          !sol.u.valid[cv.idx(i, j - 1)] || !sol.u.valid[cv.idx(i, j + 1)])
        continue;
      Cx dx = sol.u.v[cv.idx(i + 1, j)] - sol.u.v[cv.idx(i - 1, j)];
      Cx dy = sol.u.v[cv.idx(i, j + 1)] - sol.u.v[cv.idx(i, j - 1)];
      Cx db = (dx + Cx{0, 1} * dy) / (4 * cv.h);
      res = std::max(res, std::abs(db - f.v[id]));
      any = true;
    }
  sol.residual = any ? res : -1.0;
  return sol;
}

DbarSolution solve_dbar(const Form01Sample& f, const JordanDomain& omega, double eps,
                        double tau0, const Mask& target, const Mask* residual_mask) {
  require(eps > 0, "invalid-parameter", "dilation radius must be positive");
  require(eps <= tau0 * (1 + 1e-12), "out-of-range", "dilation radius exceeds the global cap");
  const Canvas& cv = f.cv;
  Mask inside(static_cast<size_t>(cv.nx) * cv.ny, 0);
  size_t count = 0;
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i)
      if (omega.inside(cv.node(i, j))) {
        inside[cv.idx(i, j)] = 1;
        ++count;
      }
  require(count > 0, "invalid-input", "domain does not meet the sampling lattice");
  std::vector<double> dist = distance_field(cv, inside);
  for (size_t id = 0; id < f.support.size(); ++id)
    if (f.support[id])
      require(dist[id] <= eps + 1.5 * cv.h, "invalid-support",
              "form support escapes the dilated domain");
  return solve_dbar(f, target, operator_constant(omega, tau0), residual_mask);
}

}  // namespace holosplit
