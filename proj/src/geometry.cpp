#include "holosplit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "holosplit/error.hpp"

namespace holosplit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seg_distance(Cx z, Cx p, Cx q) {
  Cx d = q - p;
  double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(z - p);
  double t = std::clamp(((z - p) * std::conj(d)).real() / L2, 0.0, 1.0);
  return std::abs(z - (p + t * d));
}

bool segments_intersect(Cx a, Cx b, Cx c, Cx d) {
  auto cross = [](Cx u, Cx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

std::shared_ptr<const JordanDomain> JordanDomain::ellipse(double a, double b, Cx center,
                                                          int boundary_points) {
  require(a > 0.0 && b > 0.0, "invalid-parameter", "ellipse semi-axes must be positive");
  auto dom = std::shared_ptr<JordanDomain>(new JordanDomain());
  dom->g_ = [a, b, center](double t) {
    return center + Cx{a * std::cos(kTwoPi * t), b * std::sin(kTwoPi * t)};
  };
  dom->dg_ = [a, b](double t) {
    return kTwoPi * Cx{-a * std::sin(kTwoPi * t), b * std::cos(kTwoPi * t)};
  };
  dom->ddg_ = [a, b](double t) {
    return -kTwoPi * kTwoPi * Cx{a * std::cos(kTwoPi * t), b * std::sin(kTwoPi * t)};
  };
  dom->finalize(boundary_points);
  return dom;
}

std::shared_ptr<const JordanDomain> JordanDomain::fourier(
    const std::vector<std::pair<int, Cx>>& coeffs, int boundary_points) {
  require(!coeffs.empty(), "invalid-parameter", "fourier boundary needs coefficients");
  auto dom = std::shared_ptr<JordanDomain>(new JordanDomain());
  auto cs = coeffs;
  dom->g_ = [cs](double t) {
    Cx z{0.0, 0.0};
    for (auto& [k, c] : cs) z += c * std::polar(1.0, kTwoPi * k * t);
    return z;
  };
  dom->dg_ = [cs](double t) {
    Cx z{0.0, 0.0};
    for (auto& [k, c] : cs) z += c * Cx{0.0, kTwoPi * k} * std::polar(1.0, kTwoPi * k * t);
    return z;
  };
  dom->ddg_ = [cs](double t) {
    Cx z{0.0, 0.0};
    for (auto& [k, c] : cs) {
      double w = kTwoPi * k;
      z += c * Cx{-w * w, 0.0} * std::polar(1.0, w * t);
    }
    return z;
  };
  dom->finalize(boundary_points);
  return dom;
}

std::shared_ptr<const JordanDomain> JordanDomain::translated(Cx shift) const {
  auto dom = std::shared_ptr<JordanDomain>(new JordanDomain());
  auto g = g_, dg = dg_, ddg = ddg_;
  dom->g_ = [g, shift](double t) { return g(t) + shift; };
  dom->dg_ = dg;
  dom->ddg_ = ddg;
  dom->finalize((int)poly_.size());
  return dom;
}

void JordanDomain::finalize(int boundary_points) {
  require(boundary_points >= 64, "invalid-parameter", "boundary polyline too coarse");
  const int n = boundary_points;
  poly_.resize(n);
  poly_t_.resize(n);
  double area2 = 0.0;
  for (int k = 0; k < n; ++k) {
    double t = (double)k / n;
    poly_t_[k] = t;
    poly_[k] = g_(t);
    require(std::abs(dg_(t)) > 1e-12, "invalid-input", "boundary parameterization is singular");
  }
  for (int k = 0; k < n; ++k) {
    Cx p = poly_[k], q = poly_[(k + 1) % n];
    area2 += p.real() * q.imag() - q.real() * p.imag();
  }
  require(area2 > 0.0, "invalid-input", "boundary must be positively oriented");

  // Simple-closed check: no crossing between non-adjacent polyline segments.
  for (int i = 0; i < n; ++i) {
    Cx a = poly_[i], b = poly_[(i + 1) % n];
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, poly_[j], poly_[(j + 1) % n]))
        fail("invalid-input", "boundary polyline self-intersects");
    }
  }

  double xmin = poly_[0].real(), xmax = xmin, ymin = poly_[0].imag(), ymax = ymin;
  Cx cen{0.0, 0.0};
  for (auto& p : poly_) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
    cen += p;
  }
  bbox_ = {xmin, ymin, xmax, ymax};
  centroid_ = cen / (double)n;

  diameter_ = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      diameter_ = std::max(diameter_, std::abs(poly_[i] - poly_[j]));

  kappa_max_ = 0.0;
  bool convex = true;
  for (int k = 0; k < n; ++k) {
    double t = poly_t_[k];
    Cx d1 = dg_(t), d2 = ddg_(t);
    double num = d1.real() * d2.imag() - d1.imag() * d2.real();
    double speed = std::abs(d1);
    kappa_max_ = std::max(kappa_max_, std::abs(num) / (speed * speed * speed));
    if (num <= 0.0) convex = false;  // positive orientation: curvature must stay > 0
  }
  convex_ = convex;

  inradius_ = 1e300;
  for (int k = 0; k < n; ++k)
    inradius_ = std::min(inradius_, seg_distance(centroid_, poly_[k], poly_[(k + 1) % n]));

  // Tubular radius: curvature bound, capped by a crude medial estimate from
  // far-apart polyline pairs (matters only for strongly nonconvex shapes).
  double reach = kappa_max_ > 0.0 ? 1.0 / kappa_max_ : 1e300;
  if (!convex_) {
    double self = 1e300;
    int window = n / 8;
    for (int i = 0; i < n; ++i)
      for (int j = i + window; j < n && (n - (j - i)) >= window; ++j)
        self = std::min(self, std::abs(poly_[i] - poly_[j]));
    reach = std::min(reach, self / 2.0);
  }
  tube_radius_ = reach;
}

Cx JordanDomain::gamma(double t) const { return g_(t); }
Cx JordanDomain::dgamma(double t) const { return dg_(t); }
Cx JordanDomain::ddgamma(double t) const { return ddg_(t); }

bool JordanDomain::inside(Cx z) const {
  const int n = (int)poly_.size();
  bool in = false;
  for (int k = 0; k < n; ++k) {
    Cx p = poly_[k], q = poly_[(k + 1) % n];
    if ((p.imag() <= z.imag() && q.imag() > z.imag()) ||
        (q.imag() <= z.imag() && p.imag() > z.imag())) {
      double t = (z.imag() - p.imag()) / (q.imag() - p.imag());
      if (p.real() + t * (q.real() - p.real()) > z.real()) in = !in;
    }
  }
  return in;
}

double JordanDomain::nearest_param(Cx z) const {
  const int n = (int)poly_.size();
  int best = 0;
  double bd = 1e300;
  for (int k = 0; k < n; ++k) {
    double d = std::norm(z - poly_[k]);
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  double t = poly_t_[best];
  for (int it = 0; it < 30; ++it) {
    Cx d1 = dg_(t), d2 = ddg_(t), r = g_(t) - z;
    double F = (r * std::conj(d1)).real();
    double dF = std::norm(d1) + (r * std::conj(d2)).real();
    if (dF <= 0.0) break;
    double step = F / dF;
    t -= step;
    if (std::abs(step) < 1e-15) break;
  }
  t -= std::floor(t);
  // Guard: Newton must not have escaped to a worse branch.
  if (std::norm(z - g_(t)) > bd + 1e-12) t = poly_t_[best];
  return t;
}

double signed_distance(const JordanDomain& omega, Cx z) {
  double t = omega.nearest_param(z);
  Cx p = omega.gamma(t);
  double d = std::abs(z - p);
  Cx tang = omega.dgamma(t);
  Cx outward = Cx{0.0, -1.0} * (tang / std::abs(tang));
  double side = ((z - p) * std::conj(outward)).real();
  return side >= 0.0 ? d : -d;
}

Region Region::from_points(std::vector<Cx> pts, std::string label) {
  require(!pts.empty(), "invalid-input", "point region needs at least one point");
  Region r;
  r.samples = std::move(pts);
  r.h = 0.0;
  double xmin = r.samples[0].real(), xmax = xmin, ymin = r.samples[0].imag(), ymax = ymin;
  for (auto& p : r.samples) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  r.bbox = {xmin, ymin, xmax, ymax};
  auto pts2 = r.samples;
  r.contains = [pts2](Cx z) {
    for (auto& p : pts2)
      if (std::abs(z - p) < 1e-12) return true;
    return false;
  };
  r.label = std::move(label);
  return r;
}

Region Region::from_domain(const std::shared_ptr<const JordanDomain>& omega, double h,
                           std::string label) {
  require(h > 0.0, "invalid-grid", "sample spacing must be positive");
  Canvas cv = Canvas::cover(omega->bbox().expanded(2 * h), h);
  Mask m = rasterize_polygon(cv, omega->polyline());
  Region r = from_mask(cv, m, std::move(label));
  auto om = omega;
  r.contains = [om](Cx z) { return om->inside(z) || std::abs(signed_distance(*om, z)) < 1e-12; };
  r.bbox = omega->bbox();
  return r;
}

Region Region::boundary_of(const JordanDomain& omega, std::string label) {
  Region r;
  r.samples = omega.polyline();
  const int n = (int)r.samples.size();
  double step = 0.0;
  for (int k = 0; k < n; ++k) step = std::max(step, std::abs(r.samples[(k + 1) % n] - r.samples[k]));
  r.h = step;
  r.bbox = omega.bbox();
  auto poly = r.samples;
  r.contains = [poly, step](Cx z) {
    const int n = (int)poly.size();
    for (int k = 0; k < n; ++k)
      if (seg_distance(z, poly[k], poly[(k + 1) % n]) < step * 0.05) return true;
    return false;
  };
  r.label = std::move(label);
  return r;
}

Region Region::from_mask(const Canvas& cv, const Mask& m, std::string label) {
  Region r;
  r.h = cv.h;
  r.label = std::move(label);
  r.samples.reserve(mask_count(m));
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (int k = 0; k < cv.size(); ++k)
    if (m[k]) {
      Cx z = cv.node(k);
      r.samples.push_back(z);
      xmin = std::min(xmin, z.real());
      xmax = std::max(xmax, z.real());
      ymin = std::min(ymin, z.imag());
      ymax = std::max(ymax, z.imag());
    }
  require(!r.samples.empty(), "invalid-input", "mask region is empty");
  r.bbox = {xmin, ymin, xmax, ymax};
  auto cvc = cv;
  auto mc = m;
  r.contains = [cvc, mc](Cx z) {
    int i = (int)std::lround(cvc.u(z)), j = (int)std::lround(cvc.v(z));
    return cvc.in_bounds(i, j) && mc[cvc.idx(i, j)] != 0;
  };
  return r;
}

Region dilate(const Region& m, double r) {
  require(r > 0.0, "invalid-parameter", "dilation radius must be positive, got " + fmt("%g", r));
  require(!m.samples.empty(), "invalid-input", "dilation needs a sampled region");

  double h = m.h > 0.0 ? m.h : r / 32.0;
  h = std::min(h, r / 8.0);
  Canvas cv = Canvas::cover(m.bbox.expanded(r + 4 * h), h);

  Mask stamp(cv.size(), 0);
  for (auto& p : m.samples) {
    int i = (int)std::lround(cv.u(p)), j = (int)std::lround(cv.v(p));
    if (cv.in_bounds(i, j)) stamp[cv.idx(i, j)] = 1;
  }
  ScalarField dist{cv, distance_field(cv, stamp)};

  Region out;
  out.h = h;
  out.bbox = m.bbox.expanded(r);
  out.label = m.label + "(" + fmt("%g", r) + ")";
  Mask dm(cv.size(), 0);
  for (int k = 0; k < cv.size(); ++k)
    if (dist.v[k] < r) {
      dm[k] = 1;
      out.samples.push_back(cv.node(k));
    }
  out.contains = [dist, r](Cx z) { return dist.in_range(z) && dist.interp(z) < r; };
  return out;
}

double hausdorff_distance(const Region& k, const Region& l) {
  require(!k.samples.empty() && !l.samples.empty(), "invalid-input",
          "hausdorff distance needs sampled regions");
  auto one_sided = [](const std::vector<Cx>& from, const std::vector<Cx>& to) {
    double worst = 0.0;
    for (auto& p : from) {
      double best = 1e300;
      for (auto& q : to) best = std::min(best, std::norm(p - q));
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(k.samples, l.samples), one_sided(l.samples, k.samples));
}

double c2_metric(const DefiningFunction& r1, const DefiningFunction& r2, int truncation,
                 double spacing, double fd_step) {
  require(truncation >= 1, "invalid-parameter", "truncation must be at least 1");
  require(spacing > 0.0 && fd_step > 0.0, "invalid-parameter", "c2_metric steps must be positive");

  const double d = fd_step;
  double total = 0.0;
  for (int j = 1; j <= truncation; ++j) {
    double norm = 0.0;
    int n = (int)std::floor(j / spacing);
    for (int jy = -n; jy <= n; ++jy)
      for (int jx = -n; jx <= n; ++jx) {
        Cx z{jx * spacing, jy * spacing};
        if (std::norm(z) > (double)j * j) continue;
        double cv1, cv2;
        bool far1 = r1.far_const && r1.far_const(z, &cv1);
        bool far2 = r2.far_const && r2.far_const(z, &cv2);
        if (far1 && far2) {
          norm = std::max(norm, std::abs(cv2 - cv1));
          continue;
        }
        auto g = [&](double dx, double dy) {
          Cx w = z + Cx{dx, dy};
          return r2.f(w) - r1.f(w);
        };
        double f0 = g(0, 0);
        double fpx = g(d, 0), fmx = g(-d, 0), fpy = g(0, d), fmy = g(0, -d);
        double fpp = g(d, d), fpm = g(d, -d), fmp = g(-d, d), fmm = g(-d, -d);
        double fx = (fpx - fmx) / (2 * d), fy = (fpy - fmy) / (2 * d);
        double fxx = (fpx - 2 * f0 + fmx) / (d * d);
        double fyy = (fpy - 2 * f0 + fmy) / (d * d);
        double fxy = (fpp - fpm - fmp + fmm) / (4 * d * d);
        for (double q : {std::abs(f0), std::abs(fx), std::abs(fy), std::abs(fxx), std::abs(fyy),
                         std::abs(fxy)})
          norm = std::max(norm, q);
      }
    total += std::pow(2.0, -j) * norm / (norm + 1.0);
  }
  return total;
}

double defining_profile(double t, double mu, double A) {
  // Warped exponent: sigma(t) = t on [-4mu,4mu], then the derivative is
  // faded out with a quintic smoothstep so sigma is constant past 6mu.
  auto warp_pos = [mu](double t) {
    if (t <= 4 * mu) return t;
    double s = std::min((t - 4 * mu) / (2 * mu), 1.0);
    // integral of (1 - smoothstep) from 0 to s, scaled by 2mu
    double integ = s - (std::pow(s, 6) - 3 * std::pow(s, 5) + 2.5 * std::pow(s, 4));
    return 4 * mu + 2 * mu * integ;
  };
  double sigma = t >= 0.0 ? warp_pos(t) : -warp_pos(-t);
  return std::exp(A * sigma) - 1.0;
}

DefiningFunction build_defining_function(const std::shared_ptr<const JordanDomain>& omega,
                                         double tau, double mu, double A) {
  require(mu > 0.0, "invalid-parameter", "profile width mu must be positive");
  require(A > 1.0, "invalid-parameter", "profile rate A must exceed 1");
  require(tau >= 0.0, "invalid-parameter", "offset tau must be nonnegative");
  double tau0 = mu / 1024.0;
  require(tau <= tau0 * (1 + 1e-12), "out-of-range",
          "tau = " + fmt("%g", tau) + " exceeds tau0 = mu/2^10 = " + fmt("%g", tau0));
  require(omega->tube_radius() >= 7 * mu, "geometry-infeasible",
          "signed distance not certifiably C^2 on the 7*mu tube (tube radius " +
              fmt("%g", omega->tube_radius()) + " < " + fmt("%g", 7 * mu) + ")");

  DefiningFunction r;
  r.source = omega;
  r.tau = tau;
  r.mu = mu;
  r.A = A;
  r.note = "profile defining function";
  double base = -std::exp(A * tau) + 1.0;
  auto om = omega;
  r.f = [om, base, mu, A](Cx z) { return base + defining_profile(signed_distance(*om, z), mu, A); };

  Cx cen = omega->interior_point();
  double rin = omega->inside(cen) ? omega->inradius() : 0.0;
  Box bb = omega->bbox();
  double hi = base + defining_profile(7 * mu, mu, A);
  double lo = base + defining_profile(-7 * mu, mu, A);
  r.far_const = [cen, rin, bb, mu, hi, lo](Cx z, double* val) {
    double margin = 6.5 * mu;
    if (!bb.expanded(margin).contains(z)) {
      *val = hi;
      return true;
    }
    if (std::abs(z - cen) < rin - margin) {
      *val = lo;
      return true;
    }
    return false;
  };
  return r;
}

namespace {

Cx cross_at(Cx p, Cx q, double s) {
  double t = (s - p.real()) / (q.real() - p.real());
  return Cx{s, p.imag() + t * (q.imag() - p.imag())};
}

// Arcs of the boundary polyline inside the predicate, in boundary order,
// each beginning and ending at an interpolated crossing point. Traversal is
// rotated to start outside the kept set so no arc wraps the seam.
std::vector<std::vector<Cx>> kept_arcs(const std::vector<Cx>& poly,
                                       const std::function<bool(Cx)>& keep,
                                       const std::vector<double>& lines) {
  const int n = (int)poly.size();
  int k0 = -1;
  for (int k = 0; k < n; ++k)
    if (!keep(poly[k])) {
      k0 = k;
      break;
    }
  require(k0 >= 0, "geometry-infeasible", "strip does not cut the boundary");

  // Each strict line crossing toggles membership; crossing points are arc
  // endpoints and interior vertices stream into the current arc.
  std::vector<std::vector<Cx>> arcs;
  std::vector<Cx> cur;
  bool state = false;
  for (int k = 0; k < n; ++k) {
    Cx p = poly[(k0 + k) % n], q = poly[(k0 + k + 1) % n];
    if (state) cur.push_back(p);
    std::vector<Cx> xs;
    for (double s : lines)
      if ((p.real() - s) * (q.real() - s) < 0.0) xs.push_back(cross_at(p, q, s));
    std::sort(xs.begin(), xs.end(),
              [p](Cx a, Cx b) { return std::abs(a - p) < std::abs(b - p); });
    for (Cx x : xs) {
      cur.push_back(x);
      if (state) {
        if (cur.size() >= 2) arcs.push_back(cur);
        cur.clear();
      }
      state = !state;
    }
  }
  if (cur.size() >= 2) arcs.push_back(cur);
  return arcs;
}

void append_chord(std::vector<Cx>& out, Cx e0, Cx e1, double chord_step) {
  double len = std::abs(e1 - e0);
  int steps = std::max(2, (int)std::ceil(len / chord_step));
  for (int k = 1; k < steps; ++k) out.push_back(e0 + (double)k / steps * (e1 - e0));
}

std::vector<Cx> clip_polyline_to_strip(const JordanDomain& omega, bool keep_left, double s,
                                       double chord_step) {
  // Boundary piece of {Re <= s} (keep_left) or {Re >= s}, closed with the
  // vertical chord. Convexity gives exactly one kept arc.
  auto keep = [keep_left, s](Cx p) { return keep_left ? p.real() <= s : p.real() >= s; };
  auto arcs = kept_arcs(omega.polyline(), keep, {s});
  require(arcs.size() == 1, "geometry-infeasible",
          "strip line Re = " + fmt("%g", s) + " must cut off a single boundary arc");
  std::vector<Cx> out = arcs[0];
  append_chord(out, out.back(), out.front(), chord_step);
  return out;
}

std::vector<Cx> lens_polyline(const JordanDomain& omega, double s1, double s2,
                              double chord_step) {
  auto keep = [s1, s2](Cx p) { return p.real() >= s1 && p.real() <= s2; };
  auto arcs = kept_arcs(omega.polyline(), keep, {s1, s2});
  require(arcs.size() == 2, "geometry-infeasible",
          "strip must cut the boundary into exactly two arcs (convex domain)");
  std::vector<Cx> out;
  for (int a = 0; a < 2; ++a) {
    for (auto& p : arcs[a]) out.push_back(p);
    append_chord(out, arcs[a].back(), arcs[(a + 1) % 2].front(), chord_step);
  }
  return out;
}

}  // namespace

const std::vector<double>& CartanPair::dist_of(PairSet s) const {
  switch (s) {
    case PairSet::Omega: return dist_omega;
    case PairSet::A: return dist_a;
    case PairSet::B: return dist_b;
    case PairSet::C: return dist_c;
    case PairSet::AMinusB: return dist_ab_diff;
    case PairSet::BMinusA: return dist_ba_diff;
  }
  fail("invalid-parameter", "unknown pair set");
}

const Mask& CartanPair::mask_of(PairSet s) const {
  switch (s) {
    case PairSet::Omega: return omega_mask;
    case PairSet::A: return a_mask;
    case PairSet::B: return b_mask;
    case PairSet::C: return c_mask;
    case PairSet::AMinusB: return ab_diff_mask;
    case PairSet::BMinusA: return ba_diff_mask;
  }
  fail("invalid-parameter", "unknown pair set");
}

Mask CartanPair::dilate_mask(PairSet s, double r) const {
  require(r >= 0.0, "invalid-parameter", "dilation radius must be nonnegative");
  const auto& d = dist_of(s);
  Mask m(cv.size(), 0);
  if (r == 0.0) return mask_of(s);
  for (int k = 0; k < cv.size(); ++k) m[k] = d[k] < r ? 1 : 0;
  return m;
}

Region CartanPair::region(PairSet s, double r, std::string label) const {
  if (label.empty()) label = "pair-set";
  Region reg = Region::from_mask(cv, dilate_mask(s, r), label);
  return reg;
}

std::vector<Cx> CartanPair::offset_boundary(PairSet s, double r) const {
  const std::vector<Cx>* base = nullptr;
  switch (s) {
    case PairSet::A: base = &a_poly; break;
    case PairSet::B: base = &b_poly; break;
    case PairSet::C: base = &c_poly; break;
    case PairSet::Omega: base = &omega->polyline(); break;
    default: fail("invalid-parameter", "offset boundary defined for Omega, A, B, C");
  }
  if (r == 0.0) return *base;
  return offset_polyline(*base, r, cv.h);
}

std::vector<Cx> offset_polyline(const std::vector<Cx>& poly, double r, double max_gap) {
  require(r > 0.0, "invalid-parameter", "offset radius must be positive");
  const int n = (int)poly.size();
  std::vector<Cx> out;
  out.reserve(2 * n);
  auto normal_of = [](Cx p, Cx q) {
    Cx t = (q - p) / std::abs(q - p);
    return Cx{t.imag(), -t.real()};  // outward for CCW
  };
  double max_angle = std::max(max_gap / r, 0.05);
  for (int k = 0; k < n; ++k) {
    Cx prev = poly[(k + n - 1) % n], cur = poly[k], next = poly[(k + 1) % n];
    Cx n0 = normal_of(prev, cur), n1 = normal_of(cur, next);
    double a0 = std::arg(n0), a1 = std::arg(n1);
    double da = a1 - a0;
    while (da > std::numbers::pi) da -= kTwoPi;
    while (da < -std::numbers::pi) da += kTwoPi;
    out.push_back(cur + r * n0);
    if (da > 1e-12) {
      int fans = (int)std::floor(da / max_angle);
      for (int f = 1; f <= fans; ++f) out.push_back(cur + r * std::polar(1.0, a0 + da * f / (fans + 1)));
    }
  }
  return out;
}

CartanPair make_cartan_pair(const std::shared_ptr<const JordanDomain>& omega, double s1,
                            double s2, double h) {
  require(s1 < s2, "invalid-parameter",
          "strip bounds must satisfy s1 < s2, got s1 = " + fmt("%g", s1) +
              ", s2 = " + fmt("%g", s2));
  require(h > 0.0, "invalid-grid", "pair lattice spacing must be positive");
  require(omega->convex(), "geometry-infeasible",
          "strip pairs are constructed on convex domains only");
  Box bb = omega->bbox();
  require(bb.x0 < s1 - 4 * h && s2 + 4 * h < bb.x1, "not-admissible",
          "strip must cut the domain with margin: need xmin < s1 < s2 < xmax");

  CartanPair P;
  P.omega = omega;
  P.s1 = s1;
  P.s2 = s2;

  // Lattice pads far enough for every dilation the pipeline asks for.
  double pad = 0.35 * std::max(bb.width(), bb.height()) + 16 * h;
  P.cv = Canvas::cover(bb.expanded(pad), h);

  P.omega_mask = rasterize_polygon(P.cv, omega->polyline());
  require(mask_count(P.omega_mask) > 16, "geometry-infeasible", "domain raster is empty");
  P.a_mask.assign(P.cv.size(), 0);
  P.b_mask.assign(P.cv.size(), 0);
  P.ab_diff_mask.assign(P.cv.size(), 0);
  P.ba_diff_mask.assign(P.cv.size(), 0);
  for (int j = 0; j < P.cv.ny; ++j)
    for (int i = 0; i < P.cv.nx; ++i) {
      int k = P.cv.idx(i, j);
      if (!P.omega_mask[k]) continue;
      double x = P.cv.node(i, j).real();
      if (x <= s2) P.a_mask[k] = 1;
      if (x >= s1) P.b_mask[k] = 1;
      if (x <= s1) P.ab_diff_mask[k] = 1;
      if (x >= s2) P.ba_diff_mask[k] = 1;
    }
  P.c_mask = mask_and(P.a_mask, P.b_mask);

  require(mask_count(P.c_mask) > 8, "not-admissible", "overlap C = A cap B is empty");
  require(mask_count(P.ab_diff_mask) > 0 && mask_count(P.ba_diff_mask) > 0, "not-admissible",
          "difference sets A\\B and B\\A must be nonempty");

  P.dist_omega = distance_field(P.cv, P.omega_mask);
  P.dist_a = distance_field(P.cv, P.a_mask);
  P.dist_b = distance_field(P.cv, P.b_mask);
  P.dist_c = distance_field(P.cv, P.c_mask);
  P.dist_ab_diff = distance_field(P.cv, P.ab_diff_mask);
  P.dist_ba_diff = distance_field(P.cv, P.ba_diff_mask);

  // Separation of the closed difference sets, via one distance field.
  double sep = 1e300;
  for (int k = 0; k < P.cv.size(); ++k)
    if (P.ba_diff_mask[k]) sep = std::min(sep, P.dist_ab_diff[k]);
  P.sep = sep;

  double chord_step = std::max(h / 2, 1e-4);
  P.a_poly = clip_polyline_to_strip(*omega, true, s2, chord_step);
  P.b_poly = clip_polyline_to_strip(*omega, false, s1, chord_step);
  P.c_poly = lens_polyline(*omega, s1, s2, chord_step);

  // Admissibility, Definition-style items 1..4 at lattice resolution:
  // (1) C nonempty and A pasted with B recovers the closed domain;
  // (2) the ambient domain family is a valid bounded C^2 family (single
  //     member here: construction invariants of JordanDomain);
  // (3) the difference closures are separated;
  // (4) Hausdorff continuity in the parameter, meaningful for families;
  //     recorded true for a single pair and re-measured by family runs.
  Mask paste = mask_or(P.a_mask, P.b_mask);
  int mismatch = 0;
  Mask ring = mask_minus(P.omega_mask, erode_cells(P.cv, P.omega_mask, 1));
  for (int k = 0; k < P.cv.size(); ++k)
    if (!ring[k] && paste[k] != P.omega_mask[k]) ++mismatch;
  P.adm[0] = mask_count(P.c_mask) > 0 && mismatch == 0;
  P.adm[1] = true;
  P.adm[2] = P.sep > 2 * h && P.sep >= (s2 - s1) - 2 * h;
  P.adm[3] = true;

  require(P.adm[0] && P.adm[2], "not-admissible",
          "pair failed admissibility at lattice resolution");
  return P;
}

}  // namespace holosplit
