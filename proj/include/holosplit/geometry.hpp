#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "holosplit/canvas.hpp"
#include "holosplit/types.hpp"

namespace holosplit {

// Smooth positively oriented Jordan curve with its closed interior.
// Boundary is given parametrically on [0,1); analytic derivatives are
// available, so nearest-point queries can be Newton-refined well past
// polyline resolution.
class JordanDomain {
 public:
  static std::shared_ptr<const JordanDomain> ellipse(double a, double b, Cx center,
                                                     int boundary_points = 1024);
  // Boundary z(t) = sum over (k, c_k) of c_k * exp(2*pi*i*k*t).
  static std::shared_ptr<const JordanDomain> fourier(
      const std::vector<std::pair<int, Cx>>& coeffs, int boundary_points = 1024);

  std::shared_ptr<const JordanDomain> translated(Cx shift) const;

  Cx gamma(double t) const;
  Cx dgamma(double t) const;
  Cx ddgamma(double t) const;

  const std::vector<Cx>& polyline() const { return poly_; }
  bool inside(Cx z) const;  // open interior, crossing test on the polyline

  // Parameter of the (globally) nearest boundary point, polyline-seeded and
  // Newton-refined.
  double nearest_param(Cx z) const;

  Box bbox() const { return bbox_; }
  double diameter() const { return diameter_; }
  double max_curvature() const { return kappa_max_; }
  // Estimated tubular radius on which the signed distance stays C^2.
  double tube_radius() const { return tube_radius_; }
  bool convex() const { return convex_; }
  Cx interior_point() const { return centroid_; }
  double inradius() const { return inradius_; }
  int boundary_points() const { return (int)poly_.size(); }

 private:
  JordanDomain() = default;
  void finalize(int boundary_points);

  std::function<Cx(double)> g_, dg_, ddg_;
  std::vector<Cx> poly_;
  std::vector<double> poly_t_;
  Box bbox_{};
  double diameter_ = 0.0, kappa_max_ = 0.0, tube_radius_ = 0.0;
  double inradius_ = 0.0;
  Cx centroid_{};
  bool convex_ = false;
};

// Signed distance to the domain boundary: negative inside, positive outside.
double signed_distance(const JordanDomain& omega, Cx z);

// Point set with a membership predicate and (optionally) a sample grid of
// recorded spacing. All "for all points" checks in the library are grid
// checks against such samples, with slack of order h.
struct Region {
  std::function<bool(Cx)> contains;
  std::vector<Cx> samples;
  double h = 0.0;
  Box bbox{};
  std::string label;

  static Region from_points(std::vector<Cx> pts, std::string label = "points");
  static Region from_domain(const std::shared_ptr<const JordanDomain>& omega, double h,
                            std::string label = "domain");
  static Region boundary_of(const JordanDomain& omega, std::string label = "boundary");
  static Region from_mask(const Canvas& cv, const Mask& m, std::string label = "mask");
};

// Open r-neighborhood M(r) = { z : dist(z, M) < r }. Membership and samples
// are grid-accurate to within one cell of the working lattice.
Region dilate(const Region& m, double r);

// Max-min Hausdorff distance over the two sample sets.
double hausdorff_distance(const Region& k, const Region& l);

// Real function on the plane whose negative set is a domain dilation.
// `far_const` is an optional fast path: when it returns true the function is
// locally constant near z with the reported value (used to keep C^2-norm
// sweeps over large balls affordable).
struct DefiningFunction {
  std::function<double(Cx)> f;
  std::function<bool(Cx, double*)> far_const;
  std::shared_ptr<const JordanDomain> source;
  double tau = 0.0, mu = 0.0, A = 0.0;
  std::string note;

  double operator()(Cx z) const { return f(z); }
};

// Weighted-series C^2 distance between two defining functions: terms
// 2^{-j} * |r2-r1|_{C^2(B_j)} / (|r2-r1|_{C^2(B_j)} + 1) over closed balls
// B_j of radius j around 0, truncated at J. Norms are grid sups of value and
// central-difference first/second partials.
double c2_metric(const DefiningFunction& r1, const DefiningFunction& r2, int truncation = 40,
                 double spacing = 0.05, double fd_step = 1e-4);

// Profile-based defining function for the dilation Omega(tau): the value is
// -exp(A*tau) + 1 + psi(signed_distance), with psi exactly exponential on
// [-4mu, 4mu], strictly increasing through [4mu, 5mu], constant outside
// [-6mu, 6mu], and globally bounded between exp(-7A mu)-1 and exp(7A mu)-1.
DefiningFunction build_defining_function(const std::shared_ptr<const JordanDomain>& omega,
                                         double tau, double mu, double A);

// Exposed for tests: the warped profile used by build_defining_function.
double defining_profile(double t, double mu, double A);

enum class PairSet { Omega, A, B, C, AMinusB, BMinusA };

// Vertical-strip Cartan pair on a convex domain:
//   A = closure(Omega cap {Re z < s2}),  B = closure(Omega cap {Re z > s1}),
// with s1 < s2, C = A cap B. Carries a shared lattice with rasterized masks
// and Euclidean distance fields for every derived set, plus analytic
// boundary polylines for contour work.
struct CartanPair {
  std::shared_ptr<const JordanDomain> omega;
  double s1 = 0.0, s2 = 0.0;
  double sep = 0.0;  // measured distance between closure(A\B) and closure(B\A)
  bool adm[4] = {false, false, false, false};

  Canvas cv;
  Mask omega_mask, a_mask, b_mask, c_mask, ab_diff_mask, ba_diff_mask;
  std::vector<double> dist_omega, dist_a, dist_b, dist_c, dist_ab_diff, dist_ba_diff;

  std::vector<Cx> a_poly, b_poly, c_poly;

  const std::vector<double>& dist_of(PairSet s) const;
  const Mask& mask_of(PairSet s) const;

  // Lattice mask of the open r-dilation (r >= 0; r = 0 gives the set itself).
  Mask dilate_mask(PairSet s, double r) const;
  Region region(PairSet s, double r, std::string label = "") const;

  // Closed offset contour of the r-dilation, built from the analytic boundary
  // polyline with corner fans (no raster staircase).
  std::vector<Cx> offset_boundary(PairSet s, double r) const;
};

CartanPair make_cartan_pair(const std::shared_ptr<const JordanDomain>& omega, double s1,
                            double s2, double h = 1.0 / 128.0);

// Offset of a convex closed CCW polyline by r > 0, inserting corner fans so
// consecutive points stay within max_gap of each other.
std::vector<Cx> offset_polyline(const std::vector<Cx>& poly, double r, double max_gap);

}  // namespace holosplit
