#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "holosplit/canvas.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/types.hpp"

namespace holosplit {

enum class MapRep { Identity, Poly, Grid, Composite, Inverse, Callable };

// Holomorphic map near the identity. The stored object is always the
// difference c = map - Id, never the map itself: compositions, inversions,
// and norms are computed in difference space, so quantities of size 1e-12
// never pass through a subtraction of two O(1) values.
class HoloMap {
 public:
  HoloMap() = default;

  static HoloMap identity(Region domain);
  // Coefficients of the map itself, sum c_k z^k (serialized form). The
  // identity part is removed exactly before storing.
  static HoloMap polynomial(const std::vector<Cx>& map_coeffs, Region domain);
  // Coefficients of the difference c = map - Id directly.
  static HoloMap perturbation(const std::vector<Cx>& diff_coeffs, Region domain);
  // Difference sampled on a lattice, bicubic interpolation between nodes.
  static HoloMap from_grid(Field diff, Region domain, std::string note = "grid");
  static HoloMap callable(std::function<Cx(Cx)> diff, Region domain, std::string note = "fn");

  Cx diff(Cx z) const;  // map(z) - z
  Cx eval(Cx z) const { return z + diff(z); }
  bool evaluable(Cx z) const;

  MapRep rep() const;
  int degree() const;                          // -1 unless polynomial
  const std::vector<Cx>& coefficients() const;  // difference coefficients
  const Region& domain() const;
  double domain_norm() const;  // cached sup |map - Id| over domain samples
  const std::string& note() const;
  bool valid() const { return impl_ != nullptr; }

  struct Impl;

 private:
  explicit HoloMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend HoloMap compose(const HoloMap&, const HoloMap&, const Region&);
  friend HoloMap invert_near_identity(const HoloMap&, const Region&, double, double);
  friend HoloMap invert_near_identity_on(const HoloMap&, const Region&, const Region&, double);
};

// Pointwise composite g(f(z)) with the stated domain. Checks that f maps
// every domain sample into g's evaluable set.
HoloMap compose(const HoloMap& g, const HoloMap& f, const Region& domain);

// Max of |f| over the region's sample grid.
double sup_norm(const std::function<Cx(Cx)>& f, const Region& r);
double sup_norm(const HoloMap& f, const Region& r);  // values of the map itself
double diff_norm(const HoloMap& f, const Region& r);  // values of map - Id

struct LipschitzCheck {
  double bound = 0.0;   // const1 * (sup|F| on V / d) * |y - x|, const1 = 1
  double actual = 0.0;  // |F(y) - F(x)|
  bool satisfied = false;
};
// Cauchy-estimate Lipschitz bound for holomorphic F on V, valid when the
// d-dilation of the segment [x, y] stays inside V (grid-checked).
LipschitzCheck lipschitz_bound(const std::function<Cx(Cx)>& F, const Region& V, double d, Cx x,
                               Cx y);
LipschitzCheck lipschitz_bound(const HoloMap& F, const Region& V, double d, Cx x, Cx y);

struct InjectivityCertificate {
  bool certified = false;
  double K = 0.25;        // derived margin constant for one variable
  double norm = 0.0;      // measured sup |map - Id| on the r-dilation
  double allowance = 0.0;  // K * r
};
// Certifies injectivity of phi = Id + c on D from a smallness bound for c on
// the r-dilation of D: if sup |c| <= r/4 there, |c'| <= 1/2 on D by the
// Cauchy estimate, and z + c(z) cannot collide.
InjectivityCertificate injectivity_margin(const HoloMap& phi, const Region& d_region, double r);
// Same certificate with the dilated region supplied by the caller.
InjectivityCertificate injectivity_margin_on(const HoloMap& phi, const Region& dilated,
                                             double r);

// Inverse of a near-identity map: returns psi on dilate(D, delta - eps) with
// phi(psi(w)) = w to fixed-point tolerance 1e-13, given
// sup |phi - Id| < eps < delta on dilate(D, delta).
HoloMap invert_near_identity(const HoloMap& phi, const Region& d_region, double delta,
                             double eps);

// Same inverse with the sweep geometry supplied by the caller: phi must be
// near-identity on big (checked against eps), the result is sealed on domain.
// The caller guarantees the eps-fattening of domain sits inside big; use this
// when both regions come from pair masks and the generic dilation would
// re-rasterize finer than the margin affords.
HoloMap invert_near_identity_on(const HoloMap& phi, const Region& big, const Region& domain,
                                double eps);

// Winding number of phi(contour) - w by accumulated argument, refining the
// contour adaptively whenever a step turns by more than pi/2. Equals the
// preimage count of w inside the contour, with multiplicity.
int preimage_count(const std::function<Cx(Cx)>& phi, const std::vector<Cx>& contour, Cx w);
int preimage_count(const HoloMap& phi, const std::vector<Cx>& contour, Cx w);

// Max over interior lattice points (all four neighbors valid) of the
// central-difference Wirtinger derivative |(d/dx + i d/dy) f / 2|.
double dbar_residual(const Field& f);

// Samples of the map (map_values = true) or of the difference map - Id
// over the masked nodes; valid exactly on the mask.
Field materialize(const HoloMap& f, const Canvas& cv, const Mask& m, bool map_values = false);

}  // namespace holosplit
