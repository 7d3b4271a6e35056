#pragma once

#include <functional>

#include "holosplit/canvas.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/types.hpp"

namespace holosplit {

// (0,1)-form coefficient sampled on a lattice. The support mask marks the
// cells whose coefficient is nonzero; solvers integrate over support only.
struct Form01Sample {
  Canvas cv;
  std::vector<Cx> v;
  Mask support;
  double eps = 0.0;  // dilation radius the support is declared to live in

  static Form01Sample zero(const Canvas& cv);
  // Samples fn over the candidate mask; cells where fn is exactly zero are
  // dropped from the support.
  static Form01Sample from_function(const Canvas& cv, const std::function<Cx(Cx)>& fn,
                                    const Mask& candidate, double eps = 0.0);
  double sup() const;
};

struct DbarSolution {
  Field u;                   // valid exactly on the requested target mask
  double constant = 0.0;     // norm-bound constant in force
  double h = 0.0;            // quadrature resolution
  double residual = -1.0;    // max |dbar u - f| over the residual mask interior
  double f_sup = 0.0;        // sup |f| at solve time
  double u_sup = 0.0;        // sup |u| over the target
  bool norm_bound_ok = false;
  double noise_floor = 0.0;  // roundoff scale of the convolution, see below
};

// Truncation tolerance the lattice answers to: residual checks compare
// against multiples of this.
inline double residual_tolerance(double h) { return 50.0 * h * h; }

// Exact integral of dA(w)/(z - w) over the square cell of side h centered at
// the origin, with delta = z - cell center. Valid for any delta off the cell
// edges; equals h^2/delta + O(h^4/delta^3) far away and 0 at delta = 0.
Cx cell_kernel(Cx delta, double h);

// Solid Cauchy transform (1/pi) * integral of f(w)/(z-w) dA(w), evaluated at
// one point by direct summation: exact cell integrals near z, midpoint rule
// elsewhere.
Cx cauchy_transform(const Form01Sample& f, Cx z);

// Norm-bound constant: 2 * (diam + 2 * tau0), from the polar bound
// (1/pi) * integral over |w-z| <= rho of |w-z|^-1 dA = 2 rho. Depends on the
// domain and the global cap only, never on the per-call epsilon.
double operator_constant(const JordanDomain& omega, double tau0);

// Lattice solve u = (1/pi) conv(f, kernel) over the whole canvas via FFT,
// reported on the target mask. The residual is measured against f on the
// interior of residual_mask (target when null); pass a mask avoiding any
// discontinuity of f, since central differences are meaningless across one.
DbarSolution solve_dbar(const Form01Sample& f, const Mask& target, double constant,
                        const Mask* residual_mask = nullptr);

// Contract form: verifies the support lies in dilate(omega, eps) at lattice
// resolution and eps <= tau0, then solves with operator_constant(omega, tau0).
DbarSolution solve_dbar(const Form01Sample& f, const JordanDomain& omega, double eps,
                        double tau0, const Mask& target, const Mask* residual_mask = nullptr);

}  // namespace holosplit
