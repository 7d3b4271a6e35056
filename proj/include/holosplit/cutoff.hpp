#pragma once

#include "holosplit/geometry.hpp"
#include "holosplit/types.hpp"

namespace holosplit {

// Smooth cutoff separating the two pasting sides of a Cartan pair. For
// vertical-strip pairs the separating geometry is one-dimensional, so chi
// depends on Re z only: identically 1 left of the transition interval
// [l, r], identically 0 right of it, quintic smoothstep in between.
struct Cutoff {
  double s1 = 0.0, s2 = 0.0;      // pasting abscissas of the pair
  double l = 0.0, r = 0.0;        // transition interval in Re z
  double tau_margin = 0.0;        // guaranteed dilation margin around both sides
  double sup_dbar = 0.0;          // analytic sup |dbar chi| = 15/(16 (r-l))
  const char* profile_name = "quintic-smoothstep";

  double width() const { return r - l; }
  // C^2 profile on the real line: 1 for x <= l, 0 for x >= r, values in [0,1].
  double profile(double x) const;
  double profile_slope(double x) const;
  double chi(Cx z) const { return profile(z.real()); }
  // dbar of an x-only function is half its slope.
  Cx dbar_chi(Cx z) const { return Cx{0.5 * profile_slope(z.real()), 0.0}; }
};

// Margin precondition: tau_margin <= (s2-s1)/128, keeping the 64-fold
// separation between the dilated sides with room to spare. tau_margin = 0
// selects the default (s2-s1)/256. Grid posts checked at build time: the
// dilate(A,t) & dilate(B,t) = dilate(C,t) identity for t <= tau_margin, and
// chi pinned to 1/0 on the tau_margin-dilations of the two difference sets.
Cutoff build_cutoff(const CartanPair& pair, double tau_margin = 0.0);

// Analytic sup |dbar chi| from the profile; grid maxima of central
// differences approach it at O(h^2).
double dbar_chi_sup(const Cutoff& c);

}  // namespace holosplit
