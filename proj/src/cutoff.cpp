#include "holosplit/cutoff.hpp"

#include <cmath>

#include "holosplit/error.hpp"

namespace holosplit {

double Cutoff::profile(double x) const {
  if (x <= l) return 1.0;
  if (x >= r) return 0.0;
  double s = (x - l) / (r - l);
  double q = s * s * s * (s * (6 * s - 15) + 10);
  return 1.0 - q;
}

double Cutoff::profile_slope(double x) const {
  if (x <= l || x >= r) return 0.0;
  double s = (x - l) / (r - l);
  return -30.0 * s * s * (1 - s) * (1 - s) / (r - l);
}

double dbar_chi_sup(const Cutoff& c) {
  // |chi'| peaks at midspan: (15/8)/width, halved by dbar on an x-only function
  return 15.0 / (16.0 * c.width());
}

Cutoff build_cutoff(const CartanPair& pair, double tau_margin) {
  double gap = pair.s2 - pair.s1;
  if (tau_margin == 0.0) tau_margin = gap / 256;
  require(tau_margin > 0, "invalid-parameter", "cutoff margin must be positive");
  require(tau_margin <= gap / 128 * (1 + 1e-12), "invalid-parameter",
          "cutoff margin " + fmt("%.6g", tau_margin) +
              " breaks the 64-fold separation: the gap between the pasting sides is " +
              fmt("%.6g", gap) + ", so the margin may not exceed " + fmt("%.6g", gap / 128));

  Cutoff c;
  c.s1 = pair.s1;
  c.s2 = pair.s2;
  c.tau_margin = tau_margin;
  // strict margins: the transition sits one extra margin inside each dilation
  c.l = pair.s1 + 2 * tau_margin;
  c.r = pair.s2 - 2 * tau_margin;
  c.sup_dbar = dbar_chi_sup(c);

  // grid post: dilations of the intersection stay the intersection of the
  // dilations for every margin-sized radius
  for (double t : {tau_margin, tau_margin / 2, tau_margin / 4}) {
    Mask ab = mask_and(pair.dilate_mask(PairSet::A, t), pair.dilate_mask(PairSet::B, t));
    require(ab == pair.dilate_mask(PairSet::C, t), "precondition-violation",
            "pair dilations do not intersect to the dilated overlap on the lattice");
  }

  // grid post: chi pinned on the margin-dilated difference sets
  const Canvas& cv = pair.cv;
  const std::vector<double>& da = pair.dist_of(PairSet::AMinusB);
  const std::vector<double>& db = pair.dist_of(PairSet::BMinusA);
  for (int k = 0; k < cv.size(); ++k) {
    Cx z = cv.node(k);
    if (da[k] < tau_margin)
      require(c.chi(z) == 1.0, "precondition-violation", "cutoff not pinned to 1 near A\\B");
    if (db[k] < tau_margin)
      require(c.chi(z) == 0.0, "precondition-violation", "cutoff not pinned to 0 near B\\A");
  }
  return c;
}

}  // namespace holosplit
