#pragma once

#include "holosplit/cutoff.hpp"
#include "holosplit/dbar.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"
#include "holosplit/iteration.hpp"

namespace holosplit {

// Additive splitting of a difference c across the lens: holomorphic pieces
// with c = b - a, a on the A side, b on the B side, both bounded by M3 ||c||.
// The maps carry the pieces as differences, so a is also the map Id + E(c).
struct AdditiveSplit {
  HoloMap a;  // E(c) = -g + (chi - 1) c, sealed on dilate(A, tau1)
  HoloMap b;  // Z(c) = -g + chi c, sealed on dilate(B, tau1)
  DbarSolution g;
  double c_norm = 0.0;  // sup |c - Id| over the dilate(C, tau2) grid
  double a_norm = 0.0, b_norm = 0.0;
  double m3 = 0.0;     // 1 + C sup |dbar chi|
  double bound = 0.0;  // m3 * c_norm
  bool norm_ok = false;
  double identity_residual = 0.0;  // sup |c - (b - a)| over the dilate(C, tau1) grid
  double dbar_a = 0.0, dbar_b = 0.0;  // measured dbar residuals of the pieces
  double holo_tolerance = 0.0;        // threshold those residuals answer to
};

// Splits c with the strip cutoff chi: f = (dbar chi) c extended by zero,
// g the transform of f, then a and b as above. Requires 0 < tau1 < tau2 <=
// tau0, c holomorphic and bounded on dilate(C, tau2), and chi built for this
// pair's strip. pad adds world units of grid margin to every working mask
// beyond the defaults; c must evaluate on the padded lens grid.
AdditiveSplit split_additive(const HoloMap& c, const CartanPair& pair, double tau1, double tau2,
                             const Cutoff& chi, double tau0 = 0.2, double pad = 0.0);

// One compression step at scale (tau, r): gamma = beta o gamma_next o
// alpha^{-1} with gamma_next closer to the identity by the factor
// (M5 / r) eps_in.
struct StepResult {
  HoloMap alpha;       // Id + E(c) on dilate(A, tau + r/2)
  HoloMap beta;        // Id + Z(c) on dilate(B, tau + r/2)
  HoloMap gamma_next;  // beta^{-1} o gamma o alpha on dilate(C, tau + r/8)
  double eps_in = 0.0;   // sup |gamma - Id| over dilate(C, tau + r)
  double eps_out = 0.0;  // sup |gamma_next - Id| over dilate(C, tau + r/8)
  double bound = 0.0;    // (M5 / r) eps_in^2
  double ratio = 0.0;    // eps_out / eps_in^2 as measured
  bool contraction_ok = false;  // eps_out <= bound
  bool hypothesis_ok = false;   // eps_in < r / (16 M4)
  double alpha_norm = 0.0, beta_norm = 0.0;
  double norm_bound = 0.0;  // M3 eps_in, dominates both piece norms
  InjectivityCertificate inj_alpha, inj_beta;
  double solve_residual = 0.0;
  double identity_residual = 0.0;
  double noise_floor = 0.0;
};

// Runs the one-step lemma. In certified mode the hypothesis
// eps_in < r / (16 M4) and both injectivity certificates are mandatory;
// otherwise eps_in must stay under consts.practical_cap and the certificate
// outcomes are recorded. pad < 0 picks a margin from eps_in and the grid.
StepResult split_step(const HoloMap& gamma, const CartanPair& pair, double tau, double r,
                      const Constants& consts, double pad = -1.0);

// Measured composition constant: 2 * max over seeded random near-identity
// triples (alpha, beta, gamma) of ||c~ - (c + a - b)|| delta / eps^2, floored
// at 1. The scenario fixes eps = 1e-3 and delta = 0.05 at scale tau1.
double calibrate_m2(const CartanPair& pair, double tau1, unsigned seed = 42, int trials = 100);

}  // namespace holosplit
