#include "holosplit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "holosplit/error.hpp"

namespace holosplit {

namespace {

// A mask that reaches the canvas border has been clipped, so every measure
// taken on it would silently lie.
void require_inside_canvas(const Canvas& cv, const Mask& m, const char* what) {
  for (int i = 0; i < cv.nx; ++i)
    require(!m[cv.idx(i, 0)] && !m[cv.idx(i, cv.ny - 1)], "invalid-parameter",
            std::string(what) + " leaves the working canvas; shrink the pad or the radii");
  for (int j = 0; j < cv.ny; ++j)
    require(!m[cv.idx(0, j)] && !m[cv.idx(cv.nx - 1, j)], "invalid-parameter",
            std::string(what) + " leaves the working canvas; shrink the pad or the radii");
}

void require_matching_cutoff(const Cutoff& chi, const CartanPair& pair) {
  require(std::abs(chi.s1 - pair.s1) <= 1e-12 && std::abs(chi.s2 - pair.s2) <= 1e-12,
          "invalid-parameter",
          "cutoff transition [" + fmt("%g", chi.l) + ", " + fmt("%g", chi.r) +
              "] was built for another strip; the zero extension of (dbar chi) c is smooth "
              "only when the transition clears this pair's lens caps");
}

// Rethrows domain escapes from a composition stage under the kind the step
// contract promises, naming the stage.
template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (std::string(e.kind()) == "domain-violation")
      fail("geometry-error", std::string(name) + ": " + e.what());
    throw;
  }
}

}  // namespace

AdditiveSplit split_additive(const HoloMap& c, const CartanPair& pair, double tau1, double tau2,
                             const Cutoff& chi, double tau0, double pad) {
  require(c.valid(), "invalid-input", "splitting needs a constructed map");
  require(tau1 > 0.0 && tau1 < tau2, "invalid-parameter",
          "need 0 < tau1 < tau2, got tau1 = " + fmt("%g", tau1) + ", tau2 = " + fmt("%g", tau2));
  require(tau2 <= tau0 * (1.0 + 1e-12), "invalid-parameter",
          "tau2 = " + fmt("%g", tau2) + " exceeds the global cap tau0 = " + fmt("%g", tau0));
  require(pad >= 0.0, "invalid-parameter", "pad must be nonnegative");
  require_matching_cutoff(chi, pair);

  const Canvas& cv = pair.cv;
  const double h = cv.h;
  const auto& dist_c = pair.dist_of(PairSet::C);

  // Grid real estate: the lens sampling of c reaches one stencil beyond the
  // side fields so their strip-zone values always have a source.
  Mask fc_mask = pair.dilate_mask(PairSet::C, tau2 + 5.5 * h + pad);
  Mask a_mask = pair.dilate_mask(PairSet::A, tau1 + 4.5 * h + pad);
  Mask b_mask = pair.dilate_mask(PairSet::B, tau1 + 4.5 * h + pad);
  require_inside_canvas(cv, a_mask, "the A-side margin");
  require_inside_canvas(cv, b_mask, "the B-side margin");
  require_inside_canvas(cv, fc_mask, "the lens sampling margin");

  Field fc = materialize(c, cv, fc_mask);
  double c_norm = fc.sup_on(pair.dilate_mask(PairSet::C, tau2));
  double holo_tol = residual_tolerance(h) * std::max(1.0, c_norm);
  double res_c = dbar_residual(fc);
  require(res_c <= holo_tol, "not-holomorphic",
          "dbar residual of the input is " + fmt("%.3e", res_c) + " on the lens grid, above " +
              fmt("%.3e", holo_tol));

  // f = (dbar chi) c on dilate(C, tau2), extended by zero. The extension is
  // smooth because the transition clears the lens caps (checked above); the
  // top and bottom of the support ring lie outside the open set and only the
  // residual mask must stay clear of them.
  Form01Sample f;
  f.cv = cv;
  f.v.assign(cv.size(), Cx{0.0, 0.0});
  f.support.assign(cv.size(), 0);
  f.eps = tau2;
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i) {
      int k = cv.idx(i, j);
      if (!(dist_c[k] < tau2)) continue;
      double s = chi.profile_slope(cv.x0 + i * h);
      if (s == 0.0) continue;
      Cx val = 0.5 * s * fc.v[k];
      if (val == Cx{0.0, 0.0}) continue;
      f.v[k] = val;
      f.support[k] = 1;
    }

  Mask target(cv.size(), 1);
  Mask rmask = erode_cells(cv, pair.dilate_mask(PairSet::C, tau2), 3);
  DbarSolution g = solve_dbar(f, target, operator_constant(*pair.omega, tau0), &rmask);

  // Side pieces in difference space: the g values cancel exactly in b - a,
  // so the additive identity holds to roundoff.
  Field fa(cv), fb(cv);
  for (int j = 0; j < cv.ny; ++j)
    for (int i = 0; i < cv.nx; ++i) {
      int k = cv.idx(i, j);
      bool ina = a_mask[k] != 0, inb = b_mask[k] != 0;
      if (!ina && !inb) continue;
      double p = chi.profile(cv.x0 + i * h);
      Cx cval{0.0, 0.0};
      if ((ina && p != 1.0) || (inb && p != 0.0)) {
        require(fc.valid[k] != 0, "geometry-error",
                "lens sampling misses strip node " + fmt_cx(cv.node(i, j)) +
                    "; the pasting strip runs too close to a lens cap");
        cval = fc.v[k];
      }
      Cx mg = -g.u.v[k];
      if (ina) {
        fa.v[k] = mg + (p - 1.0) * cval;
        fa.valid[k] = 1;
      }
      if (inb) {
        fb.v[k] = mg + p * cval;
        fb.valid[k] = 1;
      }
    }

  AdditiveSplit out;
  out.c_norm = c_norm;
  out.m3 = 1.0 + g.constant * chi.sup_dbar;
  out.bound = out.m3 * c_norm;
  out.holo_tolerance = holo_tol;
  out.dbar_a = dbar_residual(fa);
  out.dbar_b = dbar_residual(fb);

  Mask cmask1 = pair.dilate_mask(PairSet::C, tau1);
  double ident = 0.0;
  for (int k = 0; k < cv.size(); ++k)
    if (cmask1[k]) ident = std::max(ident, std::abs(fc.v[k] - (fb.v[k] - fa.v[k])));
  out.identity_residual = ident;

  out.a = HoloMap::from_grid(std::move(fa), pair.region(PairSet::A, tau1, "A side"), "E(c)");
  out.b = HoloMap::from_grid(std::move(fb), pair.region(PairSet::B, tau1, "B side"), "Z(c)");
  out.a_norm = out.a.domain_norm();
  out.b_norm = out.b.domain_norm();
  out.norm_ok = out.a_norm <= out.bound * (1.0 + 1e-9) + 1e-300 &&
                out.b_norm <= out.bound * (1.0 + 1e-9) + 1e-300;
  out.g = std::move(g);
  return out;
}

StepResult split_step(const HoloMap& gamma, const CartanPair& pair, double tau, double r,
                      const Constants& consts, double pad) {
  require(gamma.valid(), "invalid-input", "step needs a constructed map");
  require(tau > 0.0 && r > 0.0, "invalid-parameter", "need positive tau and r");
  require(consts.M3 > 0.0 && consts.M4 > 0.0 && consts.M5 > 0.0, "invalid-parameter",
          "constant chain not built");
  const Canvas& cv = pair.cv;
  const double h = cv.h;
  const double tau1 = tau + 0.5 * r, tau2 = tau + r;

  // Thinned probe of the input size; only the margins depend on it.
  double probe = 0.0;
  {
    const auto& dc = pair.dist_of(PairSet::C);
    for (int j = 0; j < cv.ny; j += 2)
      for (int i = 0; i < cv.nx; i += 2) {
        int k = cv.idx(i, j);
        if (dc[k] < tau2) probe = std::max(probe, std::abs(gamma.diff(cv.node(i, j))));
      }
  }
  if (pad < 0.0) pad = 10.0 * h + 6.0 * (consts.M3 + 1.0) * probe;

  AdditiveSplit split =
      split_additive(gamma, pair, tau1, tau2, consts.chi, consts.tau0, pad);

  StepResult sr;
  sr.eps_in = split.c_norm;
  double thr = r / (16.0 * consts.M4);
  sr.hypothesis_ok = sr.eps_in < thr;
  if (consts.certified)
    require(sr.hypothesis_ok, "threshold-error",
            "certified step needs sup |gamma - Id| = " + fmt("%.3e", sr.eps_in) +
                " < r/(16 M4) = " + fmt("%.3e", thr));
  else
    require(sr.eps_in < consts.practical_cap, "threshold-error",
            "sup |gamma - Id| = " + fmt("%.3e", sr.eps_in) + " exceeds the practical cap " +
                fmt("%.3e", consts.practical_cap));

  sr.alpha = split.a;
  sr.beta = split.b;
  sr.alpha_norm = split.a_norm;
  sr.beta_norm = split.b_norm;
  sr.norm_bound = consts.M3 * sr.eps_in;
  sr.solve_residual = split.g.residual;
  sr.identity_residual = split.identity_residual;
  sr.noise_floor = split.g.noise_floor;

  // Injectivity on dilate(., tau + r/4): allowance 4.4 norm + 2h keeps the
  // margin test meaningful (norm <= allowance/4 has 10% headroom) while the
  // sweep stays on the sampled estate.
  double ralw_a = 4.4 * split.a_norm + 2.0 * h;
  double ralw_b = 4.4 * split.b_norm + 2.0 * h;
  sr.inj_alpha = injectivity_margin_on(
      split.a, pair.region(PairSet::A, tau + 0.25 * r + ralw_a, "A margin"), ralw_a);
  sr.inj_beta = injectivity_margin_on(
      split.b, pair.region(PairSet::B, tau + 0.25 * r + ralw_b, "B margin"), ralw_b);
  if (consts.certified)
    require(sr.inj_alpha.certified && sr.inj_beta.certified, "threshold-error",
            "injectivity margin not certified at dilation tau + r/4");

  // Inversion geometry: gamma_next lives on dilate(C, tau + r/8 + pg); the
  // inverse domain is fattened by the measured forward excursions so the
  // outer evaluations cannot leave it, and the sweep region by eps_inv more
  // so the fixed point iterates stay certified.
  double exc = sr.eps_in + split.a_norm + split.b_norm;
  double pg = pad - 2.0 * h - 3.0 * exc;
  require(pg > 0.0, "invalid-parameter",
          "pad " + fmt("%g", pad) + " too small for the measured input size");
  Region dg = pair.region(PairSet::C, tau + 0.125 * r + pg, "step lens");
  Region dinv =
      pair.region(PairSet::C, tau + 0.125 * r + pg + exc + h, "inverse domain");
  // The sweep margin must dominate |b - Id| on the sweep region itself, which
  // reaches pg beyond the dilation where b_norm was measured; grow it until
  // the measured sup stabilizes under the 1.25 safety factor.
  double eps_inv = 1.25 * split.b_norm + 1e-14;
  Region dbig;
  bool settled = false;
  for (int pass = 0; pass < 8 && !settled; ++pass) {
    Region sweep = pair.region(PairSet::C, tau + 0.125 * r + pg + exc + eps_inv + 2.0 * h,
                               "inverse sweep");
    double nb = stage("measuring the B-side map on the inverse sweep",
                      [&] { return diff_norm(split.b, sweep); });
    double need = 1.25 * nb + 1e-14;
    if (need <= eps_inv) {
      dbig = std::move(sweep);
      settled = true;
    } else {
      eps_inv = need;
    }
  }
  require(settled, "numerical-failure", "inverse sweep margin did not stabilize");

  HoloMap beta_inv = stage("inverting the B-side map", [&] {
    return invert_near_identity_on(split.b, dbig, dinv, eps_inv);
  });
  HoloMap forward = stage("composing gamma after the A-side map", [&] {
    return compose(gamma, split.a, dg);
  });
  sr.gamma_next = stage("pulling the composition back through the B side", [&] {
    return compose(beta_inv, forward, dg);
  });

  sr.eps_out = diff_norm(sr.gamma_next, pair.region(PairSet::C, tau + 0.125 * r, "lens"));
  sr.bound = consts.M5 / r * sr.eps_in * sr.eps_in;
  sr.ratio = sr.eps_out / std::max(sr.eps_in * sr.eps_in, 1e-300);
  sr.contraction_ok = sr.eps_out <= sr.bound + 1e-18;
  if (consts.certified)
    require(sr.contraction_ok, "numerical-failure",
            "contraction bound violated: eps_out = " + fmt("%.3e", sr.eps_out) + " > " +
                fmt("%.3e", sr.bound));
  return sr;
}

double calibrate_m2(const CartanPair& pair, double tau1, unsigned seed, int trials) {
  require(tau1 > 0.0, "invalid-parameter", "tau1 must be positive");
  require(trials > 0, "invalid-parameter", "calibration needs at least one trial");
  const double eps = 1e-3, delta = 0.05;

  Region rc = pair.region(PairSet::C, tau1, "calib C");
  Region rc_mid = pair.region(PairSet::C, tau1 + 0.5 * delta, "calib mid");
  Region rc_big = pair.region(PairSet::C, tau1 + delta, "calib wide");
  Region ra = pair.region(PairSet::A, tau1 + delta, "calib A");
  Region rb = pair.region(PairSet::B, tau1 + delta, "calib B");

  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto pert = [&](const Region& dom) {
    std::vector<Cx> cf(5);
    for (int k = 0; k < 5; ++k) cf[k] = k == 1 ? Cx{0.0, 0.0} : Cx{d(g), d(g)};
    HoloMap raw = HoloMap::perturbation(cf, dom);
    double nrm = raw.domain_norm();
    for (auto& z : cf) z *= eps / nrm;
    return HoloMap::perturbation(cf, dom);
  };

  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    HoloMap al = pert(ra), be = pert(rb), ga = pert(rc_big);
    HoloMap be_inv = invert_near_identity_on(be, rb, rc_mid, 1.25 * eps);
    HoloMap gt = compose(be_inv, compose(ga, al, rc), rc);
    double m = 0.0;
    for (auto& z : rc.samples)
      m = std::max(m, std::abs(gt.diff(z) - (ga.diff(z) + al.diff(z) - be.diff(z))));
    worst = std::max(worst, m);
  }
  return std::max(1.0, 2.0 * worst * delta / (eps * eps));
}

}  // namespace holosplit
