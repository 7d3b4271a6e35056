#include "holosplit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "holosplit/cutoff.hpp"
#include "holosplit/dbar.hpp"
#include "holosplit/error.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"
#include "holosplit/iteration.hpp"
#include "holosplit/splitting.hpp"

namespace holosplit {

namespace {

struct Recorder {
  std::vector<VerifyCheck>& out;
  std::string suite;
  void add(const std::string& name, bool ok, const std::string& detail) {
    out.push_back({suite, name, ok, detail});
  }
};

const CartanPair& disc_pair() {
  static CartanPair pair =
      make_cartan_pair(JordanDomain::ellipse(1.0, 1.0, Cx{0.0, 0.0}, 1024), -0.3, 0.3,
                       1.0 / 128.0);
  return pair;
}

const Cutoff& disc_cutoff() {
  static Cutoff chi = build_cutoff(disc_pair());
  return chi;
}

void verify_geometry(Recorder r) {
  const CartanPair& pair = disc_pair();
  bool adm = pair.adm[0] && pair.adm[1] && pair.adm[2] && pair.adm[3];
  r.add("pair-admissible", adm, adm ? "all four posts hold" : "an admissibility post failed");

  Region small = pair.region(PairSet::C, 0.05, "inner");
  Region big = pair.region(PairSet::C, 0.10, "outer");
  bool nested = small.samples.size() < big.samples.size();
  for (const Cx& z : small.samples) nested = nested && big.contains(z);
  r.add("dilation-monotone", nested,
        std::to_string(small.samples.size()) + " nodes inside " +
            std::to_string(big.samples.size()));

  double sym = std::abs(hausdorff_distance(small, big) - hausdorff_distance(big, small));
  double self = hausdorff_distance(small, small);
  r.add("hausdorff-metric", sym <= 1e-12 && self == 0.0,
        "symmetry gap " + fmt("%.2e", sym) + ", self distance " + fmt("%.2e", self));

  double inside = signed_distance(*pair.omega, Cx{0.0, 0.0});
  double outside = signed_distance(*pair.omega, Cx{3.0, 0.0});
  r.add("signed-distance-sign", inside < 0.0 && outside > 0.0,
        "center " + fmt("%.3f", inside) + ", exterior " + fmt("%.3f", outside));
}

void verify_holo(Recorder r) {
  Region dom = disc_pair().region(PairSet::C, 0.1, "probe");
  HoloMap f = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{5e-3, 1e-3}}, dom);
  HoloMap g = HoloMap::perturbation({Cx{1e-3, 0}, Cx{0, 0}, Cx{0, 2e-3}}, dom);
  HoloMap h = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{0, 0}, Cx{3e-3, 0}}, dom);

  HoloMap left = compose(compose(f, g, dom), h, dom);
  HoloMap right = compose(f, compose(g, h, dom), dom);
  double assoc = 0.0;
  for (const Cx& z : dom.samples) assoc = std::max(assoc, std::abs(left.diff(z) - right.diff(z)));
  r.add("composition-associative", assoc <= 1e-13, "gap " + fmt("%.2e", assoc));

  HoloMap id = HoloMap::identity(dom);
  double neutral = 0.0;
  HoloMap fid = compose(f, id, dom);
  for (const Cx& z : dom.samples) neutral = std::max(neutral, std::abs(fid.diff(z) - f.diff(z)));
  r.add("identity-neutral", neutral == 0.0, "gap " + fmt("%.2e", neutral));

  Region big = disc_pair().region(PairSet::C, 0.15, "inverse-big");
  HoloMap phi = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{1e-2, 0}}, big);
  HoloMap inv = invert_near_identity_on(phi, big, dom, 2e-2);
  double round = 0.0;
  for (const Cx& z : dom.samples) {
    Cx w = z + inv.diff(z);
    round = std::max(round, std::abs(w + phi.diff(w) - z));
  }
  r.add("inverse-roundtrip", round <= 1e-10, "sup |phi(inv z) - z| = " + fmt("%.2e", round));
}

void verify_dbar(Recorder r) {
  auto omega = JordanDomain::ellipse(1.0, 1.0, Cx{0.0, 0.0}, 512);
  double constant = operator_constant(*omega, 0.2);
  auto bump = [](Cx z) -> Cx {
    double q = std::norm(z) / 0.25;
    if (q >= 1.0) return Cx{0.0, 0.0};
    double s = std::exp(1.0 - 1.0 / (1.0 - q));
    return s * (std::conj(z) * std::conj(z) + Cx{0.3, 0.1});
  };

  double res[2] = {0.0, 0.0}, hs[2] = {1.0 / 64.0, 1.0 / 128.0};
  bool bound_ok = true;
  for (int t = 0; t < 2; ++t) {
    Canvas cv = Canvas::cover(Box{-1.2, -1.2, 1.2, 1.2}, hs[t]);
    Mask cand(cv.size(), 0);
    Mask rmask(cv.size(), 0);
    for (int j = 0; j < cv.ny; ++j)
      for (int i = 0; i < cv.nx; ++i) {
        Cx z = cv.node(i, j);
        cand[cv.idx(i, j)] = std::abs(z) < 0.55 ? 1 : 0;
        rmask[cv.idx(i, j)] = std::abs(z) < 0.45 ? 1 : 0;
      }
    Form01Sample f = Form01Sample::from_function(cv, bump, cand, 0.0);
    Mask target(cv.size(), 1);
    DbarSolution sol = solve_dbar(f, target, constant, &rmask);
    res[t] = sol.residual;
    bound_ok = bound_ok && sol.norm_bound_ok;
  }
  double slope = std::log(res[0] / res[1]) / std::log(2.0);
  r.add("residual-slope", slope >= 1.6 && slope <= 2.4,
        "h-refinement slope " + fmt("%.3f", slope));
  r.add("norm-bound", bound_ok, "sup |u| <= " + fmt("%.3f", constant) + " sup |f|");

  Canvas cv = Canvas::cover(Box{-1.2, -1.2, 1.2, 1.2}, 1.0 / 64.0);
  Mask cand(cv.size(), 0);
  for (int k = 0; k < cv.size(); ++k) cand[k] = 1;
  auto g1 = [&](Cx z) { return bump(z); };
  auto g2 = [&](Cx z) { return bump(z - Cx{0.2, 0.1}); };
  auto gs = [&](Cx z) { return bump(z) + bump(z - Cx{0.2, 0.1}); };
  Mask target(cv.size(), 1);
  DbarSolution u1 = solve_dbar(Form01Sample::from_function(cv, g1, cand), target, constant);
  DbarSolution u2 = solve_dbar(Form01Sample::from_function(cv, g2, cand), target, constant);
  DbarSolution us = solve_dbar(Form01Sample::from_function(cv, gs, cand), target, constant);
  double lin = 0.0;
  for (int k = 0; k < cv.size(); ++k)
    lin = std::max(lin, std::abs(us.u.v[k] - u1.u.v[k] - u2.u.v[k]));
  r.add("solver-linear", lin <= 1e-12, "superposition gap " + fmt("%.2e", lin));
}

void verify_cutoff(Recorder r) {
  const Cutoff& chi = disc_cutoff();
  bool range_ok = true, pinned_ok = true, slope_ok = true;
  for (int k = -400; k <= 400; ++k) {
    double x = 0.0025 * k;
    double p = chi.profile(x);
    range_ok = range_ok && p >= 0.0 && p <= 1.0;
    if (x <= chi.l) pinned_ok = pinned_ok && p == 1.0;
    if (x >= chi.r) pinned_ok = pinned_ok && p == 0.0;
    if (x <= chi.l || x >= chi.r) slope_ok = slope_ok && chi.profile_slope(x) == 0.0;
  }
  r.add("profile-range", range_ok, "values stay in [0, 1]");
  r.add("profile-pinned", pinned_ok, "exact 0/1 outside the transition");
  r.add("slope-support", slope_ok, "slope vanishes off the transition");
  r.add("dbar-sup", chi.sup_dbar > 0.0 && chi.sup_dbar < 1e3,
        "sup |dbar chi| = " + fmt("%.3f", chi.sup_dbar));
}

void verify_splitting(Recorder r) {
  const CartanPair& pair = disc_pair();
  Region dom = pair.region(PairSet::C, 0.1, "input");
  HoloMap c = HoloMap::perturbation({Cx{1e-4, 0}, Cx{0, 0}, Cx{3e-4, 1e-4}}, dom);
  AdditiveSplit split = split_additive(c, pair, 0.05, 0.1, disc_cutoff());
  r.add("additive-identity", split.identity_residual <= 1e-12,
        "sup |c - (b - a)| = " + fmt("%.2e", split.identity_residual));
  r.add("piece-norms", split.norm_ok,
        "max norm " + fmt("%.2e", std::max(split.a_norm, split.b_norm)) + " <= M3 ||c|| = " +
            fmt("%.2e", split.bound));
  r.add("pieces-holomorphic",
        split.dbar_a <= split.holo_tolerance && split.dbar_b <= split.holo_tolerance,
        "dbar residuals " + fmt("%.2e", std::max(split.dbar_a, split.dbar_b)) + " <= " +
            fmt("%.2e", split.holo_tolerance));

  HoloMap c2 = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{0, 2e-4}}, dom);
  AdditiveSplit s2 = split_additive(c2, pair, 0.05, 0.1, disc_cutoff());
  HoloMap sum = HoloMap::perturbation({Cx{1e-4, 0}, Cx{0, 0}, Cx{3e-4, 3e-4}}, dom);
  AdditiveSplit ss = split_additive(sum, pair, 0.05, 0.1, disc_cutoff());
  double lin = 0.0;
  Region probe = pair.region(PairSet::C, 0.05, "linearity");
  for (size_t k = 0; k < probe.samples.size(); k += 7) {
    Cx z = probe.samples[k];
    lin = std::max(lin, std::abs(ss.a.diff(z) - split.a.diff(z) - s2.a.diff(z)));
    lin = std::max(lin, std::abs(ss.b.diff(z) - split.b.diff(z) - s2.b.diff(z)));
  }
  r.add("splitting-linear", lin <= 1e-12, "superposition gap " + fmt("%.2e", lin));
}

void verify_iteration(Recorder r) {
  const CartanPair& pair = disc_pair();
  Constants cc = constants(pair, disc_cutoff(), 0.01, 4.0);
  bool formulas = cc.M3 == 1.0 + cc.C * cc.chi.sup_dbar &&
                  cc.M4 == 2.0 * std::max(2048.0 * cc.M3, cc.M3 / (4.0 * cc.K)) &&
                  cc.M5 == 32.0 * cc.M2 * cc.M3 * cc.M3 &&
                  cc.R0 == 0.25 * std::min({1.0, 0.5 * cc.tau, 0.25 * cc.K * cc.tau});
  r.add("constant-chain", formulas,
        "M3 = " + fmt("%.4f", cc.M3) + ", M4 = " + fmt("%.0f", cc.M4) + ", R0 = " +
            fmt("%.3e", cc.R0));

  bool seq = check_sequence_lemma(1.0, 1.0, 1.0, 0.999 * derive_rho(1.0, 1.0, 1.0)).ok &&
             !check_sequence_lemma(1.0, 1.0, 1.0, 1.0 / 16.0).ok;
  r.add("sequence-lemma", seq, "holds below rho, fails at a/(16 B)");

  Region dom = pair.region(PairSet::C, 0.1, "input");
  auto run = run_split(HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{1e-4, 0}}, dom), pair,
                       0.01, 0.5, cc, 12);
  bool contracted = run.stop_reason == "converged" &&
                    run.residual <= std::max(10.0 * run.noise_floor, 2.0 * run.eps_final) &&
                    run.degree_ok;
  for (const auto& row : run.trace) contracted = contracted && row.eps_out <= 4.0 * row.bound;
  r.add("practical-run", contracted,
        std::to_string(run.steps) + " steps, residual " + fmt("%.2e", run.residual));

  Constants certc = constants(pair, disc_cutoff(), 0.01, 4.0, 0.2, 0.05, true);
  auto cert = run_split(HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{4e-11, 0}}, dom), pair,
                        0.01, 0.5, certc, 12);
  r.add("certified-run", cert.all_de_ok && cert.steps >= 1,
        std::to_string(cert.steps) + " steps, every inequality < R_m/32");
}

}  // namespace

std::vector<std::string> verify_suites() {
  return {"geometry", "holo", "dbar", "cutoff", "splitting", "iteration"};
}

std::vector<VerifyCheck> run_verify(const std::string& suite) {
  auto names = verify_suites();
  if (!suite.empty())
    require(std::find(names.begin(), names.end(), suite) != names.end(), "invalid-parameter",
            "unknown suite '" + suite + "'");
  std::vector<VerifyCheck> out;
  auto want = [&](const char* s) { return suite.empty() || suite == s; };
  if (want("geometry")) verify_geometry({out, "geometry"});
  if (want("holo")) verify_holo({out, "holo"});
  if (want("dbar")) verify_dbar({out, "dbar"});
  if (want("cutoff")) verify_cutoff({out, "cutoff"});
  if (want("splitting")) verify_splitting({out, "splitting"});
  if (want("iteration")) verify_iteration({out, "iteration"});
  return out;
}

}  // namespace holosplit
