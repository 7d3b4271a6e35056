// Acceptance gate: eight end-to-end criteria, one line each, nonzero exit on
// any failure. Tolerances and runtime caps are pinned below.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "holosplit/cutoff.hpp"
#include "holosplit/dbar.hpp"
#include "holosplit/error.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"
#include "holosplit/iteration.hpp"
#include "holosplit/splitting.hpp"

using namespace holosplit;

namespace {

// Pinned acceptance tolerances.
constexpr double kDbarSlopeLo = 1.6, kDbarSlopeHi = 2.4;
constexpr double kStepSlopeLo = 1.8, kStepSlopeHi = 2.2;
constexpr double kResidualCap = 1e-8;
constexpr int kStepCap = 5;
constexpr double kHalvingFactor = 1.8;
constexpr int kDbarForms = 50;
constexpr int kAdditiveTrials = 20;
constexpr int kSequenceTrials = 1000;
constexpr int kDegreeMaps = 25;
const double kRuntimeCaps[8] = {60, 60, 120, 300, 10, 60, 600, 120};

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string num(double v) { return fmt("%.3g", v); }

const CartanPair& strip_ellipse() {
  static CartanPair pair =
      make_cartan_pair(JordanDomain::ellipse(2.0, 1.0, Cx{0.0, 0.0}, 1024), -0.3, 0.3,
                       1.0 / 128.0);
  return pair;
}

const Cutoff& strip_cutoff() {
  static Cutoff chi = build_cutoff(strip_ellipse());
  return chi;
}

double strip_m2() {
  static double m2 = calibrate_m2(strip_ellipse(), 0.05, 42, 25);
  return m2;
}

const CartanPair& disc_at(double zeta) {
  static std::map<long, CartanPair> cache;
  long key = std::lround(zeta * 1e6);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, make_cartan_pair(
                               JordanDomain::ellipse(1.0, 1.0, Cx{0.0, 0.05 * zeta}, 1024),
                               -0.3, 0.3, 1.0 / 128.0))
             .first;
  return it->second;
}

// 1. Solver contract: random smooth compactly supported forms on three
// domains; h-refinement residual slope and the norm bound sup|u| <= C sup|f|.
Outcome dbar_contract() {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  std::vector<std::shared_ptr<const JordanDomain>> domains = {
      JordanDomain::ellipse(1.0, 1.0, Cx{0.0, 0.0}, 512),
      JordanDomain::ellipse(2.0, 1.0, Cx{0.0, 0.0}, 512),
      JordanDomain::ellipse(1.4, 0.8, Cx{0.3, -0.2}, 512)};
  double slope_lo = 1e300, slope_hi = -1e300;
  int done = 0;
  for (int d = 0; d < 3; ++d) {
    const auto& omega = *domains[d];
    double constant = operator_constant(omega, 0.2);
    Box bb = {omega.polyline().front().real(), 0, 0, 0};
    {
      double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
      for (const Cx& z : omega.polyline()) {
        x0 = std::min(x0, z.real());
        y0 = std::min(y0, z.imag());
        x1 = std::max(x1, z.real());
        y1 = std::max(y1, z.imag());
      }
      bb = Box{x0 - 0.3, y0 - 0.3, x1 + 0.3, y1 + 0.3};
    }
    int forms = d == 2 ? kDbarForms - 2 * (kDbarForms / 3) : kDbarForms / 3;
    for (int t = 0; t < forms; ++t) {
      double rad = (0.25 + 0.15 * u01(g)) * omega.inradius();
      Cx center = omega.interior_point() +
                  0.3 * omega.inradius() * Cx{sym(g), sym(g)};
      Cx a0{sym(g), sym(g)}, a1{sym(g), sym(g)}, a2{sym(g), sym(g)};
      auto bump = [&](Cx z) -> Cx {
        double q = std::norm(z - center) / (rad * rad);
        if (q >= 1.0) return Cx{0.0, 0.0};
        Cx w = (z - center) / rad;
        return std::exp(1.0 - 1.0 / (1.0 - q)) * (a0 + a1 * w + a2 * std::conj(w));
      };
      double res[2];
      bool bound_ok = true;
      double hs[2] = {1.0 / 64.0, 1.0 / 128.0};
      for (int k = 0; k < 2; ++k) {
        Canvas cv = Canvas::cover(bb, hs[k]);
        Mask cand(cv.size(), 0);
        for (int j = 0; j < cv.ny; ++j)
          for (int i = 0; i < cv.nx; ++i)
            cand[cv.idx(i, j)] = std::abs(cv.node(i, j) - center) < rad ? 1 : 0;
        Form01Sample f = Form01Sample::from_function(cv, bump, cand);
        Mask target(cv.size(), 1);
        DbarSolution sol = solve_dbar(f, target, constant);
        res[k] = sol.residual;
        bound_ok = bound_ok && sol.norm_bound_ok;
      }
      double slope = std::log(res[0] / res[1]) / std::log(2.0);
      slope_lo = std::min(slope_lo, slope);
      slope_hi = std::max(slope_hi, slope);
      if (!(bound_ok && slope >= kDbarSlopeLo && slope <= kDbarSlopeHi))
        return {false, "form " + std::to_string(done) + " slope " + num(slope) +
                           (bound_ok ? "" : ", norm bound violated")};
      ++done;
    }
  }
  return {true, std::to_string(done) + " forms, slopes " + num(slope_lo) + ".." +
                    num(slope_hi)};
}

// 2. Additive splitting: c = b - a to quadrature accuracy with both piece
// norms under M3 ||c||.
Outcome additive_splitting() {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  const CartanPair& pair = strip_ellipse();
  Region dom = pair.region(PairSet::C, 0.1, "input");
  double tol = 10.0 * residual_tolerance(1.0 / 128.0);
  double worst_identity = 0.0, worst_rel = 0.0;
  for (int t = 0; t < kAdditiveTrials; ++t) {
    double eps = std::pow(10.0, -3.0 - 2.0 * u01(g));  // 1e-5 .. 1e-3
    std::vector<Cx> cf(6, Cx{0, 0});
    double scale = 0.0;
    for (int k = 0; k <= 5; ++k) {
      if (k == 1) continue;
      cf[k] = Cx{sym(g), sym(g)};
      scale += std::abs(cf[k]) * std::pow(1.2, k);
    }
    for (auto& v : cf) v *= eps / scale;
    AdditiveSplit split =
        split_additive(HoloMap::perturbation(cf, dom), pair, 0.05, 0.1, strip_cutoff());
    worst_identity = std::max(worst_identity, split.identity_residual);
    if (split.c_norm > 1e-3 + 1e-12) return {false, "input exceeded the 1e-3 cap"};
    if (!(split.identity_residual <= tol && split.norm_ok))
      return {false, "trial " + std::to_string(t) + " identity residual " +
                         num(split.identity_residual) + (split.norm_ok ? "" : ", norms over M3")};
    worst_rel = std::max(worst_rel,
                         std::max(split.a_norm, split.b_norm) / (split.m3 * split.c_norm));
  }
  return {true, std::to_string(kAdditiveTrials) + " inputs, worst identity gap " +
                    num(worst_identity) + " (cap " + num(tol) + "), worst norm ratio " +
                    num(worst_rel)};
}

// 3. One-step contraction is quadratic across three input scales.
Outcome quadratic_step() {
  Constants consts = constants(disc_at(0.0), build_cutoff(disc_at(0.0)), 0.01, 4.0);
  const double tau = 4.0 * consts.tau, r = consts.R0;
  std::vector<double> eps_in, eps_out;
  for (double target : {1e-3, 1e-4, 1e-5}) {
    auto gamma = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{target / 1.2, 0.0}},
                                       disc_at(0.0).region(PairSet::C, tau + r, "lens"));
    StepResult sr = split_step(gamma, disc_at(0.0), tau, r, consts);
    if (!sr.contraction_ok) return {false, "contraction bound violated"};
    eps_in.push_back(sr.eps_in);
    eps_out.push_back(sr.eps_out);
  }
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k + 1 < 3; ++k) {
    double slope = std::log(eps_out[k] / eps_out[k + 1]) / std::log(eps_in[k] / eps_in[k + 1]);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
  }
  bool ok = lo >= kStepSlopeLo && hi <= kStepSlopeHi;
  return {ok, "log-log slopes " + num(lo) + ".." + num(hi)};
}

// 4. Full splitting of gamma(z) = z + 1e-4 (z^2 - 0.3 z^3) down to 1e-8 on
// the lens, with certified injectivity and norms under 2 M3 eps0.
Outcome full_splitting() {
  const CartanPair& pair = strip_ellipse();
  Constants cc = constants(pair, strip_cutoff(), 0.01, strip_m2());
  auto gamma = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{1e-4, 0}, Cx{-3e-5, 0}},
                                     pair.region(PairSet::C, 0.1, "input"));
  SplitRun run = run_split(gamma, pair, 0.01, 0.5, cc, 12);
  if (run.steps > kStepCap)
    return {false, std::to_string(run.steps) + " steps exceed the cap " +
                       std::to_string(kStepCap)};
  if (run.residual > kResidualCap)
    return {false, "pasting residual " + num(run.residual) + " over " + num(kResidualCap)};

  auto inj_a = injectivity_margin_on(run.alpha, pair.region(PairSet::A, 0.02, "alpha"),
                                     0.005);
  auto inj_b = injectivity_margin_on(run.beta, pair.region(PairSet::B, 0.02, "beta"), 0.005);
  if (!inj_a.certified || !inj_b.certified) return {false, "injectivity not certified"};

  double cap = 2.0 * cc.M3 * run.eps_entry;
  if (!(run.alpha.domain_norm() <= cap && run.beta.domain_norm() <= cap))
    return {false, "piece norm exceeds 2 M3 eps0 = " + num(cap)};
  return {true, std::to_string(run.steps) + " steps, residual " + num(run.residual) +
                    ", norms " + num(std::max(run.alpha.domain_norm(), run.beta.domain_norm())) +
                    " <= " + num(cap)};
}

// 5. Sequence lemma: holds below the derived rho, fails at a/(16 B).
Outcome sequence_lemma() {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> d(0.1, 100.0);
  for (int t = 0; t < kSequenceTrials; ++t) {
    double a = d(g), b = 1.0 + d(g), c = 1.0 + d(g);
    if (!check_sequence_lemma(a, b, c, 0.999 * derive_rho(a, b, c)).ok)
      return {false, "failed below rho at trial " + std::to_string(t)};
    if (check_sequence_lemma(a, b, c, a / (16.0 * b)).ok)
      return {false, "accepted the boundary size a/(16B) at trial " + std::to_string(t)};
  }
  return {true, std::to_string(kSequenceTrials) + " random triples"};
}

// 6. Range inclusion: certified near-identity maps cover the shrunken disc
// with exactly one preimage per target.
Outcome degree_one() {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  const double delta = 0.05, eps = 0.01;
  Region dilated = Region::from_domain(JordanDomain::ellipse(0.9, 0.9, Cx{0, 0}, 512),
                                       1.0 / 128.0, "margin");
  std::vector<Cx> contour;
  for (int k = 0; k < 1024; ++k)
    contour.push_back(std::polar(0.85, 2.0 * 3.14159265358979323846 * k / 1024.0));

  int tested = 0;
  for (int t = 0; t < kDegreeMaps; ++t) {
    std::vector<Cx> cf(5, Cx{0, 0});
    double scale = 0.0;
    for (int k = 0; k <= 4; ++k) {
      if (k == 1) continue;
      cf[k] = Cx{sym(g), sym(g)};
      scale += std::abs(cf[k]) * std::pow(0.9, k);
    }
    for (auto& v : cf) v *= 0.9 * eps / scale;
    HoloMap phi = HoloMap::perturbation(cf, dilated);
    auto cert = injectivity_margin_on(phi, dilated, delta);
    if (!cert.certified) return {false, "map " + std::to_string(t) + " not certified"};
    for (int w = 0; w < 8; ++w) {
      Cx target = std::polar((0.8 + delta - eps - 0.005) * std::sqrt(u01(g)),
                             2.0 * 3.14159265358979323846 * u01(g));
      int count = preimage_count(phi, contour, target);
      ++tested;
      if (count != 1)
        return {false, "preimage count " + std::to_string(count) + " at " + fmt_cx(target)};
    }
  }
  return {true, std::to_string(kDegreeMaps) + " maps, " + std::to_string(tested) +
                    " targets, every count 1"};
}

// 7. Family continuity: halving the parameter spacing halves the measured
// output moduli.
Outcome family_continuity() {
  double m2 = calibrate_m2(disc_at(0.0), 0.05, 42, 25);
  auto family = [&](int points, FamilyResult& out) {
    std::vector<double> zetas;
    std::vector<CartanPair> pairs;
    std::vector<HoloMap> maps;
    for (int k = 0; k < points; ++k) {
      double z = (double)k / (points - 1);
      zetas.push_back(z);
      pairs.push_back(disc_at(z));
      maps.push_back(HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{1e-4 * (1.0 + z), 0.0}},
                                           pairs.back().region(PairSet::C, 0.1, "input")));
    }
    out = run_family(zetas, pairs, maps, 0.01, 0.5, m2);
  };
  FamilyResult coarse, fine;
  family(11, coarse);
  family(21, fine);
  if (coarse.partial || fine.partial) return {false, "a family entry failed"};
  auto max_mod = [](const std::vector<ModulusRow>& rows) {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.modulus);
    return m;
  };
  double ra = max_mod(coarse.alpha_moduli) / max_mod(fine.alpha_moduli);
  double rb = max_mod(coarse.beta_moduli) / max_mod(fine.beta_moduli);
  bool ok = ra >= kHalvingFactor && rb >= kHalvingFactor;
  return {ok, "halving ratios alpha " + num(ra) + ", beta " + num(rb) + " (need >= " +
                  num(kHalvingFactor) + ")"};
}

// 8. Certified bookkeeping: the constant chain formulas, the entry threshold,
// and every per-step smallness inequality.
Outcome certified_bookkeeping() {
  const CartanPair& pair = strip_ellipse();
  Constants cc = constants(pair, strip_cutoff(), 0.01, strip_m2(), 0.2, 0.05, true);
  bool formulas = cc.M4 == 2.0 * std::max(2048.0 * cc.M3, cc.M3 / (4.0 * cc.K)) &&
                  cc.M5 == 32.0 * cc.M2 * cc.M3 * cc.M3 &&
                  cc.R0 == 0.25 * std::min({1.0, 0.5 * cc.tau, 0.25 * cc.K * cc.tau});
  if (!formulas) return {false, "constant chain formulas drifted"};

  double eps_eta = epsilon_threshold(cc.R0, 0.5, cc.M4, cc.M5);
  auto gamma = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{4e-11, 0}},
                                     pair.region(PairSet::C, 0.1, "input"));
  SplitRun run = run_split(gamma, pair, 0.01, 0.5, cc, 12);
  if (!(run.eps_entry < eps_eta))
    return {false, "entry size " + num(run.eps_entry) + " not below " + num(eps_eta)};
  if (run.steps < 1 || !run.all_de_ok) return {false, "a smallness inequality failed"};
  for (const auto& r : run.trace)
    if (!(r.de_ok && r.eps_in < r.R_m / 32.0 && r.alpha_norm < r.R_m / 32.0 &&
          r.beta_norm < r.R_m / 32.0))
      return {false, "step " + std::to_string(r.m) + " broke an inequality"};
  return {true, std::to_string(run.steps) + " steps, eps0 " + num(run.eps_entry) + " < " +
                    num(eps_eta) + ", every bound < R_m/32"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion list[8] = {
      {"dbar solver contract", dbar_contract},
      {"additive splitting", additive_splitting},
      {"quadratic step contraction", quadratic_step},
      {"full compositional splitting", full_splitting},
      {"sequence lemma", sequence_lemma},
      {"range inclusion degree", degree_one},
      {"family continuity", family_continuity},
      {"certified bookkeeping", certified_bookkeeping},
  };
  int failed = 0;
  for (int k = 0; k < 8; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = list[k].fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > kRuntimeCaps[k] && out.ok)
      out = {false, out.detail + "; runtime " + num(secs) + " s over cap " +
                        num(kRuntimeCaps[k])};
    if (!out.ok) ++failed;
    std::printf("[%s] %d. %s: %s (%.1f s)\n", out.ok ? "PASS" : "FAIL", k + 1, list[k].name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
