#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "holosplit/cutoff.hpp"
#include "holosplit/dbar.hpp"
#include "holosplit/error.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"
#include "holosplit/iteration.hpp"
#include "holosplit/splitting.hpp"
#include "support.hpp"

using namespace holosplit;
using holosplit::testing::rng;
using holosplit::testing::random_perturbation;
using holosplit::testing::thrown_kind;

namespace {

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

Constants disc_constants(bool certified = false) {
  return constants(disc_pair(), disc_cutoff(), 0.01, 4.0, 0.2, 0.05, certified);
}

// Scales of the plain additive tests, comfortably inside tau0 = 0.2.
constexpr double kTau1 = 0.05, kTau2 = 0.1;

HoloMap lens_map(const std::vector<Cx>& diff_coeffs) {
  return HoloMap::perturbation(diff_coeffs, disc_pair().region(PairSet::C, kTau2, "lens"));
}

}  // namespace

TEST_CASE("zero input splits to zero exactly") {
  auto split = split_additive(HoloMap::identity(disc_pair().region(PairSet::C, kTau2, "lens")),
                              disc_pair(), kTau1, kTau2, disc_cutoff());
  CHECK(split.c_norm == 0.0);
  CHECK(split.a_norm == 0.0);
  CHECK(split.b_norm == 0.0);
  CHECK(split.identity_residual == 0.0);
  CHECK(split.g.u_sup == 0.0);
  CHECK(split.g.residual == 0.0);
  CHECK(split.norm_ok);
  CHECK(split.dbar_a == 0.0);
  CHECK(split.dbar_b == 0.0);
}

TEST_CASE("constant difference reproduces itself across the lens") {
  const Cx v{3e-4, 2e-4};
  auto split = split_additive(lens_map({v}), disc_pair(), kTau1, kTau2, disc_cutoff());

  CHECK(split.c_norm == doctest::Approx(std::abs(v)).epsilon(1e-14));
  // The g values cancel node for node, so b - a recovers v to roundoff.
  CHECK(split.identity_residual <= 1e-15);
  for (Cx z : {Cx{0.0, 0.0}, Cx{-0.2, 0.4}, Cx{0.1, -0.7}, Cx{0.29, 0.1}}) {
    CHECK(std::abs(split.b.diff(z) - split.a.diff(z) - v) <= 1e-15);
  }
  // The pieces themselves are not constant: the transform carries real mass.
  CHECK(split.g.u_sup > 1e-8 * std::abs(v));
  CHECK(split.norm_ok);
  CHECK(split.g.norm_bound_ok);
  CHECK(split.dbar_a <= split.holo_tolerance);
  CHECK(split.dbar_b <= split.holo_tolerance);
}

TEST_CASE("linear difference splits within the pinned residual") {
  auto split = split_additive(lens_map({Cx{0.0, 0.0}, Cx{0.01, 0.0}}), disc_pair(), kTau1,
                              kTau2, disc_cutoff());
  CHECK(split.identity_residual <= 1e-4);   // pinned acceptance level
  CHECK(split.identity_residual <= 1e-12);  // actual headroom: pure roundoff
  CHECK(split.norm_ok);
  CHECK(split.a_norm <= split.m3 * split.c_norm * (1.0 + 1e-9));
  CHECK(split.b_norm <= split.m3 * split.c_norm * (1.0 + 1e-9));
  CHECK(split.dbar_a <= split.holo_tolerance);
  CHECK(split.dbar_b <= split.holo_tolerance);
  CHECK(split.g.norm_bound_ok);
}

TEST_CASE("twenty random small differences keep the identity and the norm bound") {
  auto g = rng(42);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    auto cf = random_perturbation(g, 7e-4, 5, 1.3);
    cf[0] = Cx{d(g), d(g)} * 2e-4;
    auto split = split_additive(lens_map(cf), disc_pair(), kTau1, kTau2, disc_cutoff());
    CHECK(split.c_norm <= 1.2e-3);
    CHECK(split.identity_residual <= 10.0 * split.g.noise_floor);
    CHECK(split.norm_ok);
    CHECK(split.dbar_a <= split.holo_tolerance);
    CHECK(split.dbar_b <= split.holo_tolerance);
    CHECK(split.g.norm_bound_ok);
  }
}

TEST_CASE("splitting is linear in the input") {
  auto g = rng(9);
  auto cf1 = random_perturbation(g, 1e-3, 4, 1.3);
  auto cf2 = random_perturbation(g, 1e-3, 4, 1.3);
  const Cx w1{0.7, 0.0}, w2{0.0, -0.3};
  std::vector<Cx> cf3(std::max(cf1.size(), cf2.size()), Cx{0.0, 0.0});
  for (size_t k = 0; k < cf1.size(); ++k) cf3[k] += w1 * cf1[k];
  for (size_t k = 0; k < cf2.size(); ++k) cf3[k] += w2 * cf2[k];

  auto s1 = split_additive(lens_map(cf1), disc_pair(), kTau1, kTau2, disc_cutoff());
  auto s2 = split_additive(lens_map(cf2), disc_pair(), kTau1, kTau2, disc_cutoff());
  auto s3 = split_additive(lens_map(cf3), disc_pair(), kTau1, kTau2, disc_cutoff());

  const auto& samples = s3.a.domain().samples;
  double worst = 0.0;
  for (size_t k = 0; k < samples.size(); k += 7) {
    Cx z = samples[k];
    worst = std::max(worst,
                     std::abs(s3.a.diff(z) - (w1 * s1.a.diff(z) + w2 * s2.a.diff(z))));
  }
  for (size_t k = 0; k < s3.b.domain().samples.size(); k += 7) {
    Cx z = s3.b.domain().samples[k];
    worst = std::max(worst,
                     std::abs(s3.b.diff(z) - (w1 * s1.b.diff(z) + w2 * s2.b.diff(z))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("parameter and input misuse are rejected") {
  auto c = lens_map({Cx{1e-4, 0.0}});
  CHECK(thrown_kind([&] {
          split_additive(c, disc_pair(), 0.1, 0.05, disc_cutoff());
        }) == "invalid-parameter");
  CHECK(thrown_kind([&] {
          split_additive(c, disc_pair(), 0.05, 0.3, disc_cutoff());
        }) == "invalid-parameter");
  CHECK(thrown_kind([&] {
          split_additive(c, disc_pair(), kTau1, kTau2, disc_cutoff(), 0.2, -1e-3);
        }) == "invalid-parameter");

  Cutoff foreign = disc_cutoff();
  foreign.s1 += 0.05;
  CHECK(thrown_kind([&] {
          split_additive(c, disc_pair(), kTau1, kTau2, foreign);
        }) == "invalid-parameter");

  // |dbar conj| = 1, so 0.1 conj(z) sits two decades above the quadrature
  // tolerance 50 h^2 while a well-resolved holomorphic input sits far below.
  auto bad = HoloMap::callable([](Cx z) { return 0.1 * std::conj(z); },
                               disc_pair().region(PairSet::C, kTau2, "lens"), "antiholomorphic");
  CHECK(thrown_kind([&] {
          split_additive(bad, disc_pair(), kTau1, kTau2, disc_cutoff());
        }) == "not-holomorphic");
}

TEST_CASE("identity input passes through the step unchanged") {
  auto consts = disc_constants();
  auto sr = split_step(HoloMap::identity(disc_pair().region(PairSet::C, 0.05, "lens")),
                       disc_pair(), 4.0 * consts.tau, consts.R0, consts);
  CHECK(sr.eps_in == 0.0);
  CHECK(sr.eps_out == 0.0);
  CHECK(sr.alpha_norm == 0.0);
  CHECK(sr.beta_norm == 0.0);
  CHECK(sr.identity_residual == 0.0);
  CHECK(sr.hypothesis_ok);
  CHECK(sr.contraction_ok);
  CHECK(sr.inj_alpha.certified);
  CHECK(sr.inj_beta.certified);
  CHECK(sr.ratio == 0.0);
}

TEST_CASE("step contraction is quadratic across three input sizes") {
  auto consts = disc_constants();
  const double tau = 4.0 * consts.tau, r = consts.R0;

  std::vector<double> eps_in, eps_out;
  for (double target : {1e-3, 1e-4, 1e-5}) {
    // gamma = z + s z^2 with s tuned so sup |gamma - Id| lands near target.
    double s = target / 1.2;
    auto gamma = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{s, 0.0}},
                                       disc_pair().region(PairSet::C, tau + r, "lens"));
    auto sr = split_step(gamma, disc_pair(), tau, r, consts);
    eps_in.push_back(sr.eps_in);
    eps_out.push_back(sr.eps_out);
    CHECK(sr.contraction_ok);
    CHECK(sr.inj_alpha.certified);
    CHECK(sr.inj_beta.certified);
    CHECK(sr.alpha_norm <= consts.M3 * sr.eps_in * (1.0 + 1e-9));
    CHECK(sr.beta_norm <= consts.M3 * sr.eps_in * (1.0 + 1e-9));
  }
  for (int k = 0; k + 1 < 3; ++k) {
    double slope = std::log(eps_out[k] / eps_out[k + 1]) / std::log(eps_in[k] / eps_in[k + 1]);
    CHECK(slope >= 1.8);
    CHECK(slope <= 2.2);
  }
}

TEST_CASE("step output is consistent across two grid resolutions") {
  auto omega = JordanDomain::ellipse(1.0, 1.0, Cx{0.0, 0.0}, 1024);
  std::vector<double> ratios;
  for (double h : {1.0 / 128.0, 1.0 / 192.0}) {
    CartanPair pair = make_cartan_pair(omega, -0.3, 0.3, h);
    Cutoff chi = build_cutoff(pair);
    Constants consts = constants(pair, chi, 0.01, 4.0);
    auto gamma = HoloMap::perturbation(
        {Cx{0, 0}, Cx{0, 0}, Cx{1e-4, 0.0}},
        pair.region(PairSet::C, 4.0 * consts.tau + consts.R0, "lens"));
    auto sr = split_step(gamma, pair, 4.0 * consts.tau, consts.R0, consts);
    CHECK(sr.eps_out > 0.0);
    ratios.push_back(sr.ratio);
  }
  CHECK(ratios[1] / ratios[0] >= 0.67);
  CHECK(ratios[1] / ratios[0] <= 1.5);
}

TEST_CASE("difference equal to the additive split collapses quadratically") {
  const double eps = 1e-3, delta = 0.05, tau1 = 0.05;
  double m2 = calibrate_m2(disc_pair(), tau1, 42, 25);
  CHECK(m2 >= 1.0);
  CHECK(m2 <= 100.0);

  // Build a triple with c = b - a exactly; the first-order terms cancel and
  // only the composition defect survives, which the calibrated constant caps.
  auto g = rng(777);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto& pair = disc_pair();
  Region ra = pair.region(PairSet::A, tau1 + delta, "A wide");
  Region rb = pair.region(PairSet::B, tau1 + delta, "B wide");
  Region rc = pair.region(PairSet::C, tau1, "C");
  Region rc_mid = pair.region(PairSet::C, tau1 + 0.5 * delta, "C mid");

  auto pert = [&](const Region& dom) {
    std::vector<Cx> cf(5);
    for (int k = 0; k < 5; ++k) cf[k] = k == 1 ? Cx{0.0, 0.0} : Cx{d(g), d(g)};
    HoloMap raw = HoloMap::perturbation(cf, dom);
    for (auto& z : cf) z *= eps / raw.domain_norm();
    return HoloMap::perturbation(cf, dom);
  };
  HoloMap al = pert(ra), be = pert(rb);
  std::vector<Cx> cf(5, Cx{0.0, 0.0});
  for (int k = 0; k < 5; ++k) cf[k] = be.coefficients()[k] - al.coefficients()[k];
  HoloMap ga = HoloMap::perturbation(cf, pair.region(PairSet::C, tau1 + delta, "C wide"));

  HoloMap be_inv = invert_near_identity_on(be, rb, rc_mid, 1.25 * eps);
  HoloMap gt = compose(be_inv, compose(ga, al, rc), rc);
  CHECK(gt.domain_norm() <= m2 * eps * eps / delta);
  CHECK(gt.domain_norm() > 0.0);
}

TEST_CASE("mask-native inverse matches the generic inverse") {
  const auto& pair = disc_pair();
  auto phi = HoloMap::perturbation({Cx{2e-4, -1e-4}, Cx{0, 0}, Cx{8e-4, 3e-4}},
                                   pair.region(PairSet::C, 0.12, "lens"));
  HoloMap inv_generic = invert_near_identity(phi, pair.region(PairSet::C, 0.05, "lens"),
                                             0.02, 3e-3);
  HoloMap inv_masked = invert_near_identity_on(phi, pair.region(PairSet::C, 0.1, "sweep"),
                                               pair.region(PairSet::C, 0.03, "domain"),
                                               3e-3);
  const auto& samples = inv_masked.domain().samples;
  double worst = 0.0;
  for (size_t k = 0; k < samples.size(); k += 5)
    worst = std::max(worst, std::abs(inv_masked.diff(samples[k]) -
                                     inv_generic.diff(samples[k])));
  CHECK(worst <= 1e-13);
  CHECK(thrown_kind([&] {
          invert_near_identity_on(phi, pair.region(PairSet::C, 0.1, "sweep"),
                                  pair.region(PairSet::C, 0.03, "domain"), 1e-5);
        }) == "precondition-violation");
}

TEST_CASE("step maps separate grid points") {
  auto consts = disc_constants();
  const double tau = 4.0 * consts.tau, r = consts.R0;
  auto gamma = HoloMap::perturbation({Cx{0, 0}, Cx{0, 0}, Cx{1e-4 / 1.2, 0.0}},
                                     disc_pair().region(PairSet::C, tau + r, "lens"));
  auto sr = split_step(gamma, disc_pair(), tau, r, consts);

  auto reg = disc_pair().region(PairSet::A, tau + 0.25 * r, "A");
  auto g = rng(5);
  std::uniform_int_distribution<size_t> pick(0, reg.samples.size() - 1);
  for (int t = 0; t < 300; ++t) {
    Cx z = reg.samples[pick(g)], w = reg.samples[pick(g)];
    if (z == w) continue;
    CHECK(std::abs(sr.alpha.eval(z) - sr.alpha.eval(w)) >= 0.5 * std::abs(z - w));
  }
}
