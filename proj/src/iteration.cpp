#include "holosplit/iteration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "holosplit/dbar.hpp"
#include "holosplit/error.hpp"
#include "holosplit/splitting.hpp"

namespace holosplit {

Constants constants(const CartanPair& pair, const Cutoff& chi, double tau, double m2_calibration,
                    double tau0, double mu, bool certified, double practical_cap) {
  require(tau > 0.0 && tau0 > 0.0 && mu > 0.0, "invalid-parameter",
          "tau, tau0 and mu must be positive");
  require(5.0 * tau <= mu * (1.0 + 1e-12), "invalid-parameter",
          "need 5 tau <= mu, got tau = " + fmt("%g", tau) + ", mu = " + fmt("%g", mu));
  require(5.0 * tau <= tau0 * (1.0 + 1e-12), "invalid-parameter",
          "need 5 tau <= tau0, got tau = " + fmt("%g", tau) + ", tau0 = " + fmt("%g", tau0));
  require(m2_calibration >= 1.0, "invalid-parameter", "M2 calibration must be at least 1");
  require(practical_cap > 0.0, "invalid-parameter", "practical cap must be positive");
  require(std::abs(chi.s1 - pair.s1) <= 1e-12 && std::abs(chi.s2 - pair.s2) <= 1e-12,
          "invalid-parameter", "cutoff was built for another strip");

  Constants k;
  k.M2 = m2_calibration;
  k.C = operator_constant(*pair.omega, tau0);
  k.M3 = 1.0 + k.C * chi.sup_dbar;
  k.M4 = 2.0 * std::max(2048.0 * k.M3, k.M3 / (4.0 * k.K));
  k.M5 = 32.0 * k.M2 * k.M3 * k.M3;
  k.R0 = 0.25 * std::min({1.0, 0.5 * tau, 0.25 * k.K * tau});
  k.tau = tau;
  k.tau0 = tau0;
  k.mu = mu;
  k.chi = chi;
  k.certified = certified;
  k.practical_cap = practical_cap;
  return k;
}

double derive_rho(double a, double m4, double m5) {
  require(a > 0.0 && m4 > 0.0 && m5 > 0.0, "invalid-parameter", "rho needs positive inputs");
  return a / (8.0 * m5) * std::min(1.0, m5 / (2.0 * m4));
}

double epsilon_threshold(double r0, double eta, double m4, double m5) {
  return 0.5 * std::min({1.0, derive_rho(r0, m4, m5), derive_rho(eta, m4, m5)});
}

SequenceCheck check_sequence_lemma(double a, double b, double c, double eps0, int steps) {
  require(a > 0.0 && b > 0.0 && c > 0.0, "invalid-parameter",
          "sequence budget constants must be positive");
  require(eps0 >= 0.0, "invalid-parameter", "eps0 must be nonnegative");
  require(steps > 0 && steps <= 400, "invalid-parameter", "steps out of range");

  SequenceCheck out;
  out.steps = steps;
  if (eps0 == 0.0) return out;

  // Direct extended-precision values while they stay representable; log space
  // takes over once the squaring underflows, so a pass is never faked. The
  // margin test rejects a relative 1e-12 band below the boundary as well:
  // a certificate must not hinge on the rounding of eps0 itself.
  const long double fuzz = 1.0L + 1e-12L;
  const long double la = logl((long double)a), lb = logl((long double)b),
                    lc = logl((long double)c);
  const long double l8 = logl(8.0L), l16 = logl(16.0L), lfuzz = logl(fuzz);
  long double le = logl((long double)eps0);
  long double em = (long double)eps0;
  for (int m = 0; m < steps; ++m) {
    bool pass;
    if (em > 0.0L)
      pass = 16.0L * (long double)b * em * fuzz < (long double)a / powl(8.0L, (long double)m);
    else
      pass = l16 + lb + le + lfuzz < la - (long double)m * l8;
    if (!pass) {
      out.ok = false;
      out.first_fail = m;
      return out;
    }
    le = lc + (long double)m * l8 + 2.0L * le - la;
    if (em > 0.0L) {
      em = (long double)c * powl(8.0L, (long double)m) * em * em / (long double)a;
      if (!(em > 1e-4900L)) em = 0.0L;
    }
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string s = "m,R_m,eps_in,eps_out,bound,alpha_norm,beta_norm,residual,de_ok\n";
  for (const auto& r : rows) {
    s += std::to_string(r.m) + "," + fmt("%.12g", r.R_m) + "," + fmt("%.12g", r.eps_in) + "," +
         fmt("%.12g", r.eps_out) + "," + fmt("%.12g", r.bound) + "," +
         fmt("%.12g", r.alpha_norm) + "," + fmt("%.12g", r.beta_norm) + "," +
         fmt("%.12g", r.residual) + "," + (r.de_ok ? "1" : "0") + "\n";
  }
  return s;
}

namespace {

// Sup of |f - g| over every 3rd sample of dom; both maps are evaluable there
// by construction of the composite chain.
double increment_norm(const HoloMap& f, const HoloMap& g, const Region& dom) {
  double worst = 0.0;
  for (size_t k = 0; k < dom.samples.size(); k += 3)
    worst = std::max(worst, std::abs(f.diff(dom.samples[k]) - g.diff(dom.samples[k])));
  return worst;
}

// Smallest world-unit gap between the domain's bounding box and the canvas
// border: the dilation estate the pad schedule may spend.
double canvas_headroom(const CartanPair& pair) {
  Box bb = pair.omega->bbox();
  Box cb = pair.cv.box();
  return std::min(std::min(bb.x0 - cb.x0, cb.x1 - bb.x1),
                  std::min(bb.y0 - cb.y0, cb.y1 - bb.y1));
}

}  // namespace

SplitRun run_split(const HoloMap& gamma, const CartanPair& pair, double tau, double eta,
                   const Constants& consts, int max_m) {
  require(gamma.valid(), "invalid-input", "run needs a constructed map");
  require(tau > 0.0 && eta > 0.0, "invalid-parameter", "tau and eta must be positive");
  require(max_m >= 1, "invalid-parameter", "need a step budget of at least one");
  require(consts.M3 > 0.0 && consts.M4 > 0.0 && consts.M5 > 0.0, "invalid-parameter",
          "constant chain not built");
  require(std::abs(consts.tau - tau) <= 1e-12 * std::max(1.0, tau), "invalid-parameter",
          "constant chain was built for tau = " + fmt("%g", consts.tau) + ", run asked for " +
              fmt("%g", tau));

  const double h = pair.cv.h;
  const double T = 4.0 * tau;

  double eps0 = diff_norm(gamma, pair.region(PairSet::C, T + consts.R0, "entry gate"));
  if (consts.certified) {
    double eps_eta = epsilon_threshold(consts.R0, eta, consts.M4, consts.M5);
    require(eps0 < eps_eta, "threshold-error",
            "certified run needs sup |gamma - Id| = " + fmt("%.3e", eps0) +
                " below the entry threshold " + fmt("%.3e", eps_eta));
  } else {
    require(eps0 < consts.practical_cap, "threshold-error",
            "sup |gamma - Id| = " + fmt("%.3e", eps0) + " exceeds the practical cap " +
                fmt("%.3e", consts.practical_cap));
  }

  SplitRun run;
  run.eps_entry = eps0;
  Region ra2 = pair.region(PairSet::A, 2.0 * tau, "A final");
  Region rb2 = pair.region(PairSet::B, 2.0 * tau, "B final");
  Region rc1 = pair.region(PairSet::C, tau, "C final");

  double stop_tol = 1e-12;
  if (eps0 <= stop_tol) {
    run.alpha = HoloMap::identity(ra2);
    run.beta = HoloMap::identity(rb2);
    run.alpha_inv = HoloMap::identity(pair.region(PairSet::A, 51.0 / 16.0 * tau, "A ladder"));
    run.eps_final = eps0;
    run.residual = diff_norm(gamma, rc1);
    run.tail_bound = 2.0 * consts.M3 * eps0;
    run.lipschitz = 1.0;
    run.all_de_ok = true;
    run.degree_ok = true;
    run.stop_reason = "input-below-tolerance";
    return run;
  }

  // Pad schedule. Every composition generation spends lattice estate: solver
  // stencils, the inverse-domain cushion, and node-snap fuzz, about 8h plus
  // the per-step excursion budget. Later steps therefore start with less pad,
  // and the whole ladder must fit between the domain and the canvas border.
  double exc0 = (1.0 + 2.0 * consts.M3) * eps0;
  double pad_step = 8.0 * h + 4.0 * exc0;
  double pad_floor = 10.0 * h + 4.0 * exc0;
  double spend0 = T + consts.R0 + 6.5 * h + pad_floor;
  double room = canvas_headroom(pair) - spend0;
  int m_fit = room < 0.0 ? 0 : 1 + (int)std::floor(room / pad_step);
  require(m_fit >= 1, "invalid-parameter",
          "lattice too small for one step at tau = " + fmt("%g", tau) +
              ": refine h or shrink tau");
  int m_cap = std::min(max_m, m_fit);

  Region dom_a = pair.region(PairSet::A, 3.5 * tau + 6.0 * h, "A composite");
  Region dom_b = pair.region(PairSet::B, 3.5 * tau + 6.0 * h, "B composite");

  HoloMap gm = gamma;
  HoloMap at, bt;
  double eps = eps0;
  double R_m = consts.R0;
  for (int m = 0; m < m_cap; ++m, R_m /= 8.0) {
    double pad_m = pad_floor + (double)(m_cap - 1 - m) * pad_step;
    StepResult sr;
    try {
      sr = split_step(gm, pair, T, R_m, consts, pad_m);
    } catch (const Error& e) {
      if (consts.certified && e.kind() == "threshold-error")
        fail("aborted-with-trace", std::string(e.what()) + " at step m = " +
                                       std::to_string(m) + "\n" + trace_csv(run.trace));
      throw;
    }

    TraceRow row;
    row.m = m;
    row.R_m = R_m;
    row.eps_in = sr.eps_in;
    row.eps_out = sr.eps_out;
    row.bound = sr.bound;
    row.alpha_norm = sr.alpha_norm;
    row.beta_norm = sr.beta_norm;
    row.residual = sr.solve_residual;
    double cap32 = R_m / 32.0;
    row.de_ok = sr.eps_in < cap32 && sr.alpha_norm < cap32 && sr.beta_norm < cap32;
    run.trace.push_back(row);
    if (consts.certified && !row.de_ok)
      fail("aborted-with-trace", "smallness inequality < R_m/32 failed at step m = " +
                                     std::to_string(m) + "\n" + trace_csv(run.trace));

    if (m == 0) {
      run.alpha_increments.push_back(increment_norm(sr.alpha, HoloMap::identity(dom_a), dom_a));
      run.beta_increments.push_back(increment_norm(sr.beta, HoloMap::identity(dom_b), dom_b));
      at = sr.alpha;
      bt = sr.beta;
    } else {
      HoloMap at_next = compose(at, sr.alpha, dom_a);
      HoloMap bt_next = compose(bt, sr.beta, dom_b);
      run.alpha_increments.push_back(increment_norm(at_next, at, dom_a));
      run.beta_increments.push_back(increment_norm(bt_next, bt, dom_b));
      at = std::move(at_next);
      bt = std::move(bt_next);
    }

    gm = sr.gamma_next;
    eps = sr.eps_out;
    run.noise_floor = std::max(run.noise_floor, sr.noise_floor);
    stop_tol = std::max(1e-12, 100.0 * run.noise_floor);
    if (eps <= stop_tol) {
      run.stop_reason = "converged";
      break;
    }
    if (eps >= 0.5 * sr.eps_in) {
      run.stop_reason = "stalled";
      break;
    }
  }
  if (run.stop_reason.empty())
    run.stop_reason = m_cap < max_m ? "max-steps (lattice cap " + std::to_string(m_cap) + ")"
                                    : "max-steps";

  run.steps = (int)run.trace.size();
  run.eps_final = eps;
  run.tail_bound = 2.0 * consts.M3 * eps;
  run.all_de_ok = true;
  for (const auto& r : run.trace) run.all_de_ok = run.all_de_ok && r.de_ok;

  if (consts.certified) {
    double na = diff_norm(at, ra2), nb = diff_norm(bt, rb2);
    require(na < eta && nb < eta, "numerical-failure",
            "composite norm " + fmt("%.3e", std::max(na, nb)) +
                " exceeded the certified budget eta = " + fmt("%.3e", eta));
  }

  // Degree check on the inversion ladder: every probed target in the inner
  // rung has exactly one preimage inside the outer rung's contour.
  {
    std::vector<Cx> contour = pair.offset_boundary(PairSet::A, 3.25 * tau);
    Region targets = pair.region(PairSet::A, 51.0 / 16.0 * tau, "A ladder");
    size_t n = targets.samples.size();
    run.degree_ok = n > 0;
    int probes = (int)std::min<size_t>(8, n);
    for (int t = 0; t < probes; ++t) {
      Cx w = targets.samples[(size_t)t * n / probes];
      if (preimage_count(at, contour, w) != 1) run.degree_ok = false;
      ++run.degree_samples;
    }
    if (consts.certified)
      require(run.degree_ok, "numerical-failure",
              "preimage count departed from 1 on the inversion ladder");
  }

  // Invert the composite on the ladder rungs 13 tau/4 -> 51 tau/16 (with the
  // lattice cushions that keep the sweep honest at node-snap scale).
  Region big = pair.region(PairSet::A, 3.25 * tau + 2.0 * h, "A inverse sweep");
  double na_big = diff_norm(at, big);
  double eps_a = 1.25 * na_big + 1e-14;
  require(eps_a <= tau / 16.0 + 1.5 * h, "numerical-failure",
          "composite map strays " + fmt("%.3e", na_big) +
              " from the identity; the ladder rungs cannot absorb the inversion sweep");
  try {
    run.alpha_inv = invert_near_identity_on(
        at, big, pair.region(PairSet::A, 51.0 / 16.0 * tau, "A ladder"), eps_a);
  } catch (const Error& e) {
    if (e.kind() == "numerical-failure") throw;
    fail("numerical-failure", std::string("inversion of the composite failed: ") + e.what());
  }

  // Lipschitz diagnostic for the inverse on the final A-estate.
  {
    const auto& s = ra2.samples;
    double L = 0.0;
    size_t n = s.size(), stride = std::max<size_t>(1, n / 97);
    for (size_t k = 0; k < n; k += stride) {
      Cx x = s[k], y = s[(k + n / 3) % n];
      if (std::abs(y - x) < 4.0 * h) continue;
      Cx dx = run.alpha_inv.diff(x), dy = run.alpha_inv.diff(y);
      L = std::max(L, std::abs((y - x) + (dy - dx)) / std::abs(y - x));
    }
    run.lipschitz = L;
  }

  // Pasting residual in difference space: gamma(z) - beta(alpha^{-1}(z)).
  {
    double worst = 0.0;
    for (Cx z : rc1.samples) {
      Cx di = run.alpha_inv.diff(z);
      worst = std::max(worst, std::abs(gamma.diff(z) - di - bt.diff(z + di)));
    }
    run.residual = worst;
  }

  run.alpha = compose(at, HoloMap::identity(ra2), ra2);
  run.beta = compose(bt, HoloMap::identity(rb2), rb2);
  return run;
}

FamilyResult run_family(const std::vector<double>& zetas, const std::vector<CartanPair>& pairs,
                        const std::vector<HoloMap>& maps, double tau, double eta,
                        double m2_calibration, bool certified, int max_m, double tau0,
                        double mu) {
  size_t n = zetas.size();
  require(n >= 1, "invalid-input", "family needs at least one parameter sample");
  require(pairs.size() == n && maps.size() == n, "invalid-input",
          "family arrays must have one pair and one map per parameter");
  for (size_t i = 0; i + 1 < n; ++i)
    require(zetas[i] < zetas[i + 1], "invalid-parameter",
            "parameter grid must be strictly increasing");

  // One constant chain from the worst pair: the largest domain relative to
  // its strip separation dominates every solver and cutoff constant.
  size_t worst = 0;
  double score = -1.0;
  for (size_t i = 0; i < n; ++i) {
    require(std::abs(pairs[i].s1 - pairs[0].s1) <= 1e-12 &&
                std::abs(pairs[i].s2 - pairs[0].s2) <= 1e-12,
            "invalid-parameter", "family pairs must share the strip bounds");
    double s = pairs[i].omega->diameter() / std::max(pairs[i].sep, 1e-12);
    if (s > score) {
      score = s;
      worst = i;
    }
  }
  Cutoff chi = build_cutoff(pairs[worst]);

  FamilyResult out;
  out.consts = constants(pairs[worst], chi, tau, m2_calibration, tau0, mu, certified);
  out.entries.resize(n);
  for (size_t i = 0; i < n; ++i) out.entries[i].zeta = zetas[i];

  // Independent per-parameter runs on a small pool; results merge by index,
  // so scheduling cannot change any output.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        out.entries[i].run = run_split(maps[i], pairs[i], tau, eta, out.consts, max_m);
        out.entries[i].ok = true;
      } catch (const Error& e) {
        out.entries[i].error = e.what();
      } catch (const std::exception& e) {
        out.entries[i].error = std::string("internal: ") + e.what();
      }
    }
  };
  size_t pool = std::min<size_t>(n, std::min<unsigned>(4, std::max(1u, std::thread::hardware_concurrency())));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t w = 0; w < pool; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : out.entries) out.partial = out.partial || !e.ok;

  if (n >= 2) {
    std::vector<Region> cdoms;
    for (size_t i = 0; i < n; ++i)
      cdoms.push_back(pairs[i].region(PairSet::C, tau, "C overlap"));
    out.input_moduli = continuity_modulus(zetas, maps, cdoms);
    if (!out.partial) {
      std::vector<HoloMap> alphas, betas;
      std::vector<Region> adoms, bdoms;
      for (const auto& e : out.entries) {
        alphas.push_back(e.run.alpha);
        adoms.push_back(e.run.alpha.domain());
        betas.push_back(e.run.beta);
        bdoms.push_back(e.run.beta.domain());
      }
      out.alpha_moduli = continuity_modulus(zetas, alphas, adoms);
      out.beta_moduli = continuity_modulus(zetas, betas, bdoms);
    }
  }
  return out;
}

std::vector<ModulusRow> continuity_modulus(const std::vector<double>& zetas,
                                           const std::vector<HoloMap>& maps,
                                           const std::vector<Region>& domains) {
  size_t n = zetas.size();
  require(maps.size() == n && domains.size() == n, "invalid-input",
          "modulus table needs one map and one grid per parameter");
  require(n >= 2, "invalid-input", "modulus table needs at least two parameters");
  std::vector<ModulusRow> rows;
  for (size_t i = 0; i + 1 < n; ++i) {
    double worst = 0.0;
    size_t common = 0;
    for (Cx z : domains[i].samples) {
      if (!domains[i + 1].contains(z)) continue;
      if (!maps[i].evaluable(z) || !maps[i + 1].evaluable(z)) continue;
      ++common;
      worst = std::max(worst, std::abs(maps[i].diff(z) - maps[i + 1].diff(z)));
    }
    require(common > 0, "invalid-overlap",
            "parameters " + fmt("%g", zetas[i]) + " and " + fmt("%g", zetas[i + 1]) +
                " share no evaluation nodes");
    rows.push_back({zetas[i], zetas[i + 1], worst});
  }
  return rows;
}

}  // namespace holosplit
