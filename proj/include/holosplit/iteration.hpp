#pragma once

#include <string>
#include <vector>

#include "holosplit/cutoff.hpp"
#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"

namespace holosplit {

// Constant chain for one Cartan pair. K and const1 are fixed by the
// one-variable margin lemma; M3..M5 derive from the cutoff and the solver
// constant; M2 comes from calibration. R0 anchors the schedule R_m = R0/8^m.
struct Constants {
  double K = 0.25;
  double const1 = 1.0;
  double M2 = 0.0, M3 = 0.0, M4 = 0.0, M5 = 0.0;
  double tau = 0.0, tau0 = 0.0, mu = 0.0;
  double R0 = 0.0;
  double C = 0.0;  // solver norm constant for the ambient domain
  Cutoff chi;
  bool certified = false;
  double practical_cap = 0.02;  // hypothesis ceiling when not certified
};

// Derives the chain for a pair: M3 = 1 + C sup|dbar chi|,
// M4 = 2 max(2^11 M3, M3 / 4K), M5 = 32 M2 M3^2,
// R0 = (1/4) min(1, tau/2, K tau/4). Requires 5 tau <= mu and 5 tau <= tau0.
Constants constants(const CartanPair& pair, const Cutoff& chi, double tau, double m2_calibration,
                    double tau0 = 0.2, double mu = 0.05, bool certified = false,
                    double practical_cap = 0.02);

// rho(a) = (a / (8 m5)) * min(1, m5 / (2 m4)): the largest starting size the
// worst-case doubling recursion tolerates under budget a.
double derive_rho(double a, double m4, double m5);

// Acceptance threshold for the input map: half the worst rho over the R0 and
// eta budgets, capped at 1/2.
double epsilon_threshold(double r0, double eta, double m4, double m5);

struct SequenceCheck {
  bool ok = true;
  int first_fail = -1;  // step index of the first violated inequality
  int steps = 0;        // how many steps were simulated
};

// Worst-case simulation of eps_{m+1} = c 8^m eps_m^2 / a with the margin
// inequality 16 b eps_m < a / 8^m checked at every step. Runs in extended
// precision log space so underflow cannot fake a pass, and rejects a
// relative 1e-12 band below each boundary so roundoff cannot fake one
// either.
SequenceCheck check_sequence_lemma(double a, double b, double c, double eps0, int steps = 60);

struct TraceRow {
  int m = 0;
  double R_m = 0.0;
  double eps_in = 0.0;
  double eps_out = 0.0;
  double bound = 0.0;       // (M5 / R_m) eps_in^2
  double alpha_norm = 0.0;  // sup |step map - Id|, the quantity the smallness
  double beta_norm = 0.0;   // inequalities below control
  double residual = 0.0;    // dbar residual of the step's solve
  bool de_ok = false;       // the < R_m/32 smallness inequalities
};

// Fixed-column CSV rendering of a trace, header line included.
std::string trace_csv(const std::vector<TraceRow>& rows);

struct SplitRun {
  HoloMap alpha;      // limit composite on dilate(A, 2 tau)
  HoloMap beta;       // limit composite on dilate(B, 2 tau)
  HoloMap alpha_inv;  // inverse of alpha, for the pasting residual
  std::vector<TraceRow> trace;
  int steps = 0;
  double eps_entry = 0.0;      // gate norm on dilate(C, 4 tau + R0)
  double eps_final = 0.0;
  double residual = 0.0;       // sup |gamma - beta(alpha^{-1})| over dilate(C, tau)
  double tail_bound = 0.0;     // Cauchy tail estimate sum_{k>m} M3 eps_k
  double lipschitz = 0.0;      // measured inverse Lipschitz diagnostic
  double noise_floor = 0.0;    // largest solver floor seen
  bool all_de_ok = false;
  bool degree_ok = false;      // preimage count 1 on the inversion ladder
  int degree_samples = 0;
  std::vector<double> alpha_increments;  // sup |composite_m - composite_{m-1}|
  std::vector<double> beta_increments;
  std::string stop_reason;
};

// Compresses gamma to the identity through the R_m schedule and returns the
// pasting gamma = beta o alpha^{-1} with the full per-step trace.
SplitRun run_split(const HoloMap& gamma, const CartanPair& pair, double tau, double eta,
                   const Constants& consts, int max_m = 12);

struct FamilyEntry {
  double zeta = 0.0;
  SplitRun run;
  bool ok = false;
  std::string error;
};

struct ModulusRow {
  double zeta_a = 0.0, zeta_b = 0.0;
  double modulus = 0.0;  // sup distance between the two maps on the overlap
};

struct FamilyResult {
  std::vector<FamilyEntry> entries;
  std::vector<ModulusRow> alpha_moduli, beta_moduli, input_moduli;
  Constants consts;  // common chain from the worst pair
  bool partial = false;
};

// Runs the splitting over a parameter family of pairs and maps, with one
// constant chain derived from the worst pair. Entries that fail keep their
// error string; partial is set if any failed.
FamilyResult run_family(const std::vector<double>& zetas,
                        const std::vector<CartanPair>& pairs, const std::vector<HoloMap>& maps,
                        double tau, double eta, double m2_calibration, bool certified = false,
                        int max_m = 12, double tau0 = 0.2, double mu = 0.05);

// Continuity table for a family of maps evaluated on the common grid of each
// adjacent parameter pair: rows (zeta, zeta', sup distance).
std::vector<ModulusRow> continuity_modulus(const std::vector<double>& zetas,
                                           const std::vector<HoloMap>& maps,
                                           const std::vector<Region>& domains);

}  // namespace holosplit
