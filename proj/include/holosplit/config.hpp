#pragma once

#include <string>
#include <vector>

#include "holosplit/geometry.hpp"
#include "holosplit/holo.hpp"
#include "holosplit/types.hpp"

namespace holosplit {

// Experiment description: an ellipse family with linearly interpolated
// geometry, a strip, a polynomial map family interpolated between its zeta=0
// and zeta=1 coefficients, and the run parameters. Parsed from JSON.
struct DomainFamily {
  std::string kind = "ellipse";
  double a0 = 1.0, a1 = 1.0;  // semi-axes at zeta = 0 and zeta = 1
  double b0 = 1.0, b1 = 1.0;
  Cx center0{0.0, 0.0}, center1{0.0, 0.0};
};

struct OutputPaths {
  std::string trace = "trace.csv";
  std::string report = "report.json";
};

struct ExperimentConfig {
  DomainFamily domain;
  double s1 = 0.0, s2 = 0.0;
  // Difference coefficients of gamma(z) = z + sum_k c_k z^k at the two ends.
  std::vector<Cx> map_start, map_end;
  double tau = 0.01;
  double eta = 0.5;
  double tau0 = 0.2;
  double mu = 0.05;
  std::string mode = "practical";
  double h = 1.0 / 128.0;
  int boundary_points = 1024;
  int zeta_count = 11;
  int max_steps = 12;
  unsigned seed = 42;
  double m2 = 0.0;  // 0 requests calibration
  OutputPaths output;
};

// Parses and validates a JSON config. Unknown keys are rejected; defaults are
// filled for omitted optional fields. Errors: parse-error (malformed JSON,
// with location), validation-error (range violation, naming the field).
ExperimentConfig parse_config(const std::string& text);

// Canonical JSON rendering; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const ExperimentConfig& cfg);

// Family instantiation at a parameter value in [0, 1].
std::shared_ptr<const JordanDomain> domain_at(const ExperimentConfig& cfg, double zeta);
CartanPair pair_at(const ExperimentConfig& cfg, double zeta);
HoloMap map_at(const ExperimentConfig& cfg, double zeta, const CartanPair& pair);

}  // namespace holosplit
