#include "holosplit/config.hpp"

#include <cmath>
#include <set>

#include "holosplit/error.hpp"
#include "json.hpp"

namespace holosplit {

namespace {

using json = nlohmann::ordered_json;

void require_keys(const json& obj, const char* where, std::set<std::string> allowed) {
  for (const auto& item : obj.items())
    require(allowed.count(item.key()) != 0, "validation-error",
            std::string("unknown key '") + item.key() + "' in " + where);
}

double number_field(const json& obj, const char* name, double fallback, double lo, double hi) {
  if (!obj.contains(name)) return fallback;
  const json& v = obj.at(name);
  require(v.is_number(), "validation-error", std::string(name) + " must be a number");
  double x = v.get<double>();
  require(x >= lo && x <= hi, "validation-error",
          std::string(name) + " = " + fmt("%g", x) + " outside [" + fmt("%g", lo) + ", " +
              fmt("%g", hi) + "]");
  return x;
}

// Scalar or [start, end]: the linear zeta-dependence of one geometry number.
void range_field(const json& obj, const char* name, double& v0, double& v1, double lo,
                 double hi) {
  if (!obj.contains(name)) return;
  const json& v = obj.at(name);
  if (v.is_number()) {
    v0 = v1 = v.get<double>();
  } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    v0 = v[0].get<double>();
    v1 = v[1].get<double>();
  } else {
    fail("validation-error", std::string(name) + " must be a number or a [start, end] pair");
  }
  require(v0 >= lo && v0 <= hi && v1 >= lo && v1 <= hi, "validation-error",
          std::string(name) + " outside [" + fmt("%g", lo) + ", " + fmt("%g", hi) + "]");
}

Cx point_of(const json& v, const char* name) {
  require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
          "validation-error", std::string(name) + " must be an [x, y] pair");
  return Cx{v[0].get<double>(), v[1].get<double>()};
}

// Point or [point, point] for the drifting ellipse center.
void center_field(const json& obj, const char* name, Cx& c0, Cx& c1) {
  if (!obj.contains(name)) return;
  const json& v = obj.at(name);
  require(v.is_array() && v.size() == 2, "validation-error",
          std::string(name) + " must be [x, y] or [[x0, y0], [x1, y1]]");
  if (v[0].is_number()) {
    c0 = c1 = point_of(v, name);
  } else {
    c0 = point_of(v[0], name);
    c1 = point_of(v[1], name);
  }
}

std::vector<Cx> coeff_list(const json& v, const char* name) {
  require(v.is_array(), "validation-error", std::string(name) + " must be a coefficient list");
  std::vector<Cx> out;
  for (const auto& e : v) out.push_back(point_of(e, name));
  return out;
}

json coeff_json(const std::vector<Cx>& c) {
  json arr = json::array();
  for (const Cx& v : c) arr.push_back({v.real(), v.imag()});
  return arr;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("parse-error", e.what());
  }
  require(doc.is_object(), "parse-error", "config root must be a JSON object");
  require_keys(doc, "config",
               {"domain", "strip", "map", "tau", "eta", "tau0", "mu", "mode", "h",
                "boundary_points", "zeta_count", "max_steps", "seed", "m2", "output"});

  ExperimentConfig cfg;

  require(doc.contains("domain"), "validation-error", "missing required key 'domain'");
  {
    const json& d = doc.at("domain");
    require(d.is_object(), "validation-error", "domain must be an object");
    require_keys(d, "domain", {"kind", "a", "b", "center"});
    if (d.contains("kind")) {
      require(d.at("kind").is_string(), "validation-error", "domain.kind must be a string");
      cfg.domain.kind = d.at("kind").get<std::string>();
    }
    require(cfg.domain.kind == "ellipse", "validation-error",
            "domain.kind '" + cfg.domain.kind + "' not supported (use 'ellipse')");
    range_field(d, "a", cfg.domain.a0, cfg.domain.a1, 1e-6, 1e6);
    range_field(d, "b", cfg.domain.b0, cfg.domain.b1, 1e-6, 1e6);
    center_field(d, "center", cfg.domain.center0, cfg.domain.center1);
  }

  require(doc.contains("strip"), "validation-error", "missing required key 'strip'");
  {
    const json& s = doc.at("strip");
    require(s.is_object(), "validation-error", "strip must be an object");
    require_keys(s, "strip", {"s1", "s2"});
    require(s.contains("s1") && s.contains("s2"), "validation-error",
            "strip needs both s1 and s2");
    require(s.at("s1").is_number() && s.at("s2").is_number(), "validation-error",
            "strip bounds must be numbers");
    cfg.s1 = s.at("s1").get<double>();
    cfg.s2 = s.at("s2").get<double>();
    require(cfg.s1 < cfg.s2, "validation-error",
            "strip bounds need s1 < s2, got s1 = " + fmt("%g", cfg.s1) +
                ", s2 = " + fmt("%g", cfg.s2));
  }

  require(doc.contains("map"), "validation-error", "missing required key 'map'");
  {
    const json& m = doc.at("map");
    require(m.is_object(), "validation-error", "map must be an object");
    require_keys(m, "map", {"coefficients", "coefficients_start", "coefficients_end"});
    if (m.contains("coefficients")) {
      require(!m.contains("coefficients_start") && !m.contains("coefficients_end"),
              "validation-error", "map takes either coefficients or the start/end pair");
      cfg.map_start = cfg.map_end = coeff_list(m.at("coefficients"), "map.coefficients");
    } else {
      require(m.contains("coefficients_start") && m.contains("coefficients_end"),
              "validation-error", "map needs coefficients or coefficients_start/end");
      cfg.map_start = coeff_list(m.at("coefficients_start"), "map.coefficients_start");
      cfg.map_end = coeff_list(m.at("coefficients_end"), "map.coefficients_end");
      require(cfg.map_start.size() == cfg.map_end.size(), "validation-error",
              "map coefficient lists must have equal length");
    }
  }

  cfg.tau = number_field(doc, "tau", cfg.tau, 1e-9, 10.0);
  cfg.eta = number_field(doc, "eta", cfg.eta, 1e-12, 1e6);
  cfg.tau0 = number_field(doc, "tau0", cfg.tau0, 1e-9, 1e3);
  cfg.mu = number_field(doc, "mu", cfg.mu, 1e-9, 1e3);
  require(5.0 * cfg.tau <= cfg.tau0 * (1.0 + 1e-12), "validation-error",
          "tau = " + fmt("%g", cfg.tau) + " needs 5 tau <= tau0 = " + fmt("%g", cfg.tau0));
  require(5.0 * cfg.tau <= cfg.mu * (1.0 + 1e-12), "validation-error",
          "tau = " + fmt("%g", cfg.tau) + " needs 5 tau <= mu = " + fmt("%g", cfg.mu));

  if (doc.contains("mode")) {
    require(doc.at("mode").is_string(), "validation-error", "mode must be a string");
    cfg.mode = doc.at("mode").get<std::string>();
  }
  require(cfg.mode == "practical" || cfg.mode == "certified", "validation-error",
          "mode '" + cfg.mode + "' not recognized (practical | certified)");

  cfg.h = number_field(doc, "h", cfg.h, 1e-6, 1.0 / 32.0);
  cfg.boundary_points = (int)number_field(doc, "boundary_points", cfg.boundary_points, 64, 1e6);
  cfg.zeta_count = (int)number_field(doc, "zeta_count", cfg.zeta_count, 2, 10000);
  cfg.max_steps = (int)number_field(doc, "max_steps", cfg.max_steps, 1, 64);
  cfg.seed = (unsigned)number_field(doc, "seed", cfg.seed, 0, 4294967295.0);
  cfg.m2 = number_field(doc, "m2", cfg.m2, 0.0, 1e6);
  require(cfg.m2 == 0.0 || cfg.m2 >= 1.0, "validation-error",
          "m2 must be 0 (calibrate) or at least 1");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    require(o.is_object(), "validation-error", "output must be an object");
    require_keys(o, "output", {"trace", "report"});
    if (o.contains("trace")) {
      require(o.at("trace").is_string(), "validation-error", "output.trace must be a string");
      cfg.output.trace = o.at("trace").get<std::string>();
    }
    if (o.contains("report")) {
      require(o.at("report").is_string(), "validation-error", "output.report must be a string");
      cfg.output.report = o.at("report").get<std::string>();
    }
    require(!cfg.output.trace.empty() && !cfg.output.report.empty(), "validation-error",
            "output paths must be nonempty");
  }
  return cfg;
}

std::string emit_config(const ExperimentConfig& cfg) {
  json doc;
  doc["domain"] = {{"kind", cfg.domain.kind},
                   {"a", {cfg.domain.a0, cfg.domain.a1}},
                   {"b", {cfg.domain.b0, cfg.domain.b1}},
                   {"center",
                    {{cfg.domain.center0.real(), cfg.domain.center0.imag()},
                     {cfg.domain.center1.real(), cfg.domain.center1.imag()}}}};
  doc["strip"] = {{"s1", cfg.s1}, {"s2", cfg.s2}};
  doc["map"] = {{"coefficients_start", coeff_json(cfg.map_start)},
                {"coefficients_end", coeff_json(cfg.map_end)}};
  doc["tau"] = cfg.tau;
  doc["eta"] = cfg.eta;
  doc["tau0"] = cfg.tau0;
  doc["mu"] = cfg.mu;
  doc["mode"] = cfg.mode;
  doc["h"] = cfg.h;
  doc["boundary_points"] = cfg.boundary_points;
  doc["zeta_count"] = cfg.zeta_count;
  doc["max_steps"] = cfg.max_steps;
  doc["seed"] = cfg.seed;
  doc["m2"] = cfg.m2;
  doc["output"] = {{"trace", cfg.output.trace}, {"report", cfg.output.report}};
  return doc.dump(2) + "\n";
}

std::shared_ptr<const JordanDomain> domain_at(const ExperimentConfig& cfg, double zeta) {
  require(zeta >= 0.0 && zeta <= 1.0, "invalid-parameter", "zeta must lie in [0, 1]");
  double a = cfg.domain.a0 + zeta * (cfg.domain.a1 - cfg.domain.a0);
  double b = cfg.domain.b0 + zeta * (cfg.domain.b1 - cfg.domain.b0);
  Cx c = cfg.domain.center0 + zeta * (cfg.domain.center1 - cfg.domain.center0);
  return JordanDomain::ellipse(a, b, c, cfg.boundary_points);
}

CartanPair pair_at(const ExperimentConfig& cfg, double zeta) {
  return make_cartan_pair(domain_at(cfg, zeta), cfg.s1, cfg.s2, cfg.h);
}

HoloMap map_at(const ExperimentConfig& cfg, double zeta, const CartanPair& pair) {
  require(zeta >= 0.0 && zeta <= 1.0, "invalid-parameter", "zeta must lie in [0, 1]");
  Region dom = pair.region(PairSet::C, cfg.tau, "input");
  if (cfg.map_start.empty()) return HoloMap::identity(dom);
  std::vector<Cx> c(cfg.map_start.size());
  for (size_t k = 0; k < c.size(); ++k)
    c[k] = cfg.map_start[k] + zeta * (cfg.map_end[k] - cfg.map_start[k]);
  return HoloMap::perturbation(std::move(c), dom);
}

}  // namespace holosplit
