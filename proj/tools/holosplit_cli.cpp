#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holosplit/config.hpp"
#include "holosplit/error.hpp"
#include "holosplit/iteration.hpp"
#include "holosplit/splitting.hpp"
#include "holosplit/verify.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace holosplit;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io-error", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative output paths land in HOLOSPLIT_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  const char* dir = std::getenv("HOLOSPLIT_OUTPUT_DIR");
  if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io-error", "cannot write " + path.string());
  out << text;
  require(out.good(), "io-error", "short write to " + path.string());
}

double resolve_m2(const ExperimentConfig& cfg, const CartanPair& pair) {
  if (cfg.m2 > 0.0) return cfg.m2;
  return calibrate_m2(pair, 5.0 * cfg.tau, cfg.seed, 25);
}

json run_json(const SplitRun& run) {
  json j;
  j["steps"] = run.steps;
  j["stop_reason"] = run.stop_reason;
  j["eps_entry"] = run.eps_entry;
  j["eps_final"] = run.eps_final;
  j["residual"] = run.residual;
  j["tail_bound"] = run.tail_bound;
  j["lipschitz"] = run.lipschitz;
  j["noise_floor"] = run.noise_floor;
  j["degree_ok"] = run.degree_ok;
  j["all_de_ok"] = run.all_de_ok;
  return j;
}

json constants_json(const Constants& cc, double eta) {
  json j;
  j["C"] = cc.C;
  j["sup_dbar_chi"] = cc.chi.sup_dbar;
  j["K"] = cc.K;
  j["const1"] = cc.const1;
  j["M2"] = cc.M2;
  j["M3"] = cc.M3;
  j["M4"] = cc.M4;
  j["M5"] = cc.M5;
  j["tau"] = cc.tau;
  j["tau0"] = cc.tau0;
  j["mu"] = cc.mu;
  j["R0"] = cc.R0;
  j["mode"] = cc.certified ? "certified" : "practical";
  j["practical_cap"] = cc.practical_cap;
  j["epsilon_threshold_R0"] = epsilon_threshold(cc.R0, 1e300, cc.M4, cc.M5);
  j["epsilon_threshold_eta"] = epsilon_threshold(cc.R0, eta, cc.M4, cc.M5);
  return j;
}

int cmd_split(const std::string& config_path, double zeta) {
  ExperimentConfig cfg = parse_config(read_file(config_path));
  CartanPair pair = pair_at(cfg, zeta);
  Cutoff chi = build_cutoff(pair);
  Constants cc = constants(pair, chi, cfg.tau, resolve_m2(cfg, pair), cfg.tau0, cfg.mu,
                           cfg.mode == "certified");
  SplitRun run = run_split(map_at(cfg, zeta, pair), pair, cfg.tau, cfg.eta, cc, cfg.max_steps);

  auto trace_path = resolve_output(cfg.output.trace);
  write_file(trace_path, trace_csv(run.trace));

  json j;
  j["command"] = "split";
  j["zeta"] = zeta;
  j["run"] = run_json(run);
  j["trace"] = trace_path.string();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path) {
  ExperimentConfig cfg = parse_config(read_file(config_path));
  std::vector<double> zetas;
  std::vector<CartanPair> pairs;
  std::vector<HoloMap> maps;
  for (int k = 0; k < cfg.zeta_count; ++k) {
    double z = (double)k / (cfg.zeta_count - 1);
    zetas.push_back(z);
    pairs.push_back(pair_at(cfg, z));
    maps.push_back(map_at(cfg, z, pairs.back()));
  }
  FamilyResult fam =
      run_family(zetas, pairs, maps, cfg.tau, cfg.eta, resolve_m2(cfg, pairs.front()),
                 cfg.mode == "certified", cfg.max_steps, cfg.tau0, cfg.mu);

  auto moduli_json = [](const std::vector<ModulusRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"zeta_a", r.zeta_a}, {"zeta_b", r.zeta_b}, {"modulus", r.modulus}});
    return arr;
  };
  json report;
  report["zetas"] = zetas;
  report["mode"] = cfg.mode;
  report["partial"] = fam.partial;
  report["constants"] = constants_json(fam.consts, cfg.eta);
  report["entries"] = json::array();
  for (const auto& e : fam.entries) {
    json ej;
    ej["zeta"] = e.zeta;
    ej["ok"] = e.ok;
    if (e.ok)
      ej["run"] = run_json(e.run);
    else
      ej["error"] = e.error;
    report["entries"].push_back(ej);
  }
  report["moduli"] = {{"input", moduli_json(fam.input_moduli)},
                      {"alpha", moduli_json(fam.alpha_moduli)},
                      {"beta", moduli_json(fam.beta_moduli)}};

  auto report_path = resolve_output(cfg.output.report);
  write_file(report_path, report.dump(2) + "\n");

  json j;
  j["command"] = "sweep";
  j["entries"] = (int)fam.entries.size();
  j["partial"] = fam.partial;
  j["report"] = report_path.string();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite) {
  auto checks = run_verify(suite);
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.ok) ++failed;
    std::printf("[%s] %s/%s: %s\n", c.ok ? "PASS" : "FAIL", c.suite.c_str(), c.name.c_str(),
                c.detail.c_str());
  }
  std::printf("%d checks, %d failed\n", (int)checks.size(), failed);
  return failed == 0 ? 0 : 1;
}

int cmd_constants(const std::string& config_path, double zeta) {
  ExperimentConfig cfg = parse_config(read_file(config_path));
  CartanPair pair = pair_at(cfg, zeta);
  Cutoff chi = build_cutoff(pair);
  Constants cc = constants(pair, chi, cfg.tau, resolve_m2(cfg, pair), cfg.tau0, cfg.mu,
                           cfg.mode == "certified");
  json j;
  j["command"] = "constants";
  j["zeta"] = zeta;
  j["constants"] = constants_json(cc, cfg.eta);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_table(const std::string& trace_path) {
  std::istringstream in(read_file(trace_path));
  std::string line;
  require(std::getline(in, line) &&
              line == "m,R_m,eps_in,eps_out,bound,alpha_norm,beta_norm,residual,de_ok",
          "invalid-input", "unrecognized trace header in " + trace_path);
  std::printf("%4s %11s %11s %11s %11s %11s %11s %11s %4s\n", "m", "R_m", "eps_in", "eps_out",
              "bound", "alpha_norm", "beta_norm", "residual", "de");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    require(cells.size() == 9, "invalid-input",
            "trace row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                " fields, want 9");
    double num[8];
    for (int k = 0; k < 8; ++k) {
      try {
        num[k] = std::stod(cells[k]);
      } catch (const std::exception&) {
        fail("invalid-input", "trace row " + std::to_string(rows) + " field " +
                                  std::to_string(k) + " is not numeric");
      }
    }
    std::printf("%4d %11.4e %11.4e %11.4e %11.4e %11.4e %11.4e %11.4e %4s\n", (int)num[0],
                num[1], num[2], num[3], num[4], num[5], num[6], num[7],
                cells[8] == "1" ? "ok" : "no");
    ++rows;
  }
  require(rows > 0, "invalid-input", "trace has no data rows");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compositional splitting of near-identity holomorphic maps"};
  app.require_subcommand(1);

  std::string config_path, suite, trace_path;
  double zeta = 0.0;

  CLI::App* split = app.add_subcommand("split", "run one splitting and write its trace CSV");
  split->add_option("--config", config_path, "experiment config JSON")->required();
  split->add_option("--zeta", zeta, "family parameter in [0, 1]")->default_val(0.0);

  CLI::App* sweep = app.add_subcommand("sweep", "run the parameter family and write a report");
  sweep->add_option("--config", config_path, "experiment config JSON")->required();

  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suites");
  verify->add_option("--suite", suite, "single suite name (default: all)");

  CLI::App* consts = app.add_subcommand("constants", "print the constant chain derivation");
  consts->add_option("--config", config_path, "experiment config JSON")->required();
  consts->add_option("--zeta", zeta, "family parameter in [0, 1]")->default_val(0.0);

  CLI::App* table = app.add_subcommand("table", "render a trace CSV as an aligned table");
  table->add_option("--trace", trace_path, "trace CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0) {
      json j;
      j["error"] = {{"kind", "usage-error"}, {"message", e.what()}};
      std::cout << j.dump(2) << "\n";
    }
    return app.exit(e);
  }

  try {
    if (split->parsed()) return cmd_split(config_path, zeta);
    if (sweep->parsed()) return cmd_sweep(config_path);
    if (verify->parsed()) return cmd_verify(suite);
    if (consts->parsed()) return cmd_constants(config_path, zeta);
    if (table->parsed()) return cmd_table(trace_path);
  } catch (const Error& e) {
    json j;
    j["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    json j;
    j["error"] = {{"kind", "internal-error"}, {"message", e.what()}};
    std::cout << j.dump(2) << "\n";
    return 1;
  }
  return 0;
}
