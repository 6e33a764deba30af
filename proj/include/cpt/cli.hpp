#pragma once

// Subcommand dispatch: runs an experiment for a parsed RunConfig and writes
// its artifacts plus a JSON manifest next to the main output.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>
#include <openssl/evp.h>

#include "cpt/analytic_propagator.hpp"
#include "cpt/config.hpp"
#include "cpt/dynamics.hpp"
#include "cpt/experiments.hpp"
#include "cpt/pulse_design.hpp"

namespace cpt {

inline constexpr const char* version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

/// Machine-readable error record for stderr.
inline std::string error_json(const std::string& kind, const std::string& message,
                              int code) {
  nlohmann::json j;
  j["error"] = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  return j.dump();
}

namespace detail {

struct Artifact {
  std::string path;
  std::string role;
  std::string content;
};

inline void write_artifact(const Artifact& a) {
  std::ofstream f(a.path, std::ios::binary);
  if (!f) throw ConfigError("output: cannot open '" + a.path + "' for writing");
  f << a.content;
  if (!f) throw ConfigError("output: failed writing '" + a.path + "'");
}

inline std::string sibling(const std::string& output, const std::string& suffix) {
  std::filesystem::path p(output);
  const auto stem = p.stem().string();
  p.replace_filename(stem + suffix);
  return p.string();
}

inline nlohmann::json populations_json(const Populations<5>& p) {
  return {{"g1", p[0]}, {"e1", p[1]}, {"g2", p[2]}, {"e2", p[3]}, {"g3", p[4]}};
}

inline nlohmann::json populations_json(const Populations<3>& p) {
  return {{"g1", p[0]}, {"g2", p[1]}, {"g3", p[2]}};
}

inline std::string grid_errors(const ScanGrid& g) {
  std::string s;
  for (const auto& e : g.errors) s += e + '\n';
  return s;
}

inline nlohmann::json grid_summary(const ScanGrid& g) {
  double best = -1.0;
  std::size_t failed = 0;
  for (double v : g.values) {
    if (std::isnan(v)) {
      ++failed;
    } else {
      best = std::max(best, v);
    }
  }
  return {{"max", best}, {"failed_cells", failed}};
}

}  // namespace detail

/// Runs `cfg` and writes its artifacts. Returns an ExitCode; errors go to
/// `err` as a single JSON line.
inline int execute(const RunConfig& cfg, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<detail::Artifact> artifacts;
  nlohmann::json summary = nlohmann::json::object();

  try {
    const ExperimentConfig exp = to_experiment(cfg);
    const std::string& sub = cfg.subcommand;

    if (sub == "design") {
      const RabiSchedule schedule = make_schedule(exp);
      std::ostringstream os;
      write_schedule_csv(os, schedule, cfg.samples);
      artifacts.push_back({cfg.output, "schedule", os.str()});
      const auto margins = ae_validity(schedule, exp.det);
      summary["peak_effective_rabi"] = schedule.train().peak_effective_rabi;
      summary["amp_a"] = schedule.train().amp_a;
      summary["amp_b"] = schedule.train().amp_b;
      summary["mixing_angles"] = schedule.train().mixing_angles;
      summary["centers"] = schedule.train().centers;
      summary["ae_margin1"] = margins.margin1;
      summary["ae_margin2"] = margins.margin2;
      summary["ae_verdict"] = to_string(margins.verdict());
    } else if (sub == "evolve") {
      std::ostringstream os;
      if (cfg.model == "effective") {
        const auto r = run_effective_experiment(exp);
        write_trajectory_csv(os, r);
        summary["final_populations"] = detail::populations_json(r.final_populations);
        summary["max_transients"] = detail::populations_json(r.max_transients);
        summary["norm_loss"] = r.norm_loss;
      } else {
        const auto r = run_dynamics_experiment(exp);
        write_trajectory_csv(os, r);
        summary["final_populations"] = detail::populations_json(r.final_populations);
        summary["max_transients"] = detail::populations_json(r.max_transients);
        summary["norm_loss"] = r.norm_loss;
        const auto margins = ae_validity(make_schedule(exp), exp.det);
        summary["ae_margin1"] = margins.margin1;
        summary["ae_margin2"] = margins.margin2;
        summary["ae_verdict"] = to_string(margins.verdict());
      }
      artifacts.push_back({cfg.output, "trajectory", os.str()});
    } else if (sub == "train") {
      const auto angles = mixing_angles(cfg.n_pairs, cfg.target_angle);
      const double area = 2.0 * pi;
      const auto a = analyze_train(angles, area, basis_state<3>(G1));
      nlohmann::json j;
      j["n_pairs"] = cfg.n_pairs;
      j["target_angle"] = cfg.target_angle;
      j["area_per_step"] = area;
      j["mixing_angles"] = angles;
      j["final_populations"] = detail::populations_json(a.final_populations);
      j["max_g2"] = a.max_g2;
      j["predicted_max_g2"] = max_intermediate_population(cfg.n_pairs, cfg.target_angle);
      j["unitarity_defect"] = unitarity_defect(a.propagator);
      for (const auto& s : a.steps) {
        j["steps"].push_back({{"k", s.k},
                              {"phi", s.phi},
                              {"max_g2", s.max_g2},
                              {"populations_after", detail::populations_json(s.after)}});
      }
      artifacts.push_back({cfg.output, "train", j.dump(2) + "\n"});
      summary["final_populations"] = j["final_populations"];
    } else if (sub == "scan-detuning") {
      const Axis d1{"delta1", cfg.axis1.min / cfg.width, cfg.axis1.max / cfg.width,
                    cfg.axis1.points};
      const Axis d2{"delta2", cfg.axis2.min / cfg.width, cfg.axis2.max / cfg.width,
                    cfg.axis2.points};
      const auto study = scan_one_photon_with_control(d1, d2, exp, {cfg.workers});
      std::ostringstream decayed, control;
      write_grid_csv(decayed, study.decayed);
      write_grid_csv(control, study.control);
      artifacts.push_back({cfg.output, "grid", decayed.str()});
      artifacts.push_back({detail::sibling(cfg.output, ".control.csv"), "control_grid",
                           control.str()});
      if (!study.decayed.errors.empty() || !study.control.errors.empty()) {
        artifacts.push_back({cfg.output + ".errors.log", "errors",
                             detail::grid_errors(study.decayed) +
                                 detail::grid_errors(study.control)});
      }
      summary["grid"] = detail::grid_summary(study.decayed);
      summary["control_grid"] = detail::grid_summary(study.control);
    } else if (sub == "scan-two-photon") {
      const Axis s1{"small_delta1", cfg.axis1.min / cfg.width, cfg.axis1.max / cfg.width,
                    cfg.axis1.points};
      const Axis s2{"small_delta2", cfg.axis2.min / cfg.width, cfg.axis2.max / cfg.width,
                    cfg.axis2.points};
      const auto grid = scan_two_photon(s1, s2, exp, {cfg.workers});
      std::ostringstream os;
      write_grid_csv(os, grid);
      artifacts.push_back({cfg.output, "grid", os.str()});
      if (!grid.errors.empty()) {
        artifacts.push_back({cfg.output + ".errors.log", "errors", detail::grid_errors(grid)});
      }
      summary["grid"] = detail::grid_summary(grid);
    } else if (sub == "n-scaling") {
      const auto rows = n_scaling(cfg.max_pairs, exp);
      std::ostringstream os;
      write_n_scaling_csv(os, rows);
      artifacts.push_back({cfg.output, "table", os.str()});
    } else {
      throw ConfigError("unknown subcommand '" + sub + "'");
    }

    for (const auto& a : artifacts) detail::write_artifact(a);
  } catch (const ConfigError& e) {
    err << error_json("config", e.what(), exit_config) << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    err << error_json("config", e.what(), exit_config) << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << error_json("numerical", e.what(), exit_numerical) << '\n';
    return exit_numerical;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  nlohmann::json manifest;
  manifest["tool"] = "cpt";
  manifest["version"] = version;
  manifest["subcommand"] = cfg.subcommand;
  manifest["config"] = serialize_config(cfg);
  manifest["versions"] = {{"cpt", version},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__}};
  for (const auto& a : artifacts) {
    manifest["outputs"].push_back({{"path", a.path},
                                   {"role", a.role},
                                   {"bytes", a.content.size()},
                                   {"sha256", sha256_hex(a.content)}});
  }
  manifest["summary"] = summary;
  manifest["wall_time_s"] = wall;
  try {
    detail::write_artifact({cfg.output + ".manifest.json", "manifest", manifest.dump(2) + "\n"});
  } catch (const ConfigError& e) {
    err << error_json("config", e.what(), exit_config) << '\n';
    return exit_config;
  }
  return exit_ok;
}

}  // namespace cpt
