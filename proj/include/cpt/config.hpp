#pragma once

// Run configuration for the command-line front end. Values come from flags
// and/or a key=value config file; flags win over file values.
//
// Units: time-like quantities (width, dt, spacing) are in units of T and
// rates (detunings, decay rates) in units of 1/T, where T is the Gaussian
// width of the two-photon envelopes. Changing T rescales both.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpt/core_state.hpp"
#include "cpt/experiments.hpp"

namespace cpt {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by parse_config for --help; carries the rendered help text.
struct HelpRequested {
  std::string text;
};

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 41;

  bool operator==(const GridSpec&) const = default;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "design", "evolve", "train", "scan-detuning", "scan-two-photon", "n-scaling"};
  return names;
}

struct RunConfig {
  std::string subcommand;
  int n_pairs = 5;
  double target_angle = pi / 4.0;
  double delta1 = 300.0;
  double delta2 = 300.0;
  double small_delta1 = 0.0;
  double small_delta2 = 0.0;
  double gamma_e1 = 0.0;
  double gamma_g2 = 0.0;
  double gamma_e2 = 0.0;
  double width = 1.0;
  double dt = 1e-3;
  double spacing = PulseTrain::default_spacing_factor * std::sqrt(2.0);
  std::size_t samples = 2000;
  std::string model = "full";
  GridSpec axis1;
  GridSpec axis2;
  int max_pairs = 10;
  std::size_t workers = 0;
  std::string output;

  bool operator==(const RunConfig&) const = default;
};

/// Accepts a plain number or the forms "pi", "pi/K" and "M*pi/K".
inline double parse_angle(const std::string& text) {
  const auto pos = text.find("pi");
  try {
    if (pos == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    double factor = 1.0;
    if (pos > 0) {
      std::string head = text.substr(0, pos);
      if (head.back() != '*') throw std::invalid_argument(text);
      head.pop_back();
      std::size_t used = 0;
      factor = std::stod(head, &used);
      if (used != head.size()) throw std::invalid_argument(text);
    }
    std::string tail = text.substr(pos + 2);
    if (tail.empty()) return factor * pi;
    if (tail.front() != '/') throw std::invalid_argument(text);
    tail.erase(0, 1);
    std::size_t used = 0;
    const double div = std::stod(tail, &used);
    if (used != tail.size() || div == 0.0) throw std::invalid_argument(text);
    return factor * pi / div;
  } catch (const std::logic_error&) {
    throw ConfigError("target-angle: cannot parse '" + text +
                      "'; expected a number in radians or pi/K");
  }
}

namespace detail {

inline const CLI::Validator& finite_number() {
  static const CLI::Validator v(
      [](std::string& s) -> std::string {
        try {
          if (!std::isfinite(std::stod(s))) return "value must be finite, got " + s;
        } catch (const std::exception&) {
          return "not a number: " + s;
        }
        return {};
      },
      "FINITE");
  return v;
}

inline GridSpec default_grid(const std::string& sub) {
  if (sub == "scan-two-photon") return {-1.0, 1.0, 41};
  return {100.0, 600.0, 41};
}

inline std::string default_output(const std::string& sub) {
  if (sub == "train") return "train.json";
  return sub + ".csv";
}

}  // namespace detail

/// Parses argv-style arguments (without the program name). The first
/// positional token selects the subcommand.
inline RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Coincident pulse trains in a five-state chainwise system", "cpt"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key=value config file; flags override its values");
  app.require_subcommand(1, 1);
  app.fallthrough();

  for (const auto& name : subcommands()) app.add_subcommand(name, "")->fallthrough();
  app.get_subcommand("design")->description("write the synthesized pulse schedule (CSV)");
  app.get_subcommand("evolve")->description("integrate one trajectory (CSV)");
  app.get_subcommand("train")->description("analytic train propagator summary (JSON)");
  app.get_subcommand("scan-detuning")
      ->description("final P_g3 over (delta1, delta2), decayed and closed grids (CSV)");
  app.get_subcommand("scan-two-photon")
      ->description("final P_g3 over (small-delta1, small-delta2) (CSV)");
  app.get_subcommand("n-scaling")->description("g2 transient maximum against N (CSV)");

  const auto& finite = detail::finite_number();
  std::string angle_text = "pi/4";
  std::optional<double> zeta;
  double spacing = 0.0;
  GridSpec a1;
  GridSpec a2;

  app.add_option("--n-pairs", cfg.n_pairs, "number of pulse pairs N")
      ->check(CLI::Range(1, 1000));
  app.add_option("--target-angle", angle_text,
                 "target angle in (0, pi/4]; pi/4 full transfer, pi/8 equal split");
  auto* o_d1 = app.add_option("--delta1", cfg.delta1, "one-photon detuning of e1 [1/T]")
                   ->check(finite);
  auto* o_d2 = app.add_option("--delta2", cfg.delta2, "one-photon detuning of e2 [1/T]")
                   ->check(finite);
  auto* o_zeta = app.add_option("--zeta", zeta, "delta1/delta2; combine with one detuning")
                     ->check(finite);
  app.add_option("--small-delta1", cfg.small_delta1, "two-photon detuning g1-g2 [1/T]")
      ->check(finite);
  app.add_option("--small-delta2", cfg.small_delta2, "two-photon detuning g2-g3 [1/T]")
      ->check(finite);
  app.add_option("--gamma-e1", cfg.gamma_e1, "decay rate of e1 [1/T]")
      ->check(CLI::NonNegativeNumber & finite);
  app.add_option("--gamma-g2", cfg.gamma_g2, "decay rate of g2 [1/T]")
      ->check(CLI::NonNegativeNumber & finite);
  app.add_option("--gamma-e2", cfg.gamma_e2, "decay rate of e2 [1/T]")
      ->check(CLI::NonNegativeNumber & finite);
  app.add_option("--width", cfg.width, "envelope width T (sets the unit)")
      ->check(CLI::PositiveNumber & finite);
  app.add_option("--dt", cfg.dt, "integration step [T]")
      ->check(CLI::Range(1e-6, 0.1) & finite);
  auto* o_spacing = app.add_option("--spacing", spacing,
                                   "center-to-center step spacing [T], >= 4*sqrt(2)")
                        ->check(CLI::Range(4.0 * std::sqrt(2.0), 1e6) & finite);
  app.add_option("--samples", cfg.samples, "stored samples per trajectory")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  app.add_option("--model", cfg.model, "evolve model")
      ->check(CLI::IsMember({"full", "effective"}));
  auto* o_a1min = app.add_option("--axis1-min", a1.min, "first scan axis lower bound")
                      ->check(finite);
  auto* o_a1max = app.add_option("--axis1-max", a1.max, "first scan axis upper bound")
                      ->check(finite);
  auto* o_a1pts = app.add_option("--axis1-points", a1.points, "first scan axis points")
                      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  auto* o_a2min = app.add_option("--axis2-min", a2.min, "second scan axis lower bound")
                      ->check(finite);
  auto* o_a2max = app.add_option("--axis2-max", a2.max, "second scan axis upper bound")
                      ->check(finite);
  auto* o_a2pts = app.add_option("--axis2-points", a2.points, "second scan axis points")
                      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  app.add_option("--max-pairs", cfg.max_pairs, "largest N for n-scaling")
      ->check(CLI::Range(1, 200));
  app.add_option("--workers", cfg.workers, "scan worker threads, 0 = CPU count");
  auto* o_out = app.add_option("--output,-o", cfg.output, "output file path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

  cfg.target_angle = parse_angle(angle_text);
  if (!(cfg.target_angle > 0.0 && cfg.target_angle <= pi / 4.0 + 1e-15)) {
    throw ConfigError("target-angle: must lie in (0, pi/4], got " + angle_text);
  }

  const bool has_d1 = o_d1->count() > 0;
  const bool has_d2 = o_d2->count() > 0;
  if (o_zeta->count() > 0) {
    if (has_d1 && has_d2) {
      throw ConfigError(
          "zeta, delta1 and delta2 are redundant: give delta1 and delta2, or zeta "
          "with at most one of them");
    }
    if (!(*zeta > 0.0)) throw ConfigError("zeta: must be > 0");
    if (has_d1) {
      cfg.delta2 = cfg.delta1 / *zeta;
    } else {
      cfg.delta1 = *zeta * cfg.delta2;
    }
  }
  if (cfg.delta1 == 0.0 || cfg.delta2 == 0.0) {
    throw ConfigError("delta1, delta2: must be nonzero");
  }
  if ((cfg.delta1 > 0.0) != (cfg.delta2 > 0.0)) {
    throw ConfigError("delta1, delta2: must share a sign (zeta > 0)");
  }

  cfg.spacing = o_spacing->count() > 0
                    ? spacing
                    : PulseTrain::default_spacing_factor * std::sqrt(2.0);

  const GridSpec def = detail::default_grid(cfg.subcommand);
  cfg.axis1 = {o_a1min->count() ? a1.min : def.min, o_a1max->count() ? a1.max : def.max,
               o_a1pts->count() ? a1.points : def.points};
  cfg.axis2 = {o_a2min->count() ? a2.min : def.min, o_a2max->count() ? a2.max : def.max,
               o_a2pts->count() ? a2.points : def.points};
  if (cfg.axis1.max < cfg.axis1.min) throw ConfigError("axis1-max: must be >= axis1-min");
  if (cfg.axis2.max < cfg.axis2.min) throw ConfigError("axis2-max: must be >= axis2-min");

  if (o_out->count() == 0) cfg.output = detail::default_output(cfg.subcommand);
  return cfg;
}

/// key=value text accepted back by `--config`. The subcommand is written as a
/// comment since it is selected on the command line.
inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "# subcommand: " << c.subcommand << '\n';
  os << "n-pairs=" << c.n_pairs << '\n';
  os << "target-angle=" << c.target_angle << '\n';
  os << "delta1=" << c.delta1 << '\n';
  os << "delta2=" << c.delta2 << '\n';
  os << "small-delta1=" << c.small_delta1 << '\n';
  os << "small-delta2=" << c.small_delta2 << '\n';
  os << "gamma-e1=" << c.gamma_e1 << '\n';
  os << "gamma-g2=" << c.gamma_g2 << '\n';
  os << "gamma-e2=" << c.gamma_e2 << '\n';
  os << "width=" << c.width << '\n';
  os << "dt=" << c.dt << '\n';
  os << "spacing=" << c.spacing << '\n';
  os << "samples=" << c.samples << '\n';
  os << "model=\"" << c.model << "\"\n";
  os << "axis1-min=" << c.axis1.min << '\n';
  os << "axis1-max=" << c.axis1.max << '\n';
  os << "axis1-points=" << c.axis1.points << '\n';
  os << "axis2-min=" << c.axis2.min << '\n';
  os << "axis2-max=" << c.axis2.max << '\n';
  os << "axis2-points=" << c.axis2.points << '\n';
  os << "max-pairs=" << c.max_pairs << '\n';
  os << "workers=" << c.workers << '\n';
  os << "output=\"" << c.output << "\"\n";
  return os.str();
}

/// Converts the T-relative config into absolute experiment parameters.
inline ExperimentConfig to_experiment(const RunConfig& c) {
  ExperimentConfig e;
  const double t_unit = c.width;
  e.n_pairs = c.n_pairs;
  e.target_angle = c.target_angle;
  e.det = {c.delta1 / t_unit, c.delta2 / t_unit, c.small_delta1 / t_unit,
           c.small_delta2 / t_unit};
  e.decay = {c.gamma_e1 / t_unit, c.gamma_g2 / t_unit, c.gamma_e2 / t_unit};
  e.width = t_unit;
  e.spacing = c.spacing * t_unit;
  e.dt = c.dt * t_unit;
  e.output_samples = c.samples;
  return e;
}

}  // namespace cpt
