#pragma once

// Figure-level experiments: single trajectories, detuning scans and the
// N-scaling of the intermediate-state transient.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cpt/analytic_propagator.hpp"
#include "cpt/core_state.hpp"
#include "cpt/dynamics.hpp"
#include "cpt/pulse_design.hpp"

namespace cpt {

struct ExperimentConfig {
  int n_pairs = 5;
  double target_angle = pi / 4.0;
  /// One-photon detunings define the fields; the two-photon detunings only
  /// shift the ground levels of the propagated Hamiltonian.
  DetuningConfig det;
  DecayConfig decay;
  double width = 1.0;
  std::optional<double> spacing;
  double dt = 1e-3;
  std::size_t output_samples = 2000;
};

inline RabiSchedule make_schedule(const ExperimentConfig& cfg) {
  TrainDesign d;
  d.n_pairs = cfg.n_pairs;
  d.target_angle = cfg.target_angle;
  d.width = cfg.width;
  d.spacing = cfg.spacing;
  d.det = cfg.det;
  return RabiSchedule(design_train(d));
}

inline IntegrationOptions integration_options(const ExperimentConfig& cfg) {
  IntegrationOptions o;
  o.dt = cfg.dt;
  o.output_samples = cfg.output_samples;
  return o;
}

/// Five-state trajectory from g1 under the synthesized fields.
inline SimulationResult<5> run_dynamics_experiment(const ExperimentConfig& cfg) {
  cfg.decay.validate();
  if (!cfg.det.finite()) throw DomainError("detunings must be finite");
  const RabiSchedule schedule = make_schedule(cfg);
  const DetuningConfig det = cfg.det;
  const DecayConfig decay = cfg.decay;
  auto h = [&](double t) { return full_hamiltonian(schedule.physical(t), det, decay); };
  return integrate<5>(basis_state<5>(g1), h, {schedule.t_start(), schedule.t_end()},
                      integration_options(cfg));
}

/// Ground-manifold trajectory from g1 under the designed two-photon envelopes
/// with the common Stark shift removed.
inline SimulationResult<3> run_effective_experiment(const ExperimentConfig& cfg) {
  const RabiSchedule schedule = make_schedule(cfg);
  auto h = [&](double t) { return resonant_lambda_hamiltonian(schedule.effective(t)); };
  return integrate<3>(basis_state<3>(G1), h, {schedule.t_start(), schedule.t_end()},
                      integration_options(cfg));
}

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 1;

  double value(std::size_t i) const {
    if (points == 1) return min;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
  }

  void validate() const {
    if (points < 1) throw DomainError("axis " + name + " needs >= 1 point");
    if (!std::isfinite(min) || !std::isfinite(max) || max < min) {
      throw DomainError("axis " + name + " needs finite min <= max");
    }
  }
};

/// Dense grid of one observable, row-major in (axis1, axis2). Failed cells
/// hold NaN and an entry in `errors`.
struct ScanGrid {
  Axis axis1;
  Axis axis2;
  std::string observable;
  std::vector<double> values;
  std::vector<std::string> errors;

  double at(std::size_t i, std::size_t j) const { return values[i * axis2.points + j]; }
};

struct ScanOptions {
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

/// Evaluates `cell(v1, v2)` on every grid point. Cells are claimed from a
/// shared counter and written by index, so the result does not depend on the
/// number of workers or the order of completion.
inline ScanGrid evaluate_grid(const Axis& axis1, const Axis& axis2,
                              std::string observable,
                              const std::function<double(double, double)>& cell,
                              const ScanOptions& opts = {}) {
  axis1.validate();
  axis2.validate();
  ScanGrid grid{axis1, axis2, std::move(observable), {}, {}};
  const std::size_t total = axis1.points * axis2.points;
  grid.values.assign(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> messages(total);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const std::size_t i = idx / axis2.points;
      const std::size_t j = idx % axis2.points;
      try {
        grid.values[idx] = cell(axis1.value(i), axis2.value(j));
      } catch (const std::exception& e) {
        messages[idx] = e.what();
      }
    }
  };

  std::size_t workers = opts.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, total);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t idx = 0; idx < total; ++idx) {
    if (messages[idx].empty()) continue;
    grid.errors.push_back(std::to_string(idx / axis2.points) + "," +
                          std::to_string(idx % axis2.points) + ": " + messages[idx]);
  }
  return grid;
}

/// Final g3 population over (delta1, delta2); zeta follows each point.
inline ScanGrid scan_one_photon(const Axis& delta1, const Axis& delta2,
                                const ExperimentConfig& base,
                                const ScanOptions& opts = {}) {
  auto cell = [&](double d1, double d2) {
    ExperimentConfig cfg = base;
    cfg.det.delta1 = d1;
    cfg.det.delta2 = d2;
    cfg.output_samples = 1;
    return run_dynamics_experiment(cfg).final_populations[g3];
  };
  return evaluate_grid(delta1, delta2, "P_g3", cell, opts);
}

/// A decayed one-photon scan and its closed-system control on the same grid.
struct DecayStudy {
  ScanGrid decayed;
  ScanGrid control;
};

inline DecayStudy scan_one_photon_with_control(const Axis& delta1,
                                               const Axis& delta2,
                                               const ExperimentConfig& base,
                                               const ScanOptions& opts = {}) {
  ExperimentConfig closed = base;
  closed.decay = {};
  return {scan_one_photon(delta1, delta2, base, opts),
          scan_one_photon(delta1, delta2, closed, opts)};
}

/// Final g3 population over (small_delta1, small_delta2) with the fields of
/// the baseline train held fixed.
inline ScanGrid scan_two_photon(const Axis& small_delta1, const Axis& small_delta2,
                                const ExperimentConfig& base,
                                const ScanOptions& opts = {}) {
  auto cell = [&](double s1, double s2) {
    ExperimentConfig cfg = base;
    cfg.det.small_delta1 = s1;
    cfg.det.small_delta2 = s2;
    cfg.output_samples = 1;
    return run_dynamics_experiment(cfg).final_populations[g3];
  };
  return evaluate_grid(small_delta1, small_delta2, "P_g3", cell, opts);
}

/// Long-format grid CSV with axis metadata comments.
inline void write_grid_csv(std::ostream& os, const ScanGrid& grid) {
  const auto old_precision = os.precision(17);
  auto meta = [&](const char* key, const Axis& a) {
    os << "# " << key << '=' << a.name << ",min=" << a.min << ",max=" << a.max
       << ",points=" << a.points << '\n';
  };
  meta("axis1", grid.axis1);
  meta("axis2", grid.axis2);
  os << "# observable=" << grid.observable << '\n';
  os << grid.axis1.name << ',' << grid.axis2.name << ',' << grid.observable << '\n';
  for (std::size_t i = 0; i < grid.axis1.points; ++i) {
    for (std::size_t j = 0; j < grid.axis2.points; ++j) {
      os << grid.axis1.value(i) << ',' << grid.axis2.value(j) << ',';
      const double v = grid.at(i, j);
      if (std::isnan(v)) {
        os << "nan";
      } else {
        os << v;
      }
      os << '\n';
    }
  }
  os.precision(old_precision);
}

struct NScalingRow {
  int n_pairs = 0;
  double predicted = 0.0;
  double measured_full = 0.0;
  double measured_effective = 0.0;
};

/// Predicted sin^2(target/N) against the measured g2 maximum of the five-state
/// and effective three-state runs, for N = 1..max_pairs.
inline std::vector<NScalingRow> n_scaling(int max_pairs, const ExperimentConfig& base) {
  if (max_pairs < 1) throw DomainError("max_pairs must be >= 1");
  std::vector<NScalingRow> rows;
  for (int n = 1; n <= max_pairs; ++n) {
    ExperimentConfig cfg = base;
    cfg.n_pairs = n;
    cfg.output_samples = 1;
    NScalingRow row;
    row.n_pairs = n;
    row.predicted = max_intermediate_population(n, cfg.target_angle);
    row.measured_full = run_dynamics_experiment(cfg).max_transients[g2];
    row.measured_effective = run_effective_experiment(cfg).max_transients[G2];
    rows.push_back(row);
  }
  return rows;
}

inline void write_n_scaling_csv(std::ostream& os, const std::vector<NScalingRow>& rows) {
  const auto old_precision = os.precision(17);
  os << "N,predicted,measured_full,measured_effective\n";
  for (const auto& r : rows) {
    os << r.n_pairs << ',' << r.predicted << ',' << r.measured_full << ','
       << r.measured_effective << '\n';
  }
  os.precision(old_precision);
}

}  // namespace cpt
