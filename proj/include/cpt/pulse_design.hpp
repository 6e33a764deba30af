#pragma once

// Coincident pulse trains: mixing angles, Gaussian two-photon envelopes and the
// four physical fields that realize them after adiabatic elimination.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cpt/core_state.hpp"

namespace cpt {

/// The requested detunings cannot be realized by real field amplitudes.
class SynthesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Mixing angles phi_k = (2k-1) * target_angle / N for k = 1..N.
///
/// target_angle = pi/4 gives complete transfer g1 -> g3; smaller values leave
/// cos^2(2 * target_angle) in g1 (pi/8 for an equal split, pi/12 for 3:1).
inline std::vector<double> mixing_angles(int n_pairs, double target_angle) {
  if (n_pairs < 1) {
    throw DomainError("n_pairs must be >= 1, got " + std::to_string(n_pairs));
  }
  if (!(target_angle > 0.0 && target_angle <= pi / 4.0)) {
    throw DomainError("target_angle must lie in (0, pi/4], got " +
                      std::to_string(target_angle));
  }
  std::vector<double> angles(static_cast<std::size_t>(n_pairs));
  for (int k = 1; k <= n_pairs; ++k) {
    angles[k - 1] = (2.0 * k - 1.0) * target_angle / n_pairs;
  }
  return angles;
}

/// Peak amplitudes of the physical fields, O_a on g1-e1 / e1-g2 and O_b on
/// g2-e2 / e2-g3, such that the two-photon couplings peak at omega0.
///
/// Both detunings must share a sign; amplitudes are taken positive and built
/// from |delta|.
struct SynthesisAmplitudes {
  double amp_a = 0.0;
  double amp_b = 0.0;
};

inline SynthesisAmplitudes synthesis_amplitudes(const DetuningConfig& det,
                                                double omega0) {
  if (!det.finite()) throw DomainError("detunings must be finite");
  if (!(omega0 > 0.0)) throw DomainError("peak effective Rabi must be > 0");
  const bool same_sign = (det.delta1 > 0.0 && det.delta2 > 0.0) ||
                         (det.delta1 < 0.0 && det.delta2 < 0.0);
  if (!same_sign) {
    throw SynthesisError(
        "field synthesis requires delta1*omega0 > 0 and delta2*omega0 > 0 "
        "(equivalently zeta = delta1/delta2 > 0 with both detunings of one "
        "sign); got delta1=" +
        std::to_string(det.delta1) + ", delta2=" + std::to_string(det.delta2));
  }
  return {std::sqrt(2.0 * std::abs(det.delta1) * omega0),
          std::sqrt(2.0 * std::abs(det.delta2) * omega0)};
}

/// Design parameters of a pulse train. Times are in units where the Gaussian
/// width of the two-photon envelopes is `width`.
struct TrainDesign {
  int n_pairs = 5;
  double target_angle = pi / 4.0;
  double width = 1.0;
  double area_per_step = 2.0 * pi;
  /// Center-to-center spacing; defaults to 6 * sqrt(2) * width.
  std::optional<double> spacing;
  DetuningConfig det;
};

/// A fully resolved coincident pulse train.
struct PulseTrain {
  int n_pairs = 0;
  double target_angle = 0.0;
  std::vector<double> mixing_angles;
  double width = 1.0;
  double stretched_width = std::sqrt(2.0);
  double spacing = 0.0;
  std::vector<double> centers;
  double area_per_step = 0.0;
  double peak_effective_rabi = 0.0;
  double amp_a = 0.0;
  double amp_b = 0.0;
  DetuningConfig det;

  double t_start() const { return centers.front() - 5.0 * stretched_width; }
  double t_end() const { return centers.back() + 5.0 * stretched_width; }

  /// Minimum center spacing accepted by design_train, in units of the
  /// stretched width.
  static constexpr double min_spacing_factor = 4.0;
  static constexpr double default_spacing_factor = 6.0;
};

inline PulseTrain design_train(const TrainDesign& d) {
  PulseTrain train;
  train.n_pairs = d.n_pairs;
  train.target_angle = d.target_angle;
  train.mixing_angles = mixing_angles(d.n_pairs, d.target_angle);
  if (!(d.width > 0.0) || !std::isfinite(d.width)) {
    throw DomainError("pulse width must be finite and > 0");
  }
  if (!(d.area_per_step > 0.0) || !std::isfinite(d.area_per_step)) {
    throw DomainError("area per step must be finite and > 0");
  }
  train.width = d.width;
  train.stretched_width = std::sqrt(2.0) * d.width;
  train.spacing =
      d.spacing.value_or(PulseTrain::default_spacing_factor * train.stretched_width);
  if (!std::isfinite(train.spacing) ||
      train.spacing < PulseTrain::min_spacing_factor * train.stretched_width) {
    throw DomainError("step spacing must be >= " +
                      std::to_string(PulseTrain::min_spacing_factor) +
                      " stretched widths, got " + std::to_string(train.spacing));
  }
  train.centers.resize(train.mixing_angles.size());
  for (std::size_t k = 0; k < train.centers.size(); ++k) {
    train.centers[k] = static_cast<double>(k) * train.spacing;
  }
  train.area_per_step = d.area_per_step;
  // integral of omega0 * exp(-t^2/T^2) over the real line is omega0 * sqrt(pi) * T
  train.peak_effective_rabi = d.area_per_step / (std::sqrt(pi) * d.width);
  const auto amps = synthesis_amplitudes(d.det, train.peak_effective_rabi);
  train.amp_a = amps.amp_a;
  train.amp_b = amps.amp_b;
  train.det = d.det;
  return train;
}

/// Two-photon couplings of the ground manifold, (g1-g2, g2-g3).
struct EffectiveRabi {
  double omega_e1 = 0.0;
  double omega_e2 = 0.0;
};

namespace detail {

inline void check_step(const PulseTrain& train, int k) {
  if (k < 1 || k > train.n_pairs) {
    throw DomainError("step index " + std::to_string(k) + " outside 1.." +
                      std::to_string(train.n_pairs));
  }
}

// exp(-x^2/w^2), flushed to zero well before the denormal range.
inline double gaussian(double x, double w) {
  const double a = (x * x) / (w * w);
  return a > 700.0 ? 0.0 : std::exp(-a);
}

}  // namespace detail

/// Designed two-photon envelopes of step k (1-based) at time t.
inline EffectiveRabi gaussian_effective_envelopes(const PulseTrain& train, int k,
                                                  double t) {
  detail::check_step(train, k);
  const double phi = train.mixing_angles[k - 1];
  const double g = detail::gaussian(t - train.centers[k - 1], train.width);
  return {train.peak_effective_rabi * std::sin(phi) * g,
          train.peak_effective_rabi * std::cos(phi) * g};
}

/// Physical fields of step k at time t. All four share the profile
/// exp(-(t - tau_k)^2 / (2 T^2)) with ratio 1 : sin(phi) : cos(phi)/sqrt(zeta)
/// : 1/sqrt(zeta).
inline PhysicalRabi synthesize_physical_pulses(const PulseTrain& train, int k,
                                               double t) {
  detail::check_step(train, k);
  const double phi = train.mixing_angles[k - 1];
  const double g = detail::gaussian(t - train.centers[k - 1], train.stretched_width);
  return {train.amp_a * g, train.amp_a * std::sin(phi) * g,
          train.amp_b * std::cos(phi) * g, train.amp_b * g};
}

/// Two-photon couplings produced by O2 and O3 once O1 and O4 are slaved to
/// them so that the Stark shifts of g1, g2 and g3 coincide.
inline EffectiveRabi effective_from_physical(double omega2, double omega3,
                                             const DetuningConfig& det) {
  if (det.delta1 == 0.0 || det.delta2 == 0.0) {
    throw DomainError("effective couplings need nonzero one-photon detunings");
  }
  const double zeta = det.zeta();
  const double r1 = omega2 * omega2 + zeta * omega3 * omega3;
  const double r2 = omega3 * omega3 + omega2 * omega2 / zeta;
  if (r1 < 0.0 || r2 < 0.0) {
    throw DomainError("negative zeta makes the slaved amplitudes imaginary");
  }
  return {-omega2 * std::sqrt(r1) / (2.0 * det.delta1),
          -omega3 * std::sqrt(r2) / (2.0 * det.delta2)};
}

/// Closed-form sampler for the whole train.
///
/// O2 and O3 are sums of the per-step pulses. O1 and O4 are then set from
/// O1 = sqrt(zeta) O4 = sqrt(O2^2 + zeta O3^2), which equals the per-step
/// synthesis wherever a single step dominates and keeps the Stark shifts equal
/// in the tails where neighbouring steps overlap.
class RabiSchedule {
 public:
  explicit RabiSchedule(PulseTrain train) : train_(std::move(train)) {
    zeta_ = train_.det.zeta();
    sqrt_zeta_ = std::sqrt(zeta_);
    for (double phi : train_.mixing_angles) {
      sin_.push_back(std::sin(phi));
      cos_.push_back(std::cos(phi));
    }
  }

  const PulseTrain& train() const { return train_; }

  PhysicalRabi physical(double t) const {
    double o2 = 0.0;
    double o3 = 0.0;
    for (std::size_t k = 0; k < sin_.size(); ++k) {
      const double g = detail::gaussian(t - train_.centers[k], train_.stretched_width);
      if (g == 0.0) continue;
      o2 += train_.amp_a * sin_[k] * g;
      o3 += train_.amp_b * cos_[k] * g;
    }
    const double o1 = std::sqrt(o2 * o2 + zeta_ * o3 * o3);
    return {o1, o2, o3, o1 / sqrt_zeta_};
  }

  EffectiveRabi effective(double t) const {
    EffectiveRabi e;
    for (std::size_t k = 0; k < sin_.size(); ++k) {
      const double g = detail::gaussian(t - train_.centers[k], train_.width);
      if (g == 0.0) continue;
      e.omega_e1 += train_.peak_effective_rabi * sin_[k] * g;
      e.omega_e2 += train_.peak_effective_rabi * cos_[k] * g;
    }
    return e;
  }

  double t_start() const { return train_.t_start(); }
  double t_end() const { return train_.t_end(); }

 private:
  PulseTrain train_;
  double zeta_ = 1.0;
  double sqrt_zeta_ = 1.0;
  std::vector<double> sin_;
  std::vector<double> cos_;
};

/// Five-state Hamiltonian at time t driven by the physical fields of
/// `schedule`. `det` may differ from the detunings the train was designed
/// for (two-photon detuning scans keep the baseline fields).
inline HamiltonianMatrix<5> build_full_hamiltonian(double t,
                                                   const RabiSchedule& schedule,
                                                   const DetuningConfig& det,
                                                   const DecayConfig& decay) {
  return build_full_hamiltonian(schedule.physical(t), det, decay);
}

/// Writes `samples` evenly spaced rows covering the train window.
/// Columns: t, omega1..omega4 (physical), omega_e1, omega_e2 (designed
/// two-photon envelopes).
inline void write_schedule_csv(std::ostream& os, const RabiSchedule& schedule,
                               std::size_t samples) {
  if (samples < 2) throw DomainError("schedule export needs >= 2 samples");
  const auto old_precision = os.precision(17);
  os << "t,omega1,omega2,omega3,omega4,omega_e1,omega_e2\n";
  const double t0 = schedule.t_start();
  const double span = schedule.t_end() - t0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + span * static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto p = schedule.physical(t);
    const auto e = schedule.effective(t);
    os << t << ',' << p.omega1 << ',' << p.omega2 << ',' << p.omega3 << ','
       << p.omega4 << ',' << e.omega_e1 << ',' << e.omega_e2 << '\n';
  }
  os.precision(old_precision);
}

}  // namespace cpt
