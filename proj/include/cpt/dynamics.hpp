#pragma once

// Fixed-step RK4 integration of i dc/dt = H(t) c, the adiabatically
// eliminated ground-manifold Hamiltonian and diagnostics for that reduction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cpt/core_state.hpp"
#include "cpt/pulse_design.hpp"

namespace cpt {

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

struct IntegrationOptions {
  /// Upper bound on the step; the window is split into ceil(span / dt) equal
  /// steps.
  double dt = 1e-3;
  /// Number of stored samples after the initial one.
  std::size_t output_samples = 2000;
  /// Largest accepted dt * ||H(t)||. RK4 stays stable on an imaginary
  /// spectrum up to 2 sqrt(2).
  double max_step_phase = 1.0;
  bool record_amplitudes = false;
};

template <int Dim>
struct SimulationResult {
  std::vector<double> times;
  std::vector<Populations<Dim>> populations;
  std::vector<double> norms;
  /// Filled only with IntegrationOptions::record_amplitudes.
  std::vector<StateVector<Dim>> amplitudes;
  /// Per-level maxima over every integration step, not only stored samples.
  Populations<Dim> max_transients{};
  Populations<Dim> final_populations{};
  StateVector<Dim> final_state;
  double norm_loss = 0.0;
  std::size_t steps = 0;
  double dt = 0.0;
};

namespace detail {

// Cheap upper bound on the spectral norm: max row sum of |Re| + |Im|.
template <int Dim>
double norm_bound(const HamiltonianMatrix<Dim>& h) {
  return (h.real().cwiseAbs() + h.imag().cwiseAbs()).rowwise().sum().maxCoeff();
}

}  // namespace detail

/// Classical RK4 on i dc/dt = H(t) c. `hamiltonian_of_t` is any callable
/// double -> HamiltonianMatrix<Dim>, sampled at t, t + dt/2 and t + dt.
template <int Dim, class Source>
SimulationResult<Dim> integrate(const StateVector<Dim>& initial,
                                Source&& hamiltonian_of_t, TimeWindow window,
                                const IntegrationOptions& opts = {}) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) {
    throw DomainError("dt must be finite and > 0");
  }
  if (!(window.end > window.start) || !std::isfinite(window.start) ||
      !std::isfinite(window.end)) {
    throw DomainError("integration window must satisfy start < end");
  }
  if (std::abs(initial.squaredNorm() - 1.0) > 1e-10) {
    throw DomainError("initial state must be normalized");
  }

  const double span = window.end - window.start;
  const auto steps = static_cast<std::size_t>(std::ceil(span / opts.dt - 1e-9));
  const double dt = span / static_cast<double>(steps);
  const std::size_t stride =
      std::max<std::size_t>(1, steps / std::max<std::size_t>(1, opts.output_samples));
  const cplx minus_i(0.0, -1.0);

  SimulationResult<Dim> out;
  out.steps = steps;
  out.dt = dt;

  StateVector<Dim> c = initial;
  auto record = [&](double t) {
    out.times.push_back(t);
    out.populations.push_back(populations(c));
    out.norms.push_back(c.squaredNorm());
    if (opts.record_amplitudes) out.amplitudes.push_back(c);
  };
  auto track_max = [&] {
    for (int i = 0; i < Dim; ++i) {
      out.max_transients[i] = std::max(out.max_transients[i], std::norm(c(i)));
    }
  };

  record(window.start);
  track_max();

  HamiltonianMatrix<Dim> h0 = hamiltonian_of_t(window.start);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = window.start + dt * static_cast<double>(n);
    const double t_next =
        n + 1 == steps ? window.end : window.start + dt * static_cast<double>(n + 1);
    const HamiltonianMatrix<Dim> hm = hamiltonian_of_t(t + 0.5 * dt);
    const HamiltonianMatrix<Dim> h1 = hamiltonian_of_t(t_next);

    const double phase = dt * detail::norm_bound(hm);
    if (!(phase < opts.max_step_phase)) {
      std::ostringstream msg;
      msg << "step too large: dt*||H|| = " << phase << " at t = " << t
          << " exceeds " << opts.max_step_phase << "; reduce dt";
      throw NumericalError(msg.str());
    }

    const StateVector<Dim> k1 = minus_i * (h0 * c);
    const StateVector<Dim> k2 = minus_i * (hm * (c + (0.5 * dt) * k1));
    const StateVector<Dim> k3 = minus_i * (hm * (c + (0.5 * dt) * k2));
    const StateVector<Dim> k4 = minus_i * (h1 * (c + dt * k3));
    c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!std::isfinite(c.squaredNorm())) {
      std::ostringstream msg;
      msg << "non-finite amplitude at t = " << t_next << " after step " << n + 1;
      throw NumericalError(msg.str());
    }
    track_max();
    if ((n + 1) % stride == 0 || n + 1 == steps) record(t_next);
    h0 = h1;
  }

  out.final_state = c;
  out.final_populations = populations(c);
  out.norm_loss = std::clamp(1.0 - c.squaredNorm(), 0.0, 1.0);
  return out;
}

/// Ground-manifold Hamiltonian after eliminating e1 and e2:
/// (1/2) [[D1, Oe1, 0], [Oe1, D2, Oe2], [0, Oe2, D3]] with two-photon
/// couplings Oe1 = -O1 O2 / (2 delta1), Oe2 = -O3 O4 / (2 delta2) and Stark
/// shifts D1 = -O1^2/(2 delta1), D2 = -O2^2/(2 delta1) - O3^2/(2 delta2),
/// D3 = -O4^2/(2 delta2).
inline HamiltonianMatrix<3> effective_hamiltonian(const PhysicalRabi& r,
                                                  const DetuningConfig& det) {
  if (det.delta1 == 0.0 || det.delta2 == 0.0) {
    throw DomainError("adiabatic elimination needs nonzero one-photon detunings");
  }
  const double a1 = 2.0 * det.delta1;
  const double a2 = 2.0 * det.delta2;
  HamiltonianMatrix<3> h = HamiltonianMatrix<3>::Zero();
  h(0, 0) = -r.omega1 * r.omega1 / a1;
  h(1, 1) = -r.omega2 * r.omega2 / a1 - r.omega3 * r.omega3 / a2;
  h(2, 2) = -r.omega4 * r.omega4 / a2;
  h(0, 1) = h(1, 0) = -r.omega1 * r.omega2 / a1;
  h(1, 2) = h(2, 1) = -r.omega3 * r.omega4 / a2;
  return 0.5 * h;
}

/// Resonant ground-manifold Hamiltonian with the common Stark shift removed.
inline HamiltonianMatrix<3> resonant_lambda_hamiltonian(const EffectiveRabi& e) {
  HamiltonianMatrix<3> h = HamiltonianMatrix<3>::Zero();
  h(0, 1) = h(1, 0) = 0.5 * e.omega_e1;
  h(1, 2) = h(2, 1) = 0.5 * e.omega_e2;
  return h;
}

/// Smallest ratio of one-photon detuning to local Rabi frequency over a
/// schedule. Infinite when the fields vanish.
struct AeMargins {
  double margin1 = std::numeric_limits<double>::infinity();
  double margin2 = std::numeric_limits<double>::infinity();

  enum class Verdict { good, marginal, poor };

  double min() const { return std::min(margin1, margin2); }

  Verdict verdict() const {
    if (min() >= 10.0) return Verdict::good;
    if (min() >= 5.0) return Verdict::marginal;
    return Verdict::poor;
  }
};

inline const char* to_string(AeMargins::Verdict v) {
  switch (v) {
    case AeMargins::Verdict::good: return "good";
    case AeMargins::Verdict::marginal: return "marginal";
    case AeMargins::Verdict::poor: return "poor";
  }
  return "unknown";
}

/// Evaluates the large-detuning margins on a uniform grid of `samples` points
/// plus every step center.
inline AeMargins ae_validity(const RabiSchedule& schedule,
                             const DetuningConfig& det,
                             std::size_t samples = 20001) {
  double peak1 = 0.0;
  double peak2 = 0.0;
  auto visit = [&](double t) {
    const auto r = schedule.physical(t);
    peak1 = std::max(peak1, std::hypot(r.omega1, r.omega2));
    peak2 = std::max(peak2, std::hypot(r.omega3, r.omega4));
  };
  const double t0 = schedule.t_start();
  const double span = schedule.t_end() - t0;
  for (std::size_t i = 0; i < samples; ++i) {
    visit(t0 + span * static_cast<double>(i) / static_cast<double>(samples - 1));
  }
  for (double tau : schedule.train().centers) visit(tau);

  AeMargins m;
  if (peak1 > 0.0) m.margin1 = std::abs(det.delta1) / peak1;
  if (peak2 > 0.0) m.margin2 = std::abs(det.delta2) / peak2;
  return m;
}

/// Strips the common phase accumulated from a shared diagonal energy shift:
/// returns c'(t) = c(t) exp(+i Theta(t)) with Theta(t) the trapezoidal
/// integral of `shift` from times[0] to t. For a constant shift this is
/// c(t) = c'(t) exp(-i shift (t - t0)).
template <int Dim>
std::vector<StateVector<Dim>> remove_global_phase(
    std::span<const double> times, std::span<const StateVector<Dim>> amplitudes,
    std::span<const double> shift) {
  if (times.size() != amplitudes.size() || times.size() != shift.size()) {
    throw DomainError("times, amplitudes and shifts must have equal length");
  }
  std::vector<StateVector<Dim>> out;
  out.reserve(amplitudes.size());
  double theta = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0) theta += 0.5 * (shift[i] + shift[i - 1]) * (times[i] - times[i - 1]);
    out.push_back(amplitudes[i] * std::polar(1.0, theta));
  }
  return out;
}

/// Trajectory CSV: t, one population column per level, norm.
template <int Dim>
void write_trajectory_csv(std::ostream& os, const SimulationResult<Dim>& r) {
  const auto old_precision = os.precision(17);
  if constexpr (Dim == 5) {
    os << "t,P_g1,P_e1,P_g2,P_e2,P_g3,norm\n";
  } else {
    os << "t,P_g1,P_g2,P_g3,norm\n";
  }
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    os << r.times[i];
    for (double p : r.populations[i]) os << ',' << p;
    os << ',' << r.norms[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace cpt
