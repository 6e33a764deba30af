#pragma once

// Exact propagator of the resonant three-state ground manifold driven by two
// couplings with a common time profile, and its composition over a train.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "cpt/core_state.hpp"
#include "cpt/pulse_design.hpp"

namespace cpt {

using Matrix3c = HamiltonianMatrix<3>;

struct StepPropagator {
  Matrix3c matrix;
  double phi = 0.0;
  double area = 0.0;
};

/// Propagator of one step with mixing angle phi (tan phi = O_e1 / O_e2) and
/// rms area A, in the basis (g1, g2, g3).
///
/// In the bright/dark basis b = sin(phi) g1 + cos(phi) g3, d = cos(phi) g1 -
/// sin(phi) g3 the step is a resonant two-level rotation of (b, g2) by A/2
/// while d stays put, which fixes the g1-g3 corner at -sin(2 phi) sin^2(A/4).
inline StepPropagator step_propagator(double phi, double area) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double half = std::sin(area / 2.0);
  const double quarter2 = std::pow(std::sin(area / 4.0), 2);
  const cplx i(0.0, 1.0);

  Matrix3c u;
  u(0, 0) = 1.0 - 2.0 * s * s * quarter2;
  u(1, 1) = std::cos(area / 2.0);
  u(2, 2) = 1.0 - 2.0 * c * c * quarter2;
  u(0, 1) = u(1, 0) = -i * s * half;
  u(1, 2) = u(2, 1) = -i * c * half;
  u(0, 2) = u(2, 0) = -std::sin(2.0 * phi) * quarter2;
  return {u, phi, area};
}

/// U(phi_N) ... U(phi_1), every step with the same rms area.
inline Matrix3c train_propagator(std::span<const double> angles,
                                 double area_per_step) {
  if (angles.empty()) throw DomainError("train needs at least one step");
  Matrix3c u = Matrix3c::Identity();
  for (double phi : angles) u = step_propagator(phi, area_per_step).matrix * u;
  return u;
}

/// Peak g2 population of a train designed for target_angle:
/// sin^2(target_angle / N).
inline double max_intermediate_population(int n_pairs, double target_angle) {
  if (n_pairs < 1) throw DomainError("n_pairs must be >= 1");
  return std::pow(std::sin(target_angle / n_pairs), 2);
}

/// Largest deviation of U^dagger U from the identity.
inline double unitarity_defect(const Matrix3c& u) {
  return (u.adjoint() * u - Matrix3c::Identity()).cwiseAbs().maxCoeff();
}

/// Quadrature of sqrt(O_e1^2 + O_e2^2) over the window of step k, which runs
/// half a spacing either side of its center.
inline double rms_pulse_area(const RabiSchedule& schedule, int k) {
  const auto& train = schedule.train();
  if (k < 1 || k > train.n_pairs) throw DomainError("step index out of range");
  const double tau = train.centers[k - 1];
  const double half = 0.5 * train.spacing;
  auto rms = [&](double t) {
    const auto e = schedule.effective(t);
    return std::hypot(e.omega_e1, e.omega_e2);
  };
  // split at the peak so the adaptive rule sees two smooth halves
  using quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  return quad::integrate(rms, tau - half, tau, 15, 1e-13) +
         quad::integrate(rms, tau, tau + half, 15, 1e-13);
}

/// Running area of a Gaussian step from -infinity up to t.
inline double partial_area(const PulseTrain& train, int k, double t) {
  const double x = (t - train.centers[k - 1]) / train.width;
  return 0.5 * train.area_per_step * (1.0 + boost::math::erf(x));
}

/// Largest g2 population reached while step (phi, A in [0, 2 pi]) acts on psi.
///
/// The g2 amplitude is cos(A/2) psi_2 - i sin(A/2) <b|psi>, a rotation in a
/// real 2-plane, so its maximum squared modulus is the top eigenvalue of a
/// 2x2 Gram matrix.
inline double step_transient_max(double phi, const StateVector<3>& psi) {
  const cplx a = psi(1);
  const cplx b = cplx(0.0, -1.0) * (std::sin(phi) * psi(0) + std::cos(phi) * psi(2));
  const double m11 = std::norm(a);
  const double m22 = std::norm(b);
  const double m12 = std::real(std::conj(a) * b);
  const double mean = 0.5 * (m11 + m22);
  const double diff = 0.5 * (m11 - m22);
  return mean + std::sqrt(diff * diff + m12 * m12);
}

struct StepSummary {
  int k = 0;
  double phi = 0.0;
  double max_g2 = 0.0;
  Populations<3> after{};
};

struct TrainAnalysis {
  Matrix3c propagator;
  StateVector<3> final_state;
  Populations<3> final_populations{};
  double max_g2 = 0.0;
  std::vector<StepSummary> steps;
};

/// Applies the train step by step to `initial` and records the g2 transient
/// of each step. The transient uses a full 2 pi sweep of the running area, so
/// it is exact for area_per_step >= pi.
inline TrainAnalysis analyze_train(std::span<const double> angles,
                                   double area_per_step,
                                   const StateVector<3>& initial) {
  TrainAnalysis out;
  out.propagator = train_propagator(angles, area_per_step);
  StateVector<3> psi = initial;
  int k = 0;
  for (double phi : angles) {
    StepSummary s;
    s.k = ++k;
    s.phi = phi;
    s.max_g2 = step_transient_max(phi, psi);
    psi = step_propagator(phi, area_per_step).matrix * psi;
    s.after = populations(psi);
    out.max_g2 = std::max(out.max_g2, s.max_g2);
    out.steps.push_back(s);
  }
  out.final_state = psi;
  out.final_populations = populations(psi);
  return out;
}

/// Ground-manifold amplitudes at time t from the analytic step propagators
/// evaluated on the running area of the active step. A step is active from
/// the midpoint before its center to the midpoint after it.
inline StateVector<3> analytic_state(const PulseTrain& train,
                                     const StateVector<3>& initial, double t) {
  StateVector<3> psi = initial;
  for (int k = 1; k <= train.n_pairs; ++k) {
    const bool last = k == train.n_pairs;
    const double boundary = train.centers[k - 1] + 0.5 * train.spacing;
    const double phi = train.mixing_angles[k - 1];
    if (!last && t >= boundary) {
      psi = step_propagator(phi, train.area_per_step).matrix * psi;
      continue;
    }
    return step_propagator(phi, partial_area(train, k, t)).matrix * psi;
  }
  return psi;
}

}  // namespace cpt
