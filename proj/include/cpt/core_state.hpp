#pragma once

// Basis, amplitude vectors and Hamiltonian assembly for the five-state
// chainwise system (g1, e1, g2, e2, g3) and its three-state ground manifold.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cpt {

using cplx = std::complex<double>;

template <int Dim>
using StateVector = Eigen::Matrix<cplx, Dim, 1>;

template <int Dim>
using HamiltonianMatrix = Eigen::Matrix<cplx, Dim, Dim>;

template <int Dim>
using Populations = std::array<double, Dim>;

/// Indices into the five-state basis. The order follows the chain linkage.
enum Level : int { g1 = 0, e1 = 1, g2 = 2, e2 = 3, g3 = 4 };

/// Indices into the ground-manifold basis (g1, g2, g3).
enum GroundLevel : int { G1 = 0, G2 = 1, G3 = 2 };

inline constexpr double pi = 3.14159265358979323846;

/// Inputs that violate a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The integrator or a sampler produced something it cannot recover from.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-photon detunings of the two excited states and two-photon detunings of
/// the two Raman pairs, all in angular-frequency units.
struct DetuningConfig {
  double delta1 = 300.0;
  double delta2 = 300.0;
  double small_delta1 = 0.0;
  double small_delta2 = 0.0;

  /// Ratio of the one-photon detunings; always derived, never stored.
  double zeta() const { return delta1 / delta2; }

  bool finite() const {
    return std::isfinite(delta1) && std::isfinite(delta2) &&
           std::isfinite(small_delta1) && std::isfinite(small_delta2);
  }
};

/// Population decay rates of the three intermediate states. All zero means a
/// closed system.
struct DecayConfig {
  double gamma_e1 = 0.0;
  double gamma_g2 = 0.0;
  double gamma_e2 = 0.0;

  bool closed() const {
    return gamma_e1 == 0.0 && gamma_g2 == 0.0 && gamma_e2 == 0.0;
  }

  void validate() const {
    for (double g : {gamma_e1, gamma_g2, gamma_e2}) {
      if (!std::isfinite(g) || g < 0.0) {
        throw DomainError("decay rates must be finite and >= 0, got " +
                          std::to_string(g));
      }
    }
  }
};

/// Instantaneous values of the four physical Rabi frequencies.
struct PhysicalRabi {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  double omega4 = 0.0;
};

/// Five-state RWA Hamiltonian for the given instantaneous couplings.
///
/// Two-photon detunings are cumulative rotating-frame shifts: g2 sits at
/// small_delta1, e2 at delta2 + small_delta1 and g3 at small_delta1 +
/// small_delta2. Decay enters as -i*gamma/2 on the diagonal of the decaying
/// level, so population that leaves is not returned to the system.
inline HamiltonianMatrix<5> full_hamiltonian(const PhysicalRabi& rabi,
                                             const DetuningConfig& det,
                                             const DecayConfig& decay) {
  HamiltonianMatrix<5> h = HamiltonianMatrix<5>::Zero();
  h(g1, e1) = h(e1, g1) = 0.5 * rabi.omega1;
  h(e1, g2) = h(g2, e1) = 0.5 * rabi.omega2;
  h(g2, e2) = h(e2, g2) = 0.5 * rabi.omega3;
  h(e2, g3) = h(g3, e2) = 0.5 * rabi.omega4;
  h(e1, e1) = cplx(det.delta1, -0.5 * decay.gamma_e1);
  h(g2, g2) = cplx(det.small_delta1, -0.5 * decay.gamma_g2);
  h(e2, e2) = cplx(det.delta2 + det.small_delta1, -0.5 * decay.gamma_e2);
  h(g3, g3) = cplx(det.small_delta1 + det.small_delta2, 0.0);
  return h;
}

/// Checked variant of full_hamiltonian for one-off evaluation.
inline HamiltonianMatrix<5> build_full_hamiltonian(const PhysicalRabi& rabi,
                                                   const DetuningConfig& det,
                                                   const DecayConfig& decay) {
  decay.validate();
  if (!det.finite()) throw DomainError("detunings must be finite");
  if (!std::isfinite(rabi.omega1) || !std::isfinite(rabi.omega2) ||
      !std::isfinite(rabi.omega3) || !std::isfinite(rabi.omega4)) {
    throw NumericalError("Rabi frequencies must be finite");
  }
  return full_hamiltonian(rabi, det, decay);
}

/// Normalized dark state of the resonant chain, proportional to
/// (O2*O4, 0, -O1*O4, 0, O1*O3).
inline StateVector<5> dark_state(double omega1, double omega2, double omega3,
                                 double omega4) {
  StateVector<5> v = StateVector<5>::Zero();
  v(g1) = omega2 * omega4;
  v(g2) = -omega1 * omega4;
  v(g3) = omega1 * omega3;
  const double n = v.norm();
  if (n == 0.0) {
    throw DomainError(
        "dark state undefined: O2*O4, O1*O4 and O1*O3 are all zero");
  }
  return v / n;
}

template <int Dim>
Populations<Dim> populations(const StateVector<Dim>& v) {
  Populations<Dim> p{};
  for (int i = 0; i < Dim; ++i) p[i] = std::norm(v(i));
  return p;
}

template <int Dim>
StateVector<Dim> basis_state(int index) {
  StateVector<Dim> v = StateVector<Dim>::Zero();
  v(index) = 1.0;
  return v;
}

}  // namespace cpt
