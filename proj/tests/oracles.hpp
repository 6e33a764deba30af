#pragma once

// Test-only reference computations, independent of the library code paths
// they are used to check.

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

/// exp(-i H t) for Hermitian H via its eigendecomposition.
template <int Dim>
Eigen::Matrix<cplx, Dim, Dim> expm_hermitian(const Eigen::Matrix<cplx, Dim, Dim>& h,
                                              double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, Dim, Dim>> es(h);
  Eigen::Matrix<cplx, Dim, 1> phases;
  for (int i = 0; i < Dim; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Step propagator of the resonant Lambda system with constant coupling ratio:
/// H(t) = f(t)/2 [[0, s, 0], [s, 0, c], [0, c, 0]] commutes with itself at all
/// times, so U = exp(-i (A/2) M).
inline Eigen::Matrix3cd lambda_step(double phi, double area) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 1) = m(1, 0) = std::sin(phi);
  m(1, 2) = m(2, 1) = std::cos(phi);
  return expm_hermitian<3>(m, area / 2.0);
}

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
