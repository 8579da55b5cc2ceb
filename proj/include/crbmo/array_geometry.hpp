// SPDX-License-Identifier: Apache-2.0
//
// Uniform planar array steering vectors and their analytic angle derivatives.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace crbmo {

using Complex = std::complex<double>;
using VectorXcd = Eigen::VectorXcd;

/// P x Q uniform planar array at half-wavelength spacing.
///
/// The stacked response is a_y (length Q, y axis) Kronecker a_z (length P,
/// z axis), so antenna index = q*P + p.
struct UpaGeometry {
  int p_rows = 1;  // P, z-axis factor length
  int q_cols = 1;  // Q, y-axis factor length

  int n_bs() const { return p_rows * q_cols; }
  bool valid() const { return p_rows >= 1 && q_cols >= 1; }
};

/// Azimuth/elevation pair in radians.
struct AnglePair {
  double theta = 0.0;  // azimuth
  double phi = 0.0;    // elevation
};

// a_y entry q = (1/sqrt(Q)) exp(j*pi*q*sin(theta)*sin(phi))
VectorXcd steering_y(const UpaGeometry& geom, const AnglePair& angle);

// a_z entry p = (1/sqrt(P)) exp(j*pi*p*cos(phi))
VectorXcd steering_z(const UpaGeometry& geom, const AnglePair& angle);

/// Full array response a_y kron a_z, unit Euclidean norm.
VectorXcd steering(const UpaGeometry& geom, const AnglePair& angle);

/// d a / d theta (the a1 vector).
VectorXcd steering_dtheta(const UpaGeometry& geom, const AnglePair& angle);

/// d a / d phi (the a2 vector, two-term product rule).
VectorXcd steering_dphi(const UpaGeometry& geom, const AnglePair& angle);

}  // namespace crbmo
