// SPDX-License-Identifier: Apache-2.0

#include "crbmo/array_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crbmo {

namespace {

constexpr double kPi = std::numbers::pi;

void check_geom(const UpaGeometry& geom) {
  if (!geom.valid()) throw std::invalid_argument("UpaGeometry: P and Q must be >= 1");
}

// (1/sqrt(n)) * exp(j*pi*i*rate), i = 0..n-1
VectorXcd phase_ramp(int n, double rate) {
  VectorXcd v(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    const double arg = kPi * static_cast<double>(i) * rate;
    v(i) = Complex(scale * std::cos(arg), scale * std::sin(arg));
  }
  return v;
}

VectorXcd kron(const VectorXcd& x, const VectorXcd& y) {
  VectorXcd out(x.size() * y.size());
  for (Eigen::Index q = 0; q < x.size(); ++q)
    for (Eigen::Index p = 0; p < y.size(); ++p) out(q * y.size() + p) = x(q) * y(p);
  return out;
}

// j*pi*coeff*[0..n-1] applied entrywise
VectorXcd index_scaled(const VectorXcd& v, double coeff) {
  VectorXcd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out(i) = Complex(0.0, kPi * coeff * static_cast<double>(i)) * v(i);
  return out;
}

}  // namespace

VectorXcd steering_y(const UpaGeometry& geom, const AnglePair& angle) {
  check_geom(geom);
  return phase_ramp(geom.q_cols, std::sin(angle.theta) * std::sin(angle.phi));
}

VectorXcd steering_z(const UpaGeometry& geom, const AnglePair& angle) {
  check_geom(geom);
  return phase_ramp(geom.p_rows, std::cos(angle.phi));
}

VectorXcd steering(const UpaGeometry& geom, const AnglePair& angle) {
  return kron(steering_y(geom, angle), steering_z(geom, angle));
}

VectorXcd steering_dtheta(const UpaGeometry& geom, const AnglePair& angle) {
  const VectorXcd ay = steering_y(geom, angle);
  const VectorXcd az = steering_z(geom, angle);
  const double coeff = std::cos(angle.theta) * std::sin(angle.phi);
  return kron(index_scaled(ay, coeff), az);
}

VectorXcd steering_dphi(const UpaGeometry& geom, const AnglePair& angle) {
  const VectorXcd ay = steering_y(geom, angle);
  const VectorXcd az = steering_z(geom, angle);
  const double y_coeff = std::sin(angle.theta) * std::cos(angle.phi);
  const double z_coeff = -std::sin(angle.phi);
  return kron(index_scaled(ay, y_coeff), az) + kron(ay, index_scaled(az, z_coeff));
}

}  // namespace crbmo
