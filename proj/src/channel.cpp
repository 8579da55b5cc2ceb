// SPDX-License-Identifier: Apache-2.0

#include "crbmo/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crbmo {

void UeConfig::validate() const {
  if (n_ue < 1) throw std::invalid_argument("UeConfig: n_ue must be >= 1");
  if (precoder_v.size() != n_ue)
    throw std::invalid_argument("UeConfig: precoder length mismatch");
  if (tx_power < 0.0) throw std::invalid_argument("UeConfig: negative tx_power");
  if (std::abs(precoder_v.squaredNorm() - tx_power) > 1e-10)
    throw std::invalid_argument("UeConfig: ||v||^2 must equal tx_power");
}

VectorXcd ue_steering(int n_ue, double psi) {
  VectorXcd v(n_ue);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_ue));
  const double rate = std::numbers::pi * std::sin(psi);
  for (int i = 0; i < n_ue; ++i) {
    const double arg = rate * static_cast<double>(i);
    v(i) = Complex(scale * std::cos(arg), scale * std::sin(arg));
  }
  return v;
}

VectorXcd matched_precoder(int n_ue, double psi, double tx_power) {
  return std::sqrt(tx_power) * ue_steering(n_ue, psi);
}

MatrixXcd channel_matrix(const UpaGeometry& geom, const UeConfig& ue,
                         const std::vector<PathParams>& paths) {
  ue.validate();
  if (paths.empty()) throw std::invalid_argument("channel_matrix: empty path list");
  const double scale =
      std::sqrt(static_cast<double>(geom.n_bs()) * ue.n_ue / static_cast<double>(paths.size()));
  MatrixXcd h = MatrixXcd::Zero(geom.n_bs(), ue.n_ue);
  for (const auto& p : paths) {
    const VectorXcd a_bs = steering(geom, p.doa);
    const VectorXcd a_ue = ue_steering(ue.n_ue, p.dod_psi);
    h.noalias() += (scale * p.alpha) * a_bs * a_ue.adjoint();
  }
  return h;
}

EffectiveGain effective_beta(const UpaGeometry& geom, const PathParams& path,
                             const UeConfig& ue, int n_paths_total) {
  ue.validate();
  if (n_paths_total < 1) throw std::invalid_argument("effective_beta: n_paths_total < 1");
  const double scale = std::sqrt(static_cast<double>(geom.n_bs()) * ue.n_ue /
                                 static_cast<double>(n_paths_total));
  const Complex inner = ue_steering(ue.n_ue, path.dod_psi).dot(ue.precoder_v);
  return {scale * path.alpha * inner};
}

namespace {

void check_pilot_args(const MatrixXcd& h, const UeConfig& ue, const CombinerSet& combiners,
                      const VectorXcd& seq) {
  ue.validate();
  const auto& lay = combiners.layout();
  if (h.rows() != lay.n_bs || h.cols() != ue.n_ue)
    throw std::invalid_argument("synthesize_pilots: channel dimension mismatch");
  if (seq.size() != lay.n_snapshots)
    throw std::invalid_argument("synthesize_pilots: sequence length != n_snapshots");
  for (Eigen::Index n = 0; n < seq.size(); ++n)
    if (std::abs(std::abs(seq(n)) - 1.0) > 1e-12)
      throw std::invalid_argument("synthesize_pilots: sequence must be unit modulus");
}

}  // namespace

MatrixXcd draw_noise_block(int n_bs, int n_snapshots, Rng& rng) {
  MatrixXcd z(n_bs, n_snapshots);
  for (int n = 0; n < n_snapshots; ++n)
    for (int i = 0; i < n_bs; ++i) z(i, n) = rng.complex_normal(1.0);
  return z;
}

VectorXcd synthesize_pilots_with_noise(const MatrixXcd& h, const UeConfig& ue,
                                       const CombinerSet& combiners, double sigma2,
                                       const VectorXcd& seq, const MatrixXcd& noise_raw) {
  check_pilot_args(h, ue, combiners, seq);
  const auto& lay = combiners.layout();
  if (noise_raw.rows() != lay.n_bs || noise_raw.cols() != lay.n_snapshots)
    throw std::invalid_argument("synthesize_pilots: noise block dimension mismatch");
  const double sigma = std::sqrt(sigma2);
  const VectorXcd hv = h * ue.precoder_v;
  VectorXcd out(static_cast<Eigen::Index>(lay.n_rf) * lay.n_snapshots);
  for (int n = 0; n < lay.n_snapshots; ++n) {
    MatrixXcd w_n = combiners.snapshot_block(n);
    if (combiners.w_bb()) {
      const Eigen::Index c0 = static_cast<Eigen::Index>(n) * lay.n_rf;
      w_n = w_n * combiners.w_bb()->block(c0, c0, lay.n_rf, lay.n_rf);
    }
    const Complex s = seq(n);
    const VectorXcd r_n = hv * s + sigma * noise_raw.col(n);
    out.segment(static_cast<Eigen::Index>(n) * lay.n_rf, lay.n_rf) =
        (w_n.adjoint() * r_n) * std::conj(s);
  }
  return out;
}

VectorXcd synthesize_pilots(const MatrixXcd& h, const UeConfig& ue,
                            const CombinerSet& combiners, double sigma2,
                            const VectorXcd& seq, Rng& rng) {
  check_pilot_args(h, ue, combiners, seq);
  const auto& lay = combiners.layout();
  return synthesize_pilots_with_noise(h, ue, combiners, sigma2, seq,
                                      draw_noise_block(lay.n_bs, lay.n_snapshots, rng));
}

}  // namespace crbmo
