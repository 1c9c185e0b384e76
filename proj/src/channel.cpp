#include "icefill/channel.hpp"

#include <cmath>

#include "icefill/simd.hpp"

namespace icefill {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Phases along one axis: exp(j w s m) over centered indices
// m = -(n-1)/2 ... +(n-1)/2. Built by a multiplicative recurrence (two
// trig evaluations per axis instead of n); modulus drift over the few dozen
// elements of an axis is ~1e-15, invisible to the accumulated channel.
void fill_axis(double phase_step, int n, cxd* out) {
  const double start = -0.5 * (n - 1) * phase_step;
  cxd cur = std::polar(1.0, start);
  const cxd step = std::polar(1.0, phase_step);
  for (int i = 0; i < n; ++i) {
    out[i] = cur;
    cur *= step;
  }
}

}  // namespace

void ClusteredChannelParams::validate() const {
  if (num_clusters < 1 || rays_per_cluster < 1) {
    throw InvalidInputError("ClusteredChannelParams: counts must be >= 1");
  }
  if (spread_rad < 0.0 || delay_spread_s < 0.0) {
    throw InvalidInputError("ClusteredChannelParams: spreads must be non-negative");
  }
  if (!(angle_lo < angle_hi)) {
    throw InvalidInputError("ClusteredChannelParams: angle interval is empty");
  }
}

VecC steering_vector(const UpaGeometry& geom, double theta, double phi) {
  geom.validate();
  const double w = kTwoPi * geom.spacing_wavelengths();
  const double sx = w * std::sin(theta) * std::cos(phi);
  const double sy = w * std::sin(phi);
  VecC a(geom.size());
  // Per-entry polar keeps every modulus exactly 1.
  for (int ix = 0; ix < geom.mx; ++ix) {
    const double mx = ix - 0.5 * (geom.mx - 1);
    for (int iy = 0; iy < geom.my; ++iy) {
      const double my = iy - 0.5 * (geom.my - 1);
      a[ix * geom.my + iy] = std::polar(1.0, mx * sx + my * sy);
    }
  }
  return a;
}

VecC draw_clustered_channel(const UpaGeometry& geom, const ClusteredChannelParams& params,
                            Rng& rng) {
  geom.validate();
  params.validate();
  const double w = kTwoPi * geom.spacing_wavelengths();
  VecC h = VecC::Zero(geom.size());
  std::vector<cxd> ax(static_cast<std::size_t>(geom.mx));
  std::vector<cxd> ay(static_cast<std::size_t>(geom.my));
  for (int c = 0; c < params.num_clusters; ++c) {
    const double theta_c = rng.uniform(params.angle_lo, params.angle_hi);
    const double phi_c = rng.uniform(params.angle_lo, params.angle_hi);
    const double tau_c =
        rng.uniform(-params.delay_spread_s, params.delay_spread_s);
    const cxd delay_phase = std::polar(1.0, -kTwoPi * params.carrier_hz * tau_c);
    for (int r = 0; r < params.rays_per_cluster; ++r) {
      const double theta = theta_c + rng.uniform(-params.spread_rad, params.spread_rad);
      const double phi = phi_c + rng.uniform(-params.spread_rad, params.spread_rad);
      const cxd gain = rng.cgaussian();
      fill_axis(w * std::sin(theta) * std::cos(phi), geom.mx, ax.data());
      fill_axis(w * std::sin(phi), geom.my, ay.data());
      simd::kron_axpy(gain * delay_phase, ax.data(), ax.size(), ay.data(), ay.size(), h.data());
    }
  }
  h /= std::sqrt(static_cast<double>(params.num_clusters) * params.rays_per_cluster);
  return h;
}

VecC draw_gaussian_channel(const EigenBasis& basis, Rng& rng) {
  VecC g(basis.rank());
  for (int k = 0; k < basis.rank(); ++k) {
    g[k] = rng.cgaussian() * std::sqrt(basis.values[k]);
  }
  if (basis.rank() == 0) {
    return VecC::Zero(basis.ambient_dim);
  }
  return basis.vectors * g;
}

VecC receive_pilots(const ObservationMatrix& obs, const VecC& h, double sigma2, Rng& rng) {
  if (obs.dim() != h.size()) {
    throw InvalidInputError("receive_pilots: observation/channel dimension mismatch");
  }
  if (sigma2 < 0.0) {
    throw InvalidInputError("receive_pilots: noise variance must be >= 0");
  }
  VecC y = obs.matrix.adjoint() * h;
  const double sd = std::sqrt(sigma2);
  for (int q = 0; q < y.size(); ++q) {
    y[q] += sd * rng.cgaussian();
  }
  return y;
}

}  // namespace icefill
