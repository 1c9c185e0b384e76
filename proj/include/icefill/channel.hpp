#ifndef ICEFILL_CHANNEL_HPP
#define ICEFILL_CHANNEL_HPP

#include "icefill/rng.hpp"
#include "icefill/types.hpp"

// Channel models and the pilot observation process.
namespace icefill {

/// Clustered multipath model (3GPP TR 38.901 style): clusters of rays with
/// small angular spreads, per-ray complex gains, per-cluster delays.
struct ClusteredChannelParams {
  int num_clusters = 23;
  int rays_per_cluster = 20;
  double carrier_hz = 3.5e9;
  double angle_lo = -kHalfPi;        ///< cluster center angles ~ U(lo, hi), radians
  double angle_hi = kHalfPi;
  double spread_rad = kFiveDegrees;  ///< per-ray offsets ~ U(-spread, spread)
  double delay_spread_s = 30e-9;     ///< per-cluster delays ~ U(-tau, tau)

  static constexpr double kHalfPi = 1.5707963267948966;
  static constexpr double kFiveDegrees = 0.0872664625997164788;

  void validate() const;
};

/// UPA steering vector a(theta, phi) with centered antenna indices:
/// entry (mx, my) = exp(j 2 pi (d/lambda) (mx sin(theta) cos(phi) + my sin(phi))),
/// laid out x-major (m = ix*My + iy). Unit-modulus entries, ||a||^2 = M.
[[nodiscard]] VecC steering_vector(const UpaGeometry& geom, double theta, double phi);

/// One clustered channel realization:
/// h = (1/sqrt(C R)) sum_c sum_r g_{c,r} exp(-j 2 pi f_c tau_c) a(theta_c + dth, phi_c + dph)
/// with per-ray gains g_{c,r} ~ CN(0,1). Draw order per cluster:
/// theta_c, phi_c, tau_c, then per ray dth, dph, g.
[[nodiscard]] VecC draw_clustered_channel(const UpaGeometry& geom,
                                          const ClusteredChannelParams& params, Rng& rng);

/// Gaussian channel consistent with a decomposed kernel: h = U_K Lambda^{1/2} g,
/// g ~ CN(0, I_K).
[[nodiscard]] VecC draw_gaussian_channel(const EigenBasis& basis, Rng& rng);

/// Pilot observations y = W^H h + z with z ~ CN(0, sigma2 I_Q).
/// Throws InvalidInputError when dimensions disagree or sigma2 < 0.
[[nodiscard]] VecC receive_pilots(const ObservationMatrix& obs, const VecC& h, double sigma2,
                                  Rng& rng);

}  // namespace icefill

#endif
