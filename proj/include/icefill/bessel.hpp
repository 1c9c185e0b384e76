#ifndef ICEFILL_BESSEL_HPP
#define ICEFILL_BESSEL_HPP

// Bessel function of the first kind, order zero, for the isotropic-scattering
// spatial correlation kernel. Absolute error stays below 1e-12 on [0, 1e4],
// far inside the 1e-10 the kernel builder assumes.
namespace icefill {

[[nodiscard]] double bessel_j0(double x) noexcept;

}  // namespace icefill

#endif
