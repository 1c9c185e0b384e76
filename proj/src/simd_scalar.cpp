#include <cmath>

#include "icefill/detail/simd_backends.hpp"

// Reference backend: plain loops, kept branch-free and simple so the
// vectorized variants have an unambiguous ground truth to match.
namespace icefill::simd::detail {
namespace {

void caxpy_scalar(std::size_t n, cx a, const cx* x, cx* y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cx(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

cx cdotc_scalar(std::size_t n, const cx* x, const cx* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

double squared_norm_scalar(std::size_t n, const cx* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return acc;
}

double squared_distance_scalar(std::size_t n, const cx* x, const cx* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = x[i].real() - y[i].real();
    const double di = x[i].imag() - y[i].imag();
    acc += dr * dr + di * di;
  }
  return acc;
}

void unit_phase_scalar(std::size_t n, const cx* x, double scale, cx* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double mag2 = xr * xr + xi * xi;
    if (mag2 == 0.0) {
      out[i] = cx(scale, 0.0);
    } else {
      const double f = scale / std::sqrt(mag2);
      out[i] = cx(xr * f, xi * f);
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{caxpy_scalar, cdotc_scalar, squared_norm_scalar,
                                 squared_distance_scalar, unit_phase_scalar};
  return table;
}

}  // namespace icefill::simd::detail
