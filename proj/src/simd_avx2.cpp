#include <immintrin.h>

#include <cmath>

#include "icefill/detail/simd_backends.hpp"

// AVX2+FMA backend. One __m256d holds two complex<double> values as
// [re0 im0 re1 im1]. The recurring tricks:
//   swap_halves: [im0 re0 im1 re1], pairing each real with its imaginary.
//   fmaddsub(a, b, c): even lanes a*b - c, odd lanes a*b + c -- exactly the
//   sign pattern of complex multiplication.
// This translation unit is the only one compiled with -mavx2 -mfma; the
// dispatcher calls in here only after a cpuid check.
namespace icefill::simd::detail {
namespace {

inline __m256d swap_halves(__m256d v) { return _mm256_permute_pd(v, 0x5); }

void caxpy_avx2(std::size_t n, cx a, const cx* x, cx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  auto* yd = reinterpret_cast<double*>(y);
  const auto* xd = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    // [xi*ai, xr*ai] per pair, then a*x = fmaddsub(vx, ar, that).
    const __m256d cross = _mm256_mul_pd(swap_halves(vx), ai);
    const __m256d prod = _mm256_fmaddsub_pd(vx, ar, cross);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(vy, prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cx(y[i].real() + a.real() * xr - a.imag() * xi,
              y[i].imag() + a.real() * xi + a.imag() * xr);
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cx cdotc_avx2(std::size_t n, const cx* x, const cx* y) {
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  __m256d acc_re = _mm256_setzero_pd();  // lanes: xr*yr, xi*yi
  __m256d acc_im = _mm256_setzero_pd();  // lanes: xi*yr, xr*yi
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);
    acc_im = _mm256_fmadd_pd(swap_halves(vx), vy, acc_im);
  }
  // im = sum over pairs of (odd - even): negate the even lanes, then sum.
  const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(acc_re);
  double im = hsum(_mm256_mul_pd(acc_im, sign));
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    re += xr * y[i].real() + xi * y[i].imag();
    im += xr * y[i].imag() - xi * y[i].real();
  }
  return {re, im};
}

double squared_norm_avx2(std::size_t n, const cx* x) {
  const auto* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(vx, vx, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  }
  return total;
}

double squared_distance_avx2(std::size_t n, const cx* x, const cx* y) {
  const auto* xd = reinterpret_cast<const double*>(x);
  const auto* yd = reinterpret_cast<const double*>(y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(yd + 2 * i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double dr = x[i].real() - y[i].real();
    const double di = x[i].imag() - y[i].imag();
    total += dr * dr + di * di;
  }
  return total;
}

void unit_phase_avx2(std::size_t n, const cx* x, double scale, cx* out) {
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* od = reinterpret_cast<double*>(out);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d zero = _mm256_setzero_pd();
  // A zero entry maps to (scale, 0): blend that constant in where |x|^2 = 0.
  const __m256d zfill = _mm256_set_pd(0.0, scale, 0.0, scale);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    const __m256d sq = _mm256_mul_pd(vx, vx);
    const __m256d mag2 = _mm256_add_pd(sq, swap_halves(sq));  // |x|^2 in both lanes
    const __m256d f = _mm256_div_pd(vscale, _mm256_sqrt_pd(mag2));
    const __m256d res = _mm256_mul_pd(vx, f);
    const __m256d iszero = _mm256_cmp_pd(mag2, zero, _CMP_EQ_OQ);
    _mm256_storeu_pd(od + 2 * i, _mm256_blendv_pd(res, zfill, iszero));
  }
  for (; i < n; ++i) {
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

const KernelTable& avx2_table() {
  static const KernelTable table{caxpy_avx2, cdotc_avx2, squared_norm_avx2,
                                 squared_distance_avx2, unit_phase_avx2};
  return table;
}

}  // namespace icefill::simd::detail
