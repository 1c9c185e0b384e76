#ifndef ICEFILL_SIMD_HPP
#define ICEFILL_SIMD_HPP

#include <complex>
#include <cstddef>

// Data-parallel complex kernels behind the Monte-Carlo hot loops.
// A scalar reference implementation always exists; on x86 an AVX2+FMA variant
// is compiled into its own translation unit and selected at runtime from
// cpuid. The two backends agree to floating-point reassociation error and are
// equivalence-tested against each other.
namespace icefill::simd {

enum class Backend { scalar, avx2 };

/// Backend currently routed to (auto-detected at startup).
[[nodiscard]] Backend active_backend();

/// Force a backend (tests/benchmarks). Throws if unsupported on this machine.
void set_backend(Backend backend);

[[nodiscard]] const char* backend_name(Backend backend);

/// True when the AVX2 variant exists in this build and the CPU supports it.
[[nodiscard]] bool avx2_available();

/// y += a * x  (n complex elements)
void caxpy(std::size_t n, std::complex<double> a,
           const std::complex<double>* x, std::complex<double>* y);

/// sum_i conj(x_i) * y_i
[[nodiscard]] std::complex<double> cdotc(std::size_t n, const std::complex<double>* x,
                                         const std::complex<double>* y);

/// sum_i |x_i|^2
[[nodiscard]] double squared_norm(std::size_t n, const std::complex<double>* x);

/// sum_i |x_i - y_i|^2
[[nodiscard]] double squared_distance(std::size_t n, const std::complex<double>* x,
                                      const std::complex<double>* y);

/// h += g * (ax kron ay): h has nx*ny entries laid out x-major (index ix*ny + iy).
void kron_axpy(std::complex<double> g, const std::complex<double>* ax, std::size_t nx,
               const std::complex<double>* ay, std::size_t ny, std::complex<double>* h);

/// out_i = scale * x_i / |x_i|; a zero input entry maps to scale (phase 0).
void unit_phase(std::size_t n, const std::complex<double>* x, double scale,
                std::complex<double>* out);

/// a += v v^H for a dense column-major m x m matrix.
void herk_rank1(std::size_t m, const std::complex<double>* v, std::complex<double>* a);

}  // namespace icefill::simd

#endif
