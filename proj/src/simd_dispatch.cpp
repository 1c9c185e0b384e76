#include "icefill/simd.hpp"

#include <atomic>

#include "icefill/detail/simd_backends.hpp"
#include "icefill/types.hpp"

namespace icefill::simd {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(ICEFILL_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  const KernelTable* table;
  Backend backend;

  Dispatch() {
#if defined(ICEFILL_HAVE_AVX2)
    if (cpu_has_avx2()) {
      table = &detail::avx2_table();
      backend = Backend::avx2;
      return;
    }
#endif
    table = &detail::scalar_table();
    backend = Backend::scalar;
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool avx2_available() { return cpu_has_avx2(); }

const char* backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

void set_backend(Backend backend) {
  Dispatch& d = dispatch();
  switch (backend) {
    case Backend::scalar:
      d.table = &detail::scalar_table();
      d.backend = Backend::scalar;
      return;
    case Backend::avx2:
#if defined(ICEFILL_HAVE_AVX2)
      if (cpu_has_avx2()) {
        d.table = &detail::avx2_table();
        d.backend = Backend::avx2;
        return;
      }
#endif
      throw InvalidInputError("simd: avx2 backend not available on this machine");
  }
  throw InvalidInputError("simd: unknown backend");
}

void caxpy(std::size_t n, std::complex<double> a, const std::complex<double>* x,
           std::complex<double>* y) {
  dispatch().table->caxpy(n, a, x, y);
}

std::complex<double> cdotc(std::size_t n, const std::complex<double>* x,
                           const std::complex<double>* y) {
  return dispatch().table->cdotc(n, x, y);
}

double squared_norm(std::size_t n, const std::complex<double>* x) {
  return dispatch().table->squared_norm(n, x);
}

double squared_distance(std::size_t n, const std::complex<double>* x,
                        const std::complex<double>* y) {
  return dispatch().table->squared_distance(n, x, y);
}

void unit_phase(std::size_t n, const std::complex<double>* x, double scale,
                std::complex<double>* out) {
  dispatch().table->unit_phase(n, x, scale, out);
}

void kron_axpy(std::complex<double> g, const std::complex<double>* ax, std::size_t nx,
               const std::complex<double>* ay, std::size_t ny, std::complex<double>* h) {
  const KernelTable& t = *dispatch().table;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const std::complex<double> coeff = g * ax[ix];
    t.caxpy(ny, coeff, ay, h + ix * ny);
  }
}

void herk_rank1(std::size_t m, const std::complex<double>* v, std::complex<double>* a) {
  const KernelTable& t = *dispatch().table;
  for (std::size_t j = 0; j < m; ++j) {
    t.caxpy(m, std::conj(v[j]), v, a + j * m);
  }
}

}  // namespace icefill::simd
