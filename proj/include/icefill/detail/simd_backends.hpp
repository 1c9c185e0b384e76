#ifndef ICEFILL_DETAIL_SIMD_BACKENDS_HPP
#define ICEFILL_DETAIL_SIMD_BACKENDS_HPP

#include <complex>
#include <cstddef>

// Backend-private symbols shared by the dispatcher and the per-ISA
// translation units. Not part of the public surface.
namespace icefill::simd::detail {

using cx = std::complex<double>;

struct KernelTable {
  void (*caxpy)(std::size_t, cx, const cx*, cx*);
  cx (*cdotc)(std::size_t, const cx*, const cx*);
  double (*squared_norm)(std::size_t, const cx*);
  double (*squared_distance)(std::size_t, const cx*, const cx*);
  void (*unit_phase)(std::size_t, const cx*, double, cx*);
};

[[nodiscard]] const KernelTable& scalar_table();

#if defined(ICEFILL_HAVE_AVX2)
[[nodiscard]] const KernelTable& avx2_table();
#endif

}  // namespace icefill::simd::detail

#endif
