#include "fbns/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define FBNS_AVX2 __attribute__((target("avx2")))

namespace fbns::simd {
namespace {

FBNS_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

FBNS_AVX2 void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

FBNS_AVX2 void mul_acc_avx2(const double* a, const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < n; ++i) acc[i] += a[i] * b[i];
}

FBNS_AVX2 void scaled_mul_acc_avx2(double alpha, const double* a, const double* b, double* acc, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_mul_pd(va, _mm256_loadu_pd(a + i)), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < n; ++i) acc[i] += (alpha * a[i]) * b[i];
}

FBNS_AVX2 double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, s);
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + tail;
}

struct Loaded {
  __m256d a, b, c, d, e, f, g, h, i;
};

FBNS_AVX2 inline Loaded load9(const Mat3Batch& m, std::size_t p) {
  const auto& e = m.entry;
  return {_mm256_loadu_pd(e[0] + p), _mm256_loadu_pd(e[1] + p), _mm256_loadu_pd(e[2] + p),
          _mm256_loadu_pd(e[3] + p), _mm256_loadu_pd(e[4] + p), _mm256_loadu_pd(e[5] + p),
          _mm256_loadu_pd(e[6] + p), _mm256_loadu_pd(e[7] + p), _mm256_loadu_pd(e[8] + p)};
}

FBNS_AVX2 inline __m256d cross_diff(__m256d x, __m256d y, __m256d z, __m256d w) {
  return _mm256_sub_pd(_mm256_mul_pd(x, y), _mm256_mul_pd(z, w));
}

void cofactor3_tail(Mat3Batch m, Mat3BatchOut cof, std::size_t from, std::size_t n) {
  Mat3Batch shifted = m;
  Mat3BatchOut out = cof;
  for (int k = 0; k < 9; ++k) {
    shifted.entry[k] += from;
    out.entry[k] += from;
  }
  detail::scalar_table.cofactor3(shifted, out, n - from);
}

FBNS_AVX2 void cofactor3_avx2(Mat3Batch m, Mat3BatchOut cof, std::size_t n) {
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const Loaded v = load9(m, p);
    _mm256_storeu_pd(cof.entry[0] + p, cross_diff(v.e, v.i, v.f, v.h));
    _mm256_storeu_pd(cof.entry[1] + p, cross_diff(v.f, v.g, v.d, v.i));
    _mm256_storeu_pd(cof.entry[2] + p, cross_diff(v.d, v.h, v.e, v.g));
    _mm256_storeu_pd(cof.entry[3] + p, cross_diff(v.c, v.h, v.b, v.i));
    _mm256_storeu_pd(cof.entry[4] + p, cross_diff(v.a, v.i, v.c, v.g));
    _mm256_storeu_pd(cof.entry[5] + p, cross_diff(v.b, v.g, v.a, v.h));
    _mm256_storeu_pd(cof.entry[6] + p, cross_diff(v.b, v.f, v.c, v.e));
    _mm256_storeu_pd(cof.entry[7] + p, cross_diff(v.c, v.d, v.a, v.f));
    _mm256_storeu_pd(cof.entry[8] + p, cross_diff(v.a, v.e, v.b, v.d));
  }
  if (p < n) cofactor3_tail(m, cof, p, n);
}

FBNS_AVX2 void det3_avx2(Mat3Batch m, double* det, std::size_t n) {
  std::size_t p = 0;
  for (; p + 4 <= n; p += 4) {
    const Loaded v = load9(m, p);
    const __m256d c0 = cross_diff(v.e, v.i, v.f, v.h);
    const __m256d c1 = cross_diff(v.f, v.g, v.d, v.i);
    const __m256d c2 = cross_diff(v.d, v.h, v.e, v.g);
    const __m256d s = _mm256_add_pd(_mm256_mul_pd(v.a, c0), _mm256_mul_pd(v.b, c1));
    _mm256_storeu_pd(det + p, _mm256_add_pd(s, _mm256_mul_pd(v.c, c2)));
  }
  if (p < n) {
    Mat3Batch shifted = m;
    for (auto& e : shifted.entry) e += p;
    detail::scalar_table.det3(shifted, det + p, n - p);
  }
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2,          axpy_avx2, mul_avx2,  mul_acc_avx2,
                             scaled_mul_acc_avx2, dot_avx2,  det3_avx2, cofactor3_avx2};
}  // namespace detail

}  // namespace fbns::simd

#endif
