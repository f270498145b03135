#include "fbns/simd/kernels.hpp"

namespace fbns::simd {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc_scalar(const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a[i] * b[i];
}

void scaled_mul_acc_scalar(double alpha, const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += (alpha * a[i]) * b[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void cofactor3_scalar(Mat3Batch m, Mat3BatchOut cof, std::size_t n) {
  const auto& e = m.entry;
  for (std::size_t p = 0; p < n; ++p) {
    const double a = e[0][p], b = e[1][p], c = e[2][p];
    const double d = e[3][p], f0 = e[4][p], f = e[5][p];
    const double g = e[6][p], h = e[7][p], i = e[8][p];
    cof.entry[0][p] = f0 * i - f * h;
    cof.entry[1][p] = f * g - d * i;
    cof.entry[2][p] = d * h - f0 * g;
    cof.entry[3][p] = c * h - b * i;
    cof.entry[4][p] = a * i - c * g;
    cof.entry[5][p] = b * g - a * h;
    cof.entry[6][p] = b * f - c * f0;
    cof.entry[7][p] = c * d - a * f;
    cof.entry[8][p] = a * f0 - b * d;
  }
}

void det3_scalar(Mat3Batch m, double* det, std::size_t n) {
  const auto& e = m.entry;
  for (std::size_t p = 0; p < n; ++p) {
    const double a = e[0][p], b = e[1][p], c = e[2][p];
    const double d = e[3][p], f0 = e[4][p], f = e[5][p];
    const double g = e[6][p], h = e[7][p], i = e[8][p];
    const double c0 = f0 * i - f * h;
    const double c1 = f * g - d * i;
    const double c2 = d * h - f0 * g;
    det[p] = (a * c0 + b * c1) + c * c2;
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar,  axpy_scalar, mul_scalar,     mul_acc_scalar,
                               scaled_mul_acc_scalar, dot_scalar, det3_scalar, cofactor3_scalar};
}  // namespace detail

}  // namespace fbns::simd
