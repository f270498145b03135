#pragma once

// Data-parallel inner loops used by the field algebra, quadrature and the
// pointwise 3x3 deformation algebra. Every kernel has a scalar reference
// implementation and, where the CPU supports it, an AVX2 variant selected at
// runtime. Element-wise kernels are bit-identical across variants (no FMA
// contraction on either path); reductions agree to rounding.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace fbns::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Structure-of-arrays view of a batch of 3x3 matrices: entry (r, c) of every
/// matrix lives contiguously in `entry[3 * r + c]`.
struct Mat3Batch {
  std::array<const double*, 9> entry;
};
struct Mat3BatchOut {
  std::array<double*, 9> entry;
};

struct KernelTable {
  Isa isa;
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a * b
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // acc += a * b
  void (*mul_acc)(const double* a, const double* b, double* acc, std::size_t n);
  // acc += alpha * a * b
  void (*scaled_mul_acc)(double alpha, const double* a, const double* b, double* acc, std::size_t n);
  // sum_i x_i * y_i
  double (*dot)(const double* x, const double* y, std::size_t n);
  // det and cofactor matrix (cof(M)_{rc} = (-1)^{r+c} minor_{rc}) for n matrices
  void (*det3)(Mat3Batch m, double* det, std::size_t n);
  void (*cofactor3)(Mat3Batch m, Mat3BatchOut cof, std::size_t n);
};

bool isa_available(Isa isa);

/// Kernels for a specific ISA. Requesting an unavailable ISA returns the
/// scalar table.
const KernelTable& kernels(Isa isa);

/// Runtime-selected kernels: the widest available ISA unless the environment
/// variable SOLVER_SIMD=scalar forces the reference path.
const KernelTable& kernels();

// Convenience wrappers over the active table.
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), y.size());
}
inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  kernels().mul(a.data(), b.data(), out.data(), out.size());
}
inline void mul_acc(std::span<const double> a, std::span<const double> b, std::span<double> acc) {
  kernels().mul_acc(a.data(), b.data(), acc.data(), acc.size());
}
inline void scaled_mul_acc(double alpha, std::span<const double> a, std::span<const double> b,
                           std::span<double> acc) {
  kernels().scaled_mul_acc(alpha, a.data(), b.data(), acc.data(), acc.size());
}
inline double dot(std::span<const double> x, std::span<const double> y) {
  return kernels().dot(x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace fbns::simd
