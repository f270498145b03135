#pragma once

// Tensor-product discretization of the slab T^2 x (0,1): uniform Fourier
// nodes in x1, x2 and Chebyshev-Gauss-Lobatto nodes mapped to [0,1] in x3.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fbns {

class GridSpec {
 public:
  /// Throws InvalidResolution unless n1, n2 are even and >= 4 and n3 is odd
  /// and >= 5.
  static GridSpec make(int n1, int n2, int n3);

  int n1() const { return impl_->n1; }
  int n2() const { return impl_->n2; }
  int n3() const { return impl_->n3; }
  std::size_t points() const { return static_cast<std::size_t>(n1()) * n2() * n3(); }
  std::size_t plane() const { return static_cast<std::size_t>(n1()) * n2(); }

  std::span<const double> x1_nodes() const { return impl_->x1; }
  std::span<const double> x2_nodes() const { return impl_->x2; }
  std::span<const double> x3_nodes() const { return impl_->x3; }
  /// Clenshaw-Curtis weights on [0,1]; they sum to 1.
  std::span<const double> x3_weights() const { return impl_->w3; }
  /// Product quadrature weight per node, (i3, i2, i1) order.
  std::span<const double> node_weights() const { return impl_->node_weights; }

  /// Dense differentiation matrices, row-major n x n.
  std::span<const double> fourier_diff1() const { return impl_->d1; }
  std::span<const double> fourier_diff2() const { return impl_->d2; }
  std::span<const double> cheb_diff() const { return impl_->d3; }
  /// 2/3-rule low-pass projectors for the periodic directions.
  std::span<const double> dealias1() const { return impl_->p1; }
  std::span<const double> dealias2() const { return impl_->p2; }

  std::size_t index(int i3, int i2, int i1) const {
    return (static_cast<std::size_t>(i3) * n2() + i2) * n1() + i1;
  }

  bool operator==(const GridSpec& other) const {
    return n1() == other.n1() && n2() == other.n2() && n3() == other.n3();
  }

 private:
  struct Impl {
    int n1{}, n2{}, n3{};
    std::vector<double> x1, x2, x3, w3, node_weights;
    std::vector<double> d1, d2, d3, p1, p2;
  };
  explicit GridSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline GridSpec make_grid(int n1, int n2, int n3) { return GridSpec::make(n1, n2, n3); }

/// Samples of a scalar (1), vector (3) or tensor (9) quantity on a grid.
/// Values are stored (component, i3, i2, i1) with i1 fastest. Tensor
/// component (r, c) is stored at index 3 * r + c.
class Field {
 public:
  Field(GridSpec grid, int components);

  using PointFn = std::function<double(double x1, double x2, double x3)>;
  using ComponentFn = std::function<double(int component, double x1, double x2, double x3)>;

  static Field sample(const GridSpec& grid, const PointFn& fn);
  static Field sample(const GridSpec& grid, int components, const ComponentFn& fn);
  static Field constant(const GridSpec& grid, int components, double value);

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t points() const { return grid_.points(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> component(int c) { return std::span<double>(values_).subspan(offset(c), points()); }
  std::span<const double> component(int c) const {
    return std::span<const double>(values_).subspan(offset(c), points());
  }

  double& at(int c, int i3, int i2, int i1) { return values_[offset(c) + grid_.index(i3, i2, i1)]; }
  double at(int c, int i3, int i2, int i1) const { return values_[offset(c) + grid_.index(i3, i2, i1)]; }

  /// Component `c` as a scalar field.
  Field extract(int c) const;
  void assign(int c, const Field& scalar);

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  /// this += alpha * other
  Field& add_scaled(double alpha, const Field& other);

  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t offset(int c) const { return static_cast<std::size_t>(c) * points(); }
  GridSpec grid_;
  int components_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
/// Pointwise product of two scalar fields, or of a scalar with every
/// component of `b`.
Field operator*(const Field& a, const Field& b);

/// Spectral derivative along axis 1, 2 (Fourier) or 3 (Chebyshev), applied
/// componentwise.
Field diff(const Field& f, int axis);

/// Gradient of a scalar field (3 components) or of a vector field
/// (9 components, entry (i, k) = d f^i / d x_k).
Field gradient(const Field& f);

/// Tensor-product quadrature of a scalar field over the slab.
double integrate(const Field& f);

/// Trapezoid integral over the face x3 = 0 (face 0) or x3 = 1 (face 1) of
/// scalar field f.
double integrate_face(const Field& f, int face);

/// 2/3-rule truncation in x1 and x2.
Field dealias(const Field& f);

void require_same_grid(const Field& a, const Field& b);

}  // namespace fbns
