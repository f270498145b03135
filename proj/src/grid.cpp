#include "fbns/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fbns/error.hpp"
#include "fbns/simd/kernels.hpp"

namespace fbns {
namespace {

constexpr double pi = std::numbers::pi;

// Derivative of the trigonometric interpolant on n uniform nodes of [0,1)
// with the Nyquist mode's derivative set to zero.
std::vector<double> fourier_diff_matrix(int n) {
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int s = j - k;
      const double sign = (s % 2 == 0) ? 1.0 : -1.0;
      d[static_cast<std::size_t>(j) * n + k] = 2.0 * pi * 0.5 * sign / std::tan(pi * s / n);
    }
  }
  return d;
}

// Projector onto Fourier modes |k| <= n/3.
std::vector<double> dealias_matrix(int n) {
  const int kmax = n / 3;
  std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 1.0;
      for (int m = 1; m <= kmax; ++m) s += 2.0 * std::cos(2.0 * pi * m * (j - k) / n);
      p[static_cast<std::size_t>(j) * n + k] = s / n;
    }
  }
  return p;
}

// Chebyshev-Gauss-Lobatto nodes on [0,1], increasing. y_j = sin(pi (N - 2j) / 2N)
// is the symmetric form of cos(j pi / N), exact at the endpoints and midpoint.
std::vector<double> lobatto_nodes(int n3) {
  const int N = n3 - 1;
  std::vector<double> x(n3);
  for (int j = 0; j <= N; ++j) {
    const double y = std::sin(pi * (N - 2.0 * j) / (2.0 * N));
    x[j] = 0.5 * (1.0 - y);
  }
  x.front() = 0.0;
  x.back() = 1.0;
  return x;
}

std::vector<double> cheb_diff_matrix(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double ci = (i == 0 || i == n - 1) ? 2.0 : 1.0;
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double cj = (j == 0 || j == n - 1) ? 2.0 : 1.0;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      const double v = (ci / cj) * sign / (x[i] - x[j]);
      d[static_cast<std::size_t>(i) * n + j] = v;
      row += v;
    }
    d[static_cast<std::size_t>(i) * n + i] = -row;
  }
  return d;
}

// Clenshaw-Curtis weights for the Lobatto nodes, scaled to [0,1].
std::vector<double> clenshaw_curtis_weights(int n3) {
  const int N = n3 - 1;
  std::vector<double> w(n3, 0.0);
  for (int j = 0; j <= N; ++j) {
    const double theta = pi * j / N;
    double v = 1.0;
    for (int k = 1; k <= N / 2 - 1; ++k) v -= 2.0 * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    v -= std::cos(N * theta) / (static_cast<double>(N) * N - 1.0);
    w[j] = (j == 0 || j == N) ? 1.0 / (static_cast<double>(N) * N - 1.0) : 2.0 * v / N;
    w[j] *= 0.5;
  }
  return w;
}

}  // namespace

GridSpec GridSpec::make(int n1, int n2, int n3) {
  auto check_periodic = [](int n, const char* name) {
    if (n < 4 || n % 2 != 0) {
      throw InvalidResolution(std::string(name) + " must be even and >= 4, got " + std::to_string(n));
    }
  };
  check_periodic(n1, "n1");
  check_periodic(n2, "n2");
  if (n3 < 5 || n3 % 2 == 0) {
    throw InvalidResolution("n3 must be odd and >= 5, got " + std::to_string(n3));
  }
  auto impl = std::make_shared<Impl>();
  impl->n1 = n1;
  impl->n2 = n2;
  impl->n3 = n3;
  impl->x1.resize(n1);
  impl->x2.resize(n2);
  for (int i = 0; i < n1; ++i) impl->x1[i] = static_cast<double>(i) / n1;
  for (int i = 0; i < n2; ++i) impl->x2[i] = static_cast<double>(i) / n2;
  impl->x3 = lobatto_nodes(n3);
  impl->w3 = clenshaw_curtis_weights(n3);
  impl->d1 = fourier_diff_matrix(n1);
  impl->d2 = fourier_diff_matrix(n2);
  impl->d3 = cheb_diff_matrix(impl->x3);
  impl->p1 = dealias_matrix(n1);
  impl->p2 = dealias_matrix(n2);
  const double area = 1.0 / (static_cast<double>(n1) * n2);
  impl->node_weights.resize(static_cast<std::size_t>(n1) * n2 * n3);
  for (int i3 = 0; i3 < n3; ++i3) {
    for (std::size_t p = 0; p < static_cast<std::size_t>(n1) * n2; ++p) {
      impl->node_weights[static_cast<std::size_t>(i3) * n1 * n2 + p] = impl->w3[i3] * area;
    }
  }
  return GridSpec(std::move(impl));
}

Field::Field(GridSpec grid, int components)
    : grid_(std::move(grid)), components_(components), values_(grid_.points() * components, 0.0) {}

Field Field::sample(const GridSpec& grid, const PointFn& fn) {
  return sample(grid, 1, [&](int, double x1, double x2, double x3) { return fn(x1, x2, x3); });
}

Field Field::sample(const GridSpec& grid, int components, const ComponentFn& fn) {
  Field f(grid, components);
  const auto x1 = grid.x1_nodes();
  const auto x2 = grid.x2_nodes();
  const auto x3 = grid.x3_nodes();
  for (int c = 0; c < components; ++c)
    for (int i3 = 0; i3 < grid.n3(); ++i3)
      for (int i2 = 0; i2 < grid.n2(); ++i2)
        for (int i1 = 0; i1 < grid.n1(); ++i1) f.at(c, i3, i2, i1) = fn(c, x1[i1], x2[i2], x3[i3]);
  return f;
}

Field Field::constant(const GridSpec& grid, int components, double value) {
  Field f(grid, components);
  for (double& v : f.values_) v = value;
  return f;
}

Field Field::extract(int c) const {
  Field out(grid_, 1);
  const auto src = component(c);
  std::copy(src.begin(), src.end(), out.values_.begin());
  return out;
}

void Field::assign(int c, const Field& scalar) {
  require_same_grid(*this, scalar);
  const auto src = scalar.component(0);
  std::copy(src.begin(), src.end(), component(c).begin());
}

Field& Field::operator+=(const Field& other) { return add_scaled(1.0, other); }
Field& Field::operator-=(const Field& other) { return add_scaled(-1.0, other); }

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::add_scaled(double alpha, const Field& other) {
  require_same_grid(*this, other);
  if (other.components_ != components_) throw GridMismatch("component count differs");
  simd::axpy(alpha, other.values_, values_);
  return *this;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field operator*(const Field& a, const Field& b) {
  require_same_grid(a, b);
  if (a.components() != 1) throw GridMismatch("left operand of a pointwise product must be scalar");
  Field out(b.grid(), b.components());
  for (int c = 0; c < b.components(); ++c) simd::mul(a.component(0), b.component(c), out.component(c));
  return out;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

namespace {

// out(line) = M * in(line) along axis 1 (contiguous lines).
void apply_axis1(std::span<const double> m, const Field& f, Field& out) {
  const GridSpec& g = f.grid();
  const int n = g.n1();
  const std::size_t lines = f.values().size() / n;
  const auto& k = simd::kernels();
  for (std::size_t l = 0; l < lines; ++l) {
    const double* in = f.values().data() + l * n;
    double* dst = out.values().data() + l * n;
    for (int i = 0; i < n; ++i) dst[i] = k.dot(m.data() + static_cast<std::size_t>(i) * n, in, n);
  }
}

// Along axis 2: rows of length n1 are contiguous, so the product is a sum of
// row AXPYs.
void apply_axis2(std::span<const double> m, const Field& f, Field& out) {
  const GridSpec& g = f.grid();
  const int n1 = g.n1(), n2 = g.n2();
  const std::size_t blocks = f.values().size() / (static_cast<std::size_t>(n1) * n2);
  const auto& k = simd::kernels();
  for (std::size_t b = 0; b < blocks; ++b) {
    const double* in = f.values().data() + b * n1 * n2;
    double* dst = out.values().data() + b * n1 * n2;
    std::fill(dst, dst + static_cast<std::size_t>(n1) * n2, 0.0);
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n2; ++j) {
        const double c = m[static_cast<std::size_t>(i) * n2 + j];
        if (c != 0.0) k.axpy(c, in + static_cast<std::size_t>(j) * n1, dst + static_cast<std::size_t>(i) * n1, n1);
      }
  }
}

void apply_axis3(std::span<const double> m, const Field& f, Field& out) {
  const GridSpec& g = f.grid();
  const int n3 = g.n3();
  const std::size_t plane = g.plane();
  const auto& k = simd::kernels();
  for (int c = 0; c < f.components(); ++c) {
    const double* in = f.component(c).data();
    double* dst = out.component(c).data();
    std::fill(dst, dst + plane * n3, 0.0);
    for (int i = 0; i < n3; ++i)
      for (int j = 0; j < n3; ++j) k.axpy(m[static_cast<std::size_t>(i) * n3 + j], in + j * plane, dst + i * plane, plane);
  }
}

}  // namespace

Field diff(const Field& f, int axis) {
  Field out(f.grid(), f.components());
  switch (axis) {
    case 1:
      apply_axis1(f.grid().fourier_diff1(), f, out);
      break;
    case 2:
      apply_axis2(f.grid().fourier_diff2(), f, out);
      break;
    case 3:
      apply_axis3(f.grid().cheb_diff(), f, out);
      break;
    default:
      throw InvalidResolution("axis must be 1, 2 or 3, got " + std::to_string(axis));
  }
  return out;
}

Field gradient(const Field& f) {
  if (f.components() != 1 && f.components() != 3) throw GridMismatch("gradient needs a scalar or vector field");
  Field out(f.grid(), 3 * f.components());
  for (int axis = 1; axis <= 3; ++axis) {
    const Field d = diff(f, axis);
    for (int c = 0; c < f.components(); ++c) {
      const auto src = d.component(c);
      std::copy(src.begin(), src.end(), out.component(3 * c + axis - 1).begin());
    }
  }
  return out;
}

double integrate(const Field& f) {
  if (f.components() != 1) throw GridMismatch("integrate expects a scalar field");
  return simd::dot(f.component(0), f.grid().node_weights());
}

double integrate_face(const Field& f, int face) {
  const GridSpec& g = f.grid();
  const int i3 = face == 0 ? 0 : g.n3() - 1;
  double s = 0.0;
  for (int i2 = 0; i2 < g.n2(); ++i2)
    for (int i1 = 0; i1 < g.n1(); ++i1) s += f.at(0, i3, i2, i1);
  return s / static_cast<double>(g.plane());
}

Field dealias(const Field& f) {
  Field tmp(f.grid(), f.components());
  Field out(f.grid(), f.components());
  apply_axis1(f.grid().dealias1(), f, tmp);
  apply_axis2(f.grid().dealias2(), tmp, out);
  return out;
}

}  // namespace fbns
