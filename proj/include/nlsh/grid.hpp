#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nlsh {

// Uniform periodic Cartesian grid on [-L, L)^d with n samples per axis.
// n must be a power of two >= 8. Wavenumbers are k_m = pi*m/L for
// m in [-n/2, n/2).
struct Grid {
  int d = 1;
  double L = 16.0;
  int n = 256;

  Grid() = default;
  Grid(int d_, double L_, int n_) : d(d_), L(L_), n(n_) {
    if (d < 1 || d > 3) throw std::invalid_argument("Grid: d must be 1..3");
    if (L <= 0) throw std::invalid_argument("Grid: L must be positive");
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Grid: n must be a power of two >= 8");
  }

  double dx() const { return 2.0 * L / n; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
    return s;
  }
  double cell_volume() const { return std::pow(dx(), d); }

  // Node coordinate along one axis.
  double coord(int j) const { return -L + j * dx(); }

  // Signed integer frequency for FFT bin i.
  int freq_index(int i) const { return i < n / 2 ? i : i - n; }
  // Wavenumber for FFT bin i.
  double wavenumber(int i) const { return M_PI * freq_index(i) / L; }

  // Decompose a flat row-major index into per-axis indices.
  std::array<int, 3> unflatten(std::size_t idx) const {
    std::array<int, 3> j{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      j[a] = static_cast<int>(idx % n);
      idx /= n;
    }
    return j;
  }
  std::size_t flatten(const std::array<int, 3>& j) const {
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * n + static_cast<std::size_t>(j[a]);
    return idx;
  }

  bool operator==(const Grid& o) const { return d == o.d && L == o.L && n == o.n; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace nlsh
