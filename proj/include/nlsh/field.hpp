#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nlsh/grid.hpp"

namespace nlsh {

using cplx = std::complex<double>;

// Complex-valued samples on a Grid, row-major over axes.
struct Field {
  Grid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size(), cplx(0.0, 0.0)) {}
  Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size())
      throw std::invalid_argument("Field: values length must equal n^d");
  }

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool finite() const {
    for (const auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  Field& operator+=(const Field& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  Field& operator*=(cplx c) {
    for (auto& z : values) z *= c;
    return *this;
  }
  Field& operator*=(double c) {
    for (auto& z : values) z *= c;
    return *this;
  }
};

inline Field operator+(Field a, const Field& b) { a += b; return a; }
inline Field operator-(Field a, const Field& b) { a -= b; return a; }
inline Field operator*(cplx c, Field a) { a *= c; return a; }
inline Field operator*(double c, Field a) { a *= c; return a; }

inline Field conj(Field f) {
  for (auto& z : f.values) z = std::conj(z);
  return f;
}

// Sample a pointwise function of the node coordinates. Rejects non-finite
// values, reporting the offending node.
Field sample_function(const Grid& g,
                      const std::function<cplx(const std::array<double, 3>&)>& fn);

// x |-> f(-x), exact on the periodic grid.
Field parity(const Field& f);

// Pointwise multiplication by |x|^{2 gamma}, 0 <= gamma <= 1.
Field apply_weight(const Field& f, double gamma);

// Euclidean inner product <f, g> = dx^d * sum conj(f) g.
cplx inner(const Field& f, const Field& g);

}  // namespace nlsh
