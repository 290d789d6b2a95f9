#include "nlsh/field.hpp"

#include <sstream>

#include "nlsh/fft.hpp"
#include "nlsh/norms.hpp"

namespace nlsh {

Field sample_function(
    const Grid& g, const std::function<cplx(const std::array<double, 3>&)>& fn) {
  Field f(g);
  std::array<double, 3> x{0, 0, 0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    for (int a = 0; a < g.d; ++a) x[a] = g.coord(j[a]);
    cplx v = fn(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "sample_function: non-finite value at node (";
      for (int a = 0; a < g.d; ++a) msg << (a ? ", " : "") << x[a];
      msg << ")";
      throw std::invalid_argument(msg.str());
    }
    f[i] = v;
  }
  return f;
}

Field parity(const Field& f) {
  const Grid& g = f.grid;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    std::array<int, 3> jr{0, 0, 0};
    for (int a = 0; a < g.d; ++a) jr[a] = (g.n - j[a]) % g.n;
    out[g.flatten(jr)] = f[i];
  }
  return out;
}

Field apply_weight(const Field& f, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("apply_weight: gamma must lie in [0, 1]");
  if (gamma == 0.0) return f;
  const Grid& g = f.grid;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double x = g.coord(j[a]);
      r2 += x * x;
    }
    out[i] = f[i] * std::pow(r2, gamma);
  }
  return out;
}

cplx inner(const Field& f, const Field& g) {
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * f.grid.cell_volume();
}

double lp_norm(const Field& f, double p) {
  if (p == kInfExponent) {
    double m = 0.0;
    for (const auto& z : f.values) m = std::max(m, std::abs(z));
    return m;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  double s = 0.0;
  for (const auto& z : f.values) s += std::pow(std::abs(z), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (const auto& z : f.values) s += std::norm(z);
  return std::sqrt(s * f.grid.cell_volume());
}

double h1dot_norm(const Field& f) {
  double s2 = 0.0;
  for (int a = 0; a < f.grid.d; ++a) {
    double na = l2_norm(spectral_derivative(f, a));
    s2 += na * na;
  }
  return std::sqrt(s2);
}

double weight_norm(const Field& f) {
  double v = l2_norm(apply_weight(f, 0.5));
  return v;
}

double sigma_norm(const Field& f) {
  double a = h1dot_norm(f), b = weight_norm(f);
  return std::sqrt(a * a + b * b);
}

NormReport norms(const Field& f, const std::vector<double>& ps) {
  if (!f.finite()) throw std::invalid_argument("norms: non-finite field");
  NormReport r;
  r.ps = ps;
  for (double p : ps) r.lp.push_back(lp_norm(f, p));
  r.h1dot = h1dot_norm(f);
  r.weight = weight_norm(f);
  r.sigma = std::sqrt(r.h1dot * r.h1dot + r.weight * r.weight);
  return r;
}

double boundary_to_peak_ratio(const Field& f) {
  const Grid& g = f.grid;
  double peak = 0.0, boundary = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    bool on_boundary = false;
    for (int a = 0; a < g.d; ++a)
      if (j[a] == 0) on_boundary = true;
    double m = std::abs(f[i]);
    peak = std::max(peak, m);
    if (on_boundary) boundary = std::max(boundary, m);
  }
  return peak > 0.0 ? boundary / peak : 0.0;
}

}  // namespace nlsh
