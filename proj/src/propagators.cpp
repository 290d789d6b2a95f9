#include "nlsh/propagators.hpp"

#include <cmath>

#include "nlsh/fft.hpp"
#include "nlsh/norms.hpp"

namespace nlsh {

namespace {

void multiply_chirp(Field& f, double gamma) {
  const Grid& g = f.grid;
  // 1D chirp table, applied per axis.
  std::vector<cplx> chirp(g.n);
  for (int j = 0; j < g.n; ++j) {
    double x = g.coord(j);
    chirp[j] = std::polar(1.0, gamma * x * x);
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto idx = g.unflatten(i);
    cplx c = chirp[idx[0]];
    for (int a = 1; a < g.d; ++a) c *= chirp[idx[a]];
    f[i] *= c;
  }
}

// One lens application for |t| <= pi/2 (chirp does not alias at this size,
// callers ensure the substep condition).
void lens_step(Field& f, double t) {
  LensFactors lf(t);
  multiply_chirp(f, lf.gamma);
  f = free_propagate(f, lf.s);
  multiply_chirp(f, lf.gamma);
}

// Reduce t to [0, 2pi); each full period carries the phase e^{-i pi d}, so
// the winding count is returned alongside the remainder.
double positive_fmod_2pi(double t, long& winding) {
  double r = std::fmod(t, 2.0 * M_PI);
  if (r < 0) r += 2.0 * M_PI;
  winding = std::lround((t - r) / (2.0 * M_PI));
  return r;
}

}  // namespace

Field free_propagate(const Field& f, double t) {
  Field out = f;
  apply_fourier_multiplier(out, [t, &f](const std::array<double, 3>& k) {
    double k2 = 0.0;
    for (int a = 0; a < f.grid.d; ++a) k2 += k[a] * k[a];
    return std::polar(1.0, -0.5 * t * k2);
  });
  return out;
}

Field harmonic_propagate(const Field& f, double t) {
  const Grid& g = f.grid;
  long winding = 0;
  double r = positive_fmod_2pi(t, winding);
  Field work = f;
  cplx phase = std::polar(1.0, -M_PI * g.d * winding);

  auto apply_half_period = [&] {
    // e^{-i pi H} = e^{-i pi d / 2} (parity)
    phase *= std::polar(1.0, -0.5 * M_PI * g.d);
    work = parity(work);
  };

  if (r >= M_PI) {
    apply_half_period();
    r -= M_PI;
  }
  if (r > 0.5 * M_PI) {
    // e^{-irH} = e^{-i pi H} e^{+i(pi - r)H}
    apply_half_period();
    r = -(M_PI - r);
  }
  if (std::abs(r) > 1e-14) {
    // Substep so each chirp satisfies |gamma| L dx < pi/4.
    double limit = M_PI / (4.0 * g.L * g.dx());
    int m = 1;
    while (0.5 * std::tan(0.5 * std::abs(r) / m) >= limit) ++m;
    for (int i = 0; i < m; ++i) lens_step(work, r / m);
  }
  work *= phase;
  return work;
}

Field mehler_apply_oracle(const Field& f, double t) {
  const Grid& g = f.grid;
  long winding = 0;
  double r = positive_fmod_2pi(t, winding);
  Field input = f;
  cplx phase = std::polar(1.0, -M_PI * g.d * winding);
  if (r >= M_PI) {
    phase *= std::polar(1.0, -0.5 * M_PI * g.d);
    input = parity(input);
    r -= M_PI;
  }
  double s = std::sin(r);
  if (std::abs(s) <= 0.1)
    throw std::invalid_argument("mehler_apply_oracle: |sin t| <= 0.1, quadrature unreliable");
  if (static_cast<double>(f.size()) * static_cast<double>(f.size()) > 1e9)
    throw std::invalid_argument("mehler_apply_oracle: problem too large for direct quadrature");

  double c = std::cos(r);
  // (2 pi i sin r)^{-d/2} for r in (0, pi), principal branch.
  cplx prefactor = std::pow(2.0 * M_PI * s, -0.5 * g.d) *
                   std::polar(1.0, -0.25 * M_PI * g.d);
  double vol = g.cell_volume();

  // Precompute coordinates.
  std::vector<std::array<double, 3>> coords(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    for (int a = 0; a < g.d; ++a) coords[i][a] = g.coord(j[a]);
  }
  std::vector<double> sq(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int a = 0; a < g.d; ++a) sq[i] += coords[i][a] * coords[i][a];

  Field out(g);
  for (std::size_t ix = 0; ix < f.size(); ++ix) {
    cplx acc(0.0, 0.0);
    for (std::size_t iy = 0; iy < f.size(); ++iy) {
      double dot = 0.0;
      for (int a = 0; a < g.d; ++a) dot += coords[ix][a] * coords[iy][a];
      double arg = (0.5 * (sq[ix] + sq[iy]) * c - dot) / s;
      acc += std::polar(1.0, arg) * input[iy];
    }
    out[ix] = prefactor * vol * acc;
  }
  out *= phase;
  return out;
}

std::vector<double> dispersive_ratio(const Field& f, const std::vector<double>& ts) {
  double l1 = lp_norm(f, 1.0);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    double s = std::abs(std::sin(t));
    if (s < 1e-9)
      throw std::invalid_argument("dispersive_ratio: t congruent to 0 mod pi excluded");
    Field u = harmonic_propagate(f, t);
    out.push_back(lp_norm(u, kInfExponent) * std::pow(s, 0.5 * f.grid.d) / l1);
  }
  return out;
}

namespace {

Field momentum_component(const Field& f, int axis) {
  Field df = spectral_derivative(f, axis);
  df *= cplx(0.0, 1.0);
  return df;
}

Field position_component(const Field& f, int axis) {
  const Grid& g = f.grid;
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    out[i] = f[i] * g.coord(j[axis]);
  }
  return out;
}

}  // namespace

ObservableReport heisenberg_observables(const Field& f, double t) {
  const Grid& g = f.grid;
  double ct = std::cos(t), st = std::sin(t);
  ObservableReport rep;
  rep.defect = 0.0;

  Field forward = harmonic_propagate(f, t);
  double p2 = 0.0, x2 = 0.0;
  for (int a = 0; a < g.d; ++a) {
    Field closed_p = ct * momentum_component(f, a) + st * position_component(f, a);
    Field closed_x = ct * position_component(f, a) - st * momentum_component(f, a);

    Field conj_p = harmonic_propagate(momentum_component(forward, a), -t);
    Field conj_x = harmonic_propagate(position_component(forward, a), -t);

    double np = l2_norm(closed_p), nx = l2_norm(closed_x);
    p2 += np * np;
    x2 += nx * nx;
    if (np > 0) rep.defect = std::max(rep.defect, l2_norm(closed_p - conj_p) / np);
    if (nx > 0) rep.defect = std::max(rep.defect, l2_norm(closed_x - conj_x) / nx);

    rep.Pf.push_back(std::move(closed_p));
    rep.Xf.push_back(std::move(closed_x));
  }
  double sig = sigma_norm(f);
  rep.sigma_gap = p2 + x2 - sig * sig;
  return rep;
}

}  // namespace nlsh
