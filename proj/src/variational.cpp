#include "nlsh/variational.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "nlsh/norms.hpp"

namespace nlsh {

namespace {

// Adaptive Simpson on [0, 1].
double simpson01(const std::function<double(double)>& fn) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole,
          int depth) -> double {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = fn(lm), frm = fn(rm);
    double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (depth <= 0 || std::abs(left + right - whole) < 1.5e-11)
      return left + right + (left + right - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, depth - 1) +
           rec(mid, hi, fmid, frm, fhi, right, depth - 1);
  };
  double fa = fn(0.0), fb = fn(1.0), fm = fn(0.5);
  double whole = 1.0 / 6.0 * (fa + 4.0 * fm + fb);
  return rec(0.0, 1.0, fa, fm, fb, whole, 30);
}

// int_0^inf w(r) r^2 dr via the substitution r = s/(1-s).
double radial_r2_integral(const std::function<double(double)>& w) {
  return simpson01([&w](double s) {
    if (s >= 1.0) return 0.0;
    double r = s / (1.0 - s);
    double jac = 1.0 / ((1.0 - s) * (1.0 - s));
    return w(r) * r * r * jac;
  });
}

GroundStateProfile build_profile(double a) {
  GroundStateProfile p;
  p.a = a;
  // |grad W|^2 = a^2 r^2 (1 + a r^2)^{-3}.
  p.grad_sq = 4.0 * M_PI * radial_r2_integral([a](double r) {
    double b = 1.0 + a * r * r;
    return a * a * r * r / (b * b * b);
  });
  p.l6_6 = 4.0 * M_PI * radial_r2_integral([a](double r) {
    double b = 1.0 + a * r * r;
    return 1.0 / (b * b * b);
  });
  p.e_delta = 0.5 * p.grad_sq - p.l6_6 / 3.0;
  return p;
}

}  // namespace

const GroundStateProfile& ground_state_profile(bool alt_normalization) {
  static std::once_flag once_std, once_alt;
  static GroundStateProfile std_profile, alt_profile;
  if (alt_normalization) {
    std::call_once(once_alt, [] { alt_profile = build_profile(1.0 / 3.0); });
    return alt_profile;
  }
  std::call_once(once_std, [] { std_profile = build_profile(2.0 / 3.0); });
  return std_profile;
}

double ground_state_taper(double r, double L) {
  if (r <= L - 2.0) return 1.0;
  double s = (r - (L - 2.0)) / 2.0;
  if (s >= 1.0) return 0.0;
  // Descending smoothstep, composed once for C^2 continuity.
  double t = 1.0 - 3.0 * s * s + 2.0 * s * s * s;
  return t * t * (3.0 - 2.0 * t);
}

Field ground_state_W(const Grid& g, bool alt_normalization) {
  if (g.d != 3)
    throw std::invalid_argument("ground_state_W: defined on d = 3 grids only");
  const GroundStateProfile& prof = ground_state_profile(alt_normalization);
  double L = g.L;
  return sample_function(g, [&prof, L](const std::array<double, 3>& x) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return cplx(prof(r2) * ground_state_taper(std::sqrt(r2), L), 0.0);
  });
}

double elliptic_residual(const Grid& g, bool alt_normalization) {
  if (g.d != 3)
    throw std::invalid_argument("elliptic_residual: defined on d = 3 grids only");
  const GroundStateProfile& prof = ground_state_profile(alt_normalization);
  int n = g.n;
  auto value = [&](int i, int j, int k) {
    double x = g.coord(i), y = g.coord(j), z = g.coord(k);
    return prof(x * x + y * y + z * z);
  };
  double dx2 = g.dx() * g.dx();
  double acc = 0.0;
  double rmax2 = 0.25 * g.L * g.L;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      for (int k = 1; k + 1 < n; ++k) {
        double x = g.coord(i), y = g.coord(j), z = g.coord(k);
        if (x * x + y * y + z * z > rmax2) continue;
        double w = value(i, j, k);
        double lap = (value(i + 1, j, k) + value(i - 1, j, k) +
                      value(i, j + 1, k) + value(i, j - 1, k) +
                      value(i, j, k + 1) + value(i, j, k - 1) - 6.0 * w) / dx2;
        double r = 0.5 * lap + std::pow(w, 5.0);
        acc += r * r;
      }
  return std::sqrt(acc * g.cell_volume());
}

EnergyReport energy_functionals(const Field& u, int mu, double p) {
  EnergyReport r;
  double l2 = l2_norm(u);
  r.mass = l2 * l2;
  r.gradnorm = h1dot_norm(u);
  r.potnorm = weight_norm(u);
  double q = p + 2.0;
  double lq = lp_norm(u, q);
  r.e_delta = 0.5 * r.gradnorm * r.gradnorm + (2.0 * mu / q) * std::pow(lq, q);
  r.energy = r.e_delta + 0.5 * r.potnorm * r.potnorm;
  return r;
}

TrappingReport energy_trapping_classify(const Field& u) {
  if (u.grid.d != 3)
    throw std::invalid_argument("energy_trapping_classify: d = 3 only");
  const GroundStateProfile& prof = ground_state_profile();
  TrappingReport rep;
  rep.energies = energy_functionals(u, -1, 4.0);
  rep.delta0 = 1.0 - rep.energies.e_delta / prof.e_delta;
  double grad_w = std::sqrt(prof.grad_sq);
  if (rep.energies.energy < prof.e_delta) {
    rep.cls = rep.energies.gradnorm <= grad_w ? TrappingClass::TrappedBelow
                                              : TrappingClass::TrappedAbove;
  } else {
    rep.cls = TrappingClass::OutsideHypotheses;
  }
  return rep;
}

VirialReport virial_diagnostics(const std::vector<Field>& fields,
                                const std::vector<double>& times, int mu, double p) {
  if (fields.size() < 5)
    throw std::invalid_argument("virial_diagnostics: need at least 5 snapshots");
  if (times.size() != fields.size())
    throw std::invalid_argument("virial_diagnostics: times/fields length mismatch");
  double dt = times[1] - times[0];
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("virial_diagnostics: non-uniform sampling");
  if (dt <= 0.0) throw std::invalid_argument("virial_diagnostics: times must increase");

  int d = fields[0].grid.d;
  double q = p + 2.0;
  VirialReport rep;
  rep.series.times = times;
  for (const auto& u : fields) {
    double w = weight_norm(u);
    rep.series.f.push_back(w * w);
    double g = h1dot_norm(u);
    double lq = lp_norm(u, q);
    rep.series.fddot_analytic.push_back(2.0 * g * g - 2.0 * w * w +
                                        (2.0 * d * p * mu / q) * std::pow(lq, q));
  }

  const auto& f = rep.series.f;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    double fd = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dt * dt);
    rep.series.fddot_fd.push_back(fd);
    rep.max_mismatch = std::max(rep.max_mismatch,
                                std::abs(fd - rep.series.fddot_analytic[i]));
  }

  for (std::size_t i = 2; i + 2 < f.size(); ++i) {
    double d4 = (f[i - 2] - 4.0 * f[i - 1] + 6.0 * f[i] - 4.0 * f[i + 1] + f[i + 2]) /
                (dt * dt * dt * dt);
    rep.fd_scale = std::max(rep.fd_scale, std::abs(d4) / 12.0);
  }

  VirialCertificate& c = rep.certificate;
  c.t0 = times.front();
  c.t1 = times.back();
  c.C = rep.series.fddot_analytic[0];
  for (double v : rep.series.fddot_analytic) c.C = std::max(c.C, v);
  c.A = f[0];
  c.B = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);  // one-sided f'(t0)
  if (c.C < 0.0) {
    // f(t0 + t) <= A + Bt + (C/2) t^2, which hits zero at the positive root.
    double disc = c.B * c.B - 2.0 * c.A * c.C;
    c.root = (c.B + std::sqrt(disc)) / (-c.C);
    c.valid = true;
  }
  return rep;
}

}  // namespace nlsh
