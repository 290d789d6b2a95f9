#include "nlsh/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlsh/fft.hpp"
#include "nlsh/hermite.hpp"
#include "nlsh/norms.hpp"
#include "nlsh/propagators.hpp"

namespace nlsh {

namespace {

bool is_dyadic(int N) { return N >= 1 && (N & (N - 1)) == 0; }

double center_norm(const std::array<double, 3>& x0, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += x0[a] * x0[a];
  return std::sqrt(s);
}

// chi((Nprime/N) y): identically 1 on |y| <= N/Nprime, supported in twice that.
Field cutoff_S(const Field& phi, int N, int Nprime) {
  const Grid& g = phi.grid;
  double ratio = static_cast<double>(Nprime) / N;
  Field out = phi;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto j = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      double y = g.coord(j[a]);
      r2 += y * y;
    }
    out[i] *= smooth_bump(std::sqrt(r2) * ratio);
  }
  return out;
}

// g(x) = f(Nx) for dyadic integer N: the trigonometric interpolant of f
// evaluated at Nx, which at grid nodes is exact node resampling. Arguments
// outside the box read as zero (the cutoff makes the input compactly
// supported, so no periodic wrapping is wanted).
Field dyadic_zoom_in(const Field& f, int N) {
  const Grid& g = f.grid;
  int n = g.n;
  std::vector<int> map(n);  // -1 marks out-of-range
  for (int j = 0; j < n; ++j) {
    int s = N * j - (N - 1) * n / 2;
    map[j] = (s >= 0 && s < n) ? s : -1;
  }
  Field out(g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto j = g.unflatten(i);
    std::array<int, 3> s{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < g.d; ++a) {
      int m = map[j[a]];
      if (m < 0) inside = false;
      s[a] = m < 0 ? 0 : m;
    }
    out[i] = inside ? f[g.flatten(s)] : cplx(0.0, 0.0);
  }
  return out;
}

// Anti-aliased variant used by the approximation builder (the G-tilde path):
// the coefficient at frequency index m moves to index Nm, indices beyond the
// truncation |m| < n/(2N) are dropped, and the other periodic copies of the
// decimated spectrum are cleared. Unlike exact node resampling this filters
// the slowly-decaying spectral tail of the cutoff, which otherwise leaves a
// scale-dependent high-frequency artifact in the residual measurement.
Field spectral_zoom_in(const Field& f, int N) {
  const Grid& g = f.grid;
  int n = g.n;
  Field hat = f;
  fft_forward(hat);
  Field out(g);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    auto j = g.unflatten(i);
    std::array<int, 3> t{0, 0, 0};
    bool keep = true;
    int parity = 0;  // nodes sit at -L + j dx: remapping m -> Nm costs (-1)^{m(N-1)}
    for (int a = 0; a < g.d; ++a) {
      int m = g.freq_index(j[a]);
      if (std::abs(m) >= n / (2 * N)) {
        keep = false;
        break;
      }
      parity += m * (N - 1);
      int fm = N * m;
      t[a] = fm >= 0 ? fm : fm + n;
    }
    if (keep) out[g.flatten(t)] = (parity % 2 == 0) ? hat[i] : -hat[i];
  }
  fft_inverse(out);
  double cell = g.L / N;  // keep only the fundamental cell of the periodization
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto j = g.unflatten(i);
    for (int a = 0; a < g.d; ++a)
      if (std::abs(g.coord(j[a])) >= cell) {
        out[i] = cplx(0.0, 0.0);
        break;
      }
  }
  return out;
}

// Periodic trigonometric interpolation kernel for even n on period 2L.
double dirichlet_kernel(double u, int n, double L) {
  u = std::remainder(u, 2.0 * L);
  double a = M_PI * u / (2.0 * L);
  if (std::abs(a) < 1e-14) return 1.0;
  return std::sin(n * a) / (n * std::tan(a));
}

// g(y) = f(y/N): trigonometric upsampling, separable per axis.
Field dyadic_zoom_out(const Field& f, int N) {
  const Grid& g = f.grid;
  int n = g.n;
  std::vector<double> W(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      W[static_cast<std::size_t>(j) * n + jp] =
          dirichlet_kernel(g.coord(j) / N - g.coord(jp), n, g.L);
  Field cur = f;
  for (int axis = 0; axis < g.d; ++axis) {
    Field next(g);
    for (std::size_t i = 0; i < next.size(); ++i) {
      auto j = g.unflatten(i);
      int ja = j[axis];
      cplx acc(0.0, 0.0);
      std::array<int, 3> s = j;
      for (int jp = 0; jp < n; ++jp) {
        s[axis] = jp;
        acc += W[static_cast<std::size_t>(ja) * n + jp] * cur[g.flatten(s)];
      }
      next[i] = acc;
    }
    cur = std::move(next);
  }
  return cur;
}

// Fraction of L^2 mass within one unit of the box boundary (sup-norm shell).
double boundary_shell_fraction(const Field& f) {
  const Grid& g = f.grid;
  double total = 0.0, shell = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    bool outer = false;
    for (int a = 0; a < g.d; ++a)
      if (std::abs(g.coord(j[a])) > g.L - 1.0) outer = true;
    double e = std::norm(f[i]);
    total += e;
    if (outer) shell += e;
  }
  return total > 0.0 ? shell / total : 0.0;
}

double scaling_power(int N, int d) { return std::pow(N, 0.5 * (d - 2)); }

// Largest Hermite mode cap the grid supports: the default n/4 limited by the
// turning-point radius fitting inside L.
int usable_mode_cap(const Grid& g) {
  int lim = static_cast<int>(((g.L - 4.0) * (g.L - 4.0) - 1.0) / 2.0);
  return std::max(1, std::min(default_mode_cap(g), lim));
}

}  // namespace

void Frame::validate(int d) const {
  if (kind == FrameKind::Identity) {
    if (t != 0.0 || N != 1 || Nprime != 1 || center_norm(x0, d) != 0.0)
      throw std::invalid_argument("Frame: Identity requires (t, x0, N, Nprime) = (0, 0, 1, 1)");
    return;
  }
  if (!is_dyadic(N) || N < 2)
    throw std::invalid_argument("Frame: Concentrating requires dyadic N >= 2");
  if (!is_dyadic(Nprime))
    throw std::invalid_argument("Frame: Nprime must be dyadic");
  if (Nprime != 1 && (Nprime * Nprime < N || Nprime > N))
    throw std::invalid_argument("Frame: Nprime must be 1 or lie in [sqrt(N), N]");
}

Frame concentrating_frame(double t, const std::array<double, 3>& x0, int N, int d) {
  Frame fr;
  fr.kind = FrameKind::Concentrating;
  fr.t = t;
  fr.x0 = x0;
  fr.N = N;
  if (center_norm(x0, d) >= 0.25 * N) {
    fr.Nprime = 1;  // far-center regime
  } else {
    int np = 1;
    while (np * np < N) np *= 2;
    fr.Nprime = np;
  }
  fr.validate(d);
  return fr;
}

Field frame_apply(const Frame& fr, const Field& phi) {
  const Grid& g = phi.grid;
  fr.validate(g.d);
  if (fr.kind == FrameKind::Identity) return phi;

  Field cut = cutoff_S(phi, fr.N, fr.Nprime);
  Field scaled = dyadic_zoom_in(cut, fr.N);
  scaled *= scaling_power(fr.N, g.d);
  std::array<double, 3> neg{-fr.x0[0], -fr.x0[1], -fr.x0[2]};
  Field placed = fourier_translate(scaled, neg);  // (G S phi)(x), centered at x0

  double shell = boundary_shell_fraction(placed);
  if (shell > 1e-6) {
    std::ostringstream os;
    os << "frame_apply: rescaled support overflows the grid (N=" << fr.N
       << ", |x0|=" << center_norm(fr.x0, g.d) << ", boundary mass fraction "
       << shell << ")";
    throw std::runtime_error(os.str());
  }
  return fr.t == 0.0 ? placed : harmonic_propagate(placed, -fr.t);  // e^{itH}
}

Field frame_unapply(const Frame& fr, const Field& f) {
  const Grid& g = f.grid;
  fr.validate(g.d);
  if (fr.kind == FrameKind::Identity) return f;
  Field b = fr.t == 0.0 ? f : harmonic_propagate(f, fr.t);
  b = fourier_translate(b, fr.x0);  // recenter at the origin
  Field wide = dyadic_zoom_out(b, fr.N);
  wide *= 1.0 / scaling_power(fr.N, g.d);
  return wide;
}

OrthogonalityReport frames_orthogonal(const Frame& a, const Frame& b, double theta) {
  double Na = a.N, Nb = b.N;
  double dx = 0.0;
  for (int i = 0; i < 3; ++i) {
    double e = a.x0[i] - b.x0[i];
    dx += e * e;
  }
  OrthogonalityReport rep;
  rep.score = Na / Nb + Nb / Na + Na * Nb * std::abs(a.t - b.t) +
              std::sqrt(Na * Nb) * std::sqrt(dx);
  rep.orthogonal = rep.score > theta;
  return rep;
}

namespace {

struct ScanHit {
  double score = 0.0;
  std::size_t node = 0;
};

// N^{-(d-2)/2} sup |P~_N u| with the heat-kernel band projector (the low-pass
// e^{-H} at N = 1).
ScanHit concentration_score(const Field& u, int N, const BasisPtr& basis) {
  double n2 = static_cast<double>(N) * N;
  Field proj = apply_spectral_multiplier(
      u,
      [N, n2](double lam) {
        double lo = std::exp(-lam / n2);
        return N == 1 ? lo : lo - std::exp(-4.0 * lam / n2);
      },
      basis);
  ScanHit hit;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    double a = std::abs(proj[i]);
    if (a > hit.score) {
      hit.score = a;
      hit.node = i;
    }
  }
  hit.score /= scaling_power(N, u.grid.d);
  return hit;
}

}  // namespace

std::optional<ProfileItem> extract_bubble(const Field& f, double t0, double t1,
                                          double eps) {
  const Grid& g = f.grid;
  if (t1 < t0) throw std::invalid_argument("extract_bubble: empty time window");
  double hnorm = h1dot_norm(f);
  if (hnorm == 0.0) return std::nullopt;

  BasisPtr basis = make_basis(g, usable_mode_cap(g));
  int K = basis->K();
  std::vector<int> Ns{1};
  for (int N = 2; N * N <= K; N *= 2) Ns.push_back(N);

  const int samples = t1 > t0 ? 64 : 1;
  double dt_s = samples > 1 ? (t1 - t0) / (samples - 1) : 0.0;

  int bestN = 1;
  double bestT = t0, bestScore = 0.0;
  std::size_t bestNode = 0;
  Field gt = t0 == 0.0 ? f : harmonic_propagate(f, t0);
  for (int i = 0; i < samples; ++i) {
    if (i > 0) gt = harmonic_propagate(gt, dt_s);
    for (int N : Ns) {
      ScanHit hit = concentration_score(gt, N, basis);
      if (hit.score > bestScore) {
        bestScore = hit.score;
        bestN = N;
        bestT = t0 + i * dt_s;
        bestNode = hit.node;
      }
    }
  }

  // Golden-section refinement of the time center at the winning scale.
  if (samples > 1) {
    double lo = std::max(t0, bestT - dt_s), hi = std::min(t1, bestT + dt_s);
    auto eval = [&](double t) {
      Field u = t == 0.0 ? f : harmonic_propagate(f, t);
      return concentration_score(u, bestN, basis);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d2 = a + gr * (b - a);
    ScanHit fc = eval(c), fd = eval(d2);
    for (int it = 0; it < 24; ++it) {
      if (fc.score > fd.score) {
        b = d2;
        d2 = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d2;
        fc = fd;
        d2 = a + gr * (b - a);
        fd = eval(d2);
      }
    }
    if (fc.score > bestScore) {
      bestScore = fc.score;
      bestT = c;
      bestNode = fc.node;
    }
    if (fd.score > bestScore) {
      bestScore = fd.score;
      bestT = d2;
      bestNode = fd.node;
    }
  }

  if (bestScore / hnorm < eps) return std::nullopt;

  ProfileItem item;
  item.eps = eps;
  if (bestN < 2) {
    item.frame = Frame{};  // Identity
    item.phi = f;
    item.sigma_share = 1.0;
    return item;
  }

  auto j = g.unflatten(bestNode);
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  for (int a = 0; a < g.d; ++a) x0[a] = g.coord(j[a]);
  item.frame = concentrating_frame(bestT, x0, bestN, g.d);

  Field back = frame_unapply(item.frame, f);
  item.phi = cutoff_S(back, item.frame.N, item.frame.Nprime);
  Field piece = frame_apply(item.frame, item.phi);
  double sf = sigma_norm(f), sp = sigma_norm(piece);
  item.sigma_share = (sp * sp) / (sf * sf);
  if (item.sigma_share <= 0.0) return std::nullopt;
  return item;
}

Decomposition profile_decompose(const Field& f, int jmax, double eps, double t0,
                                double t1) {
  if (jmax < 1) throw std::invalid_argument("profile_decompose: jmax must be >= 1");
  Decomposition dec;
  dec.remainder = f;
  for (int j = 0; j < jmax; ++j) {
    auto item = extract_bubble(dec.remainder, t0, t1, eps);
    if (!item) break;
    dec.remainder -= frame_apply(item->frame, item->phi);
    bool identity = item->frame.kind == FrameKind::Identity;
    dec.items.push_back(std::move(*item));
    if (identity) break;  // nothing left to split
  }
  return dec;
}

DecouplingReport decoupling_audit(const Field& f, const std::vector<ProfileItem>& items,
                                  const Field& remainder) {
  Field recon = remainder;
  std::vector<Field> pieces;
  pieces.reserve(items.size());
  for (const auto& it : items) {
    pieces.push_back(frame_apply(it.frame, it.phi));
    recon += pieces.back();
  }
  double sf = sigma_norm(f);
  if (sigma_norm(recon - f) > 1e-9 * std::max(1.0, sf))
    throw std::invalid_argument("decoupling_audit: items + remainder do not reconstruct f");

  DecouplingReport rep;
  rep.lq_exponent = f.grid.d == 3 ? 6.0 : 4.0;
  double sig_sum = 0.0, lq_sum = 0.0;
  for (const auto& p : pieces) {
    double s = sigma_norm(p);
    sig_sum += s * s;
    lq_sum += std::pow(lp_norm(p, rep.lq_exponent), rep.lq_exponent);
  }
  double sr = sigma_norm(remainder);
  sig_sum += sr * sr;
  lq_sum += std::pow(lp_norm(remainder, rep.lq_exponent), rep.lq_exponent);
  double lq_f = std::pow(lp_norm(f, rep.lq_exponent), rep.lq_exponent);
  rep.sigma_defect = std::abs(sf * sf - sig_sum) / (sf * sf);
  rep.lq_defect = lq_f > 0.0 ? std::abs(lq_f - lq_sum) / lq_f : 0.0;
  return rep;
}

BubbleTrajectory build_bubble_approximation(const std::function<Field(double)>& v,
                                            const Frame& fr, double T,
                                            double t_extent, double dt_lattice) {
  if (fr.kind != FrameKind::Concentrating)
    throw std::invalid_argument("build_bubble_approximation: Concentrating frame required");
  if (T <= 0.0 || t_extent <= 0.0 || dt_lattice <= 0.0)
    throw std::invalid_argument("build_bubble_approximation: T, t_extent, dt_lattice must be positive");
  double n2 = static_cast<double>(fr.N) * fr.N;
  double t_window = T / n2;
  if (t_window > t_extent)
    throw std::invalid_argument(
        "build_bubble_approximation: window T/N^2 exceeds the lattice extent");

  int jext = static_cast<int>(std::llround(t_extent / dt_lattice));
  int jw = static_cast<int>(std::floor(t_window / dt_lattice + 1e-12));
  jw = std::min(jw, jext);

  double ntilde = std::sqrt(static_cast<double>(fr.N) / fr.Nprime);
  double x02 = 0.0;
  for (int a = 0; a < 3; ++a) x02 += fr.x0[a] * fr.x0[a];

  auto inside_state = [&](double t) {
    Field w = v(n2 * t);
    Field wc = w;
    apply_fourier_multiplier(wc, [&](const std::array<double, 3>& k) {
      double kk = 0.0;
      for (int a = 0; a < w.grid.d; ++a) kk += k[a] * k[a];
      return cplx(smooth_bump(std::sqrt(kk) / ntilde), 0.0);
    });
    // G-tilde . S . P: the builder uses the anti-aliased rescale.
    Field scaled = spectral_zoom_in(cutoff_S(wc, fr.N, fr.Nprime), fr.N);
    scaled *= scaling_power(fr.N, w.grid.d);
    std::array<double, 3> neg{-fr.x0[0], -fr.x0[1], -fr.x0[2]};
    Field placed = fourier_translate(scaled, neg);
    placed *= std::polar(1.0, -0.5 * t * x02);
    return placed;
  };

  BubbleTrajectory traj;
  traj.frame = fr;
  traj.T = T;
  traj.dt = dt_lattice;
  int total = 2 * jext + 1;
  traj.times.resize(total);
  traj.states.resize(total);
  traj.window_lo = static_cast<std::size_t>(jext - jw);
  traj.window_hi = static_cast<std::size_t>(jext + jw);
  for (int j = -jw; j <= jw; ++j) {
    traj.times[jext + j] = j * dt_lattice;
    traj.states[jext + j] = inside_state(j * dt_lattice);
  }
  for (int j = jw + 1; j <= jext; ++j) {
    traj.times[jext + j] = j * dt_lattice;
    traj.states[jext + j] = harmonic_propagate(traj.states[jext + j - 1], dt_lattice);
    traj.times[jext - j] = -j * dt_lattice;
    traj.states[jext - j] = harmonic_propagate(traj.states[jext - j + 1], -dt_lattice);
  }
  return traj;
}

ResidualReport approximation_residual(const BubbleTrajectory& traj, int mu, double p) {
  if (traj.states.size() < 3)
    throw std::invalid_argument("approximation_residual: need at least 3 lattice points");
  double n2 = static_cast<double>(traj.frame.N) * traj.frame.N;
  if (traj.dt > 1.0 / (32.0 * n2))
    throw std::invalid_argument("approximation_residual: lattice too coarse (need dt <= N^-2/32)");

  const Grid& g = traj.states[0].grid;
  BasisPtr basis = make_basis(g, usable_mode_cap(g));
  double lam_cap = basis->K() + 0.5 * g.d;

  auto apply_H = [&](const Field& u) {
    Field kin = u;
    apply_fourier_multiplier(kin, [&](const std::array<double, 3>& k) {
      double kk = 0.0;
      for (int a = 0; a < g.d; ++a) kk += k[a] * k[a];
      return cplx(0.5 * kk, 0.0);
    });
    Field pot = apply_weight(u, 1.0);
    pot *= 0.5;
    return kin + pot;
  };

  ResidualReport rep;
  double win2 = 0.0, out2 = 0.0;
  for (std::size_t j = 1; j + 1 < traj.states.size(); ++j) {
    Field dudt = traj.states[j + 1] - traj.states[j - 1];
    dudt *= cplx(0.0, 1.0) * (1.0 / (2.0 * traj.dt));
    Field e = dudt - apply_H(traj.states[j]);
    if (mu != 0) {
      const Field& u = traj.states[j];
      for (std::size_t i = 0; i < e.size(); ++i) {
        double a = std::abs(u[i]);
        if (a > 0.0) e[i] -= static_cast<double>(mu) * std::pow(a, p) * u[i];
      }
    }
    // ||H^{1/2} e|| via the Hermite expansion; unresolved tail weighted at
    // the cap eigenvalue.
    SpectrumH s = hermite_analyze(e, basis);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
      acc += s.eigenvalue(i) * std::norm(s.coeffs[i]);
    acc += lam_cap * std::max(0.0, s.tail);
    double val = std::sqrt(acc);
    rep.times.push_back(traj.times[j]);
    rep.h_half_e.push_back(val);
    if (j >= traj.window_lo && j <= traj.window_hi)
      win2 += traj.dt * val * val;
    else
      out2 += traj.dt * val * val;
  }
  rep.window_aggregate = std::sqrt(win2);
  rep.outside_aggregate = std::sqrt(out2);
  return rep;
}

}  // namespace nlsh
