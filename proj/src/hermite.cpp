#include "nlsh/hermite.hpp"

#include <algorithm>
#include <cmath>

#include "nlsh/norms.hpp"

namespace nlsh {

namespace {

// Cached antiderivative of exp(-1/(s(1-s))) on [0, 1], normalized to 1.
double transition(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  static const std::vector<double>& table = [] {
    static std::vector<double> t;
    const int n = 4096;
    t.resize(n + 1, 0.0);
    auto w = [](double u) {
      return (u <= 0.0 || u >= 1.0) ? 0.0 : std::exp(-1.0 / (u * (1.0 - u)));
    };
    double acc = 0.0;
    double h = 1.0 / n;
    for (int i = 1; i <= n; ++i) {
      double a = (i - 1) * h, b = i * h;
      acc += h / 6.0 * (w(a) + 4.0 * w(0.5 * (a + b)) + w(b));
      t[i] = acc;
    }
    for (auto& v : t) v /= acc;
    return t;
  }();
  double u = s * 4096.0;
  int i = std::min(4095, static_cast<int>(u));
  double frac = u - i;
  return table[i] * (1.0 - frac) + table[i + 1] * frac;
}

}  // namespace

double smooth_bump(double lambda) {
  double a = std::abs(lambda);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - transition(a - 1.0);
}

double smooth_band(double lambda) {
  return smooth_bump(lambda) - smooth_bump(2.0 * lambda);
}

HermiteBasis::HermiteBasis(const Grid& grid, int K) : grid_(grid), K_(K) {
  if (K < 0 || K > grid.n / 2)
    throw std::invalid_argument("HermiteBasis: need 0 <= K <= n/2");
  // Turning-point radius of mode K is sqrt(2K+1); the grid must contain it
  // with room for the Gaussian tail.
  if (grid.L < std::sqrt(2.0 * K + 1.0) + 4.0)
    throw std::invalid_argument(
        "HermiteBasis: grid too narrow for K (turning-point radius exceeds L)");
  table_.resize(static_cast<std::size_t>(K + 1) * grid.n);
  const double c0 = std::pow(M_PI, -0.25);
  for (int j = 0; j < grid.n; ++j) {
    double x = grid.coord(j);
    double hm1 = 0.0;
    double hm = c0 * std::exp(-0.5 * x * x);
    table_[j] = hm;
    for (int m = 0; m < K; ++m) {
      double next = std::sqrt(2.0 / (m + 1)) * x * hm - std::sqrt(double(m) / (m + 1)) * hm1;
      hm1 = hm;
      hm = next;
      table_[static_cast<std::size_t>(m + 1) * grid.n + j] = hm;
    }
  }
}

double HermiteBasis::orthonormality_defect() const {
  double defect = 0.0;
  double dx = grid_.dx();
  for (int m = 0; m <= K_; ++m)
    for (int mp = m; mp <= K_; ++mp) {
      double s = 0.0;
      for (int j = 0; j < grid_.n; ++j) s += h(m, j) * h(mp, j);
      s *= dx;
      defect = std::max(defect, std::abs(s - (m == mp ? 1.0 : 0.0)));
    }
  return defect;
}

BasisPtr make_basis(const Grid& grid, int K) {
  return std::make_shared<HermiteBasis>(grid, K);
}

int default_mode_cap(const Grid& grid) { return grid.n / 4; }

double SpectrumH::eigenvalue(std::size_t flat) const {
  int K1 = basis->K() + 1;
  int d = basis->grid().d;
  int total = 0;
  for (int a = 0; a < d; ++a) {
    total += static_cast<int>(flat % K1);
    flat /= K1;
  }
  return total + 0.5 * d;
}

namespace {

// Contract axis `axis` of `in` (dims given per axis) against an
// (out_len x in_len) matrix.
std::vector<cplx> contract_axis(const std::vector<cplx>& in, std::array<int, 3> dims,
                                int d, int axis, const std::vector<double>& M,
                                int out_len, int in_len) {
  std::size_t stride_inner = 1;
  for (int a = axis + 1; a < d; ++a) stride_inner *= dims[a];
  std::size_t n_outer = 1;
  for (int a = 0; a < axis; ++a) n_outer *= dims[a];

  std::vector<cplx> out(n_outer * static_cast<std::size_t>(out_len) * stride_inner);
  for (std::size_t o = 0; o < n_outer; ++o) {
    const cplx* in_block = in.data() + o * static_cast<std::size_t>(in_len) * stride_inner;
    cplx* out_block = out.data() + o * static_cast<std::size_t>(out_len) * stride_inner;
    for (int m = 0; m < out_len; ++m) {
      const double* row = M.data() + static_cast<std::size_t>(m) * in_len;
      cplx* dst = out_block + static_cast<std::size_t>(m) * stride_inner;
      for (std::size_t i = 0; i < stride_inner; ++i) dst[i] = cplx(0, 0);
      for (int j = 0; j < in_len; ++j) {
        const cplx* src = in_block + static_cast<std::size_t>(j) * stride_inner;
        double w = row[j];
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < stride_inner; ++i) dst[i] += w * src[i];
      }
    }
  }
  return out;
}

}  // namespace

SpectrumH hermite_analyze(const Field& f, const BasisPtr& basis) {
  const Grid& g = f.grid;
  if (g != basis->grid())
    throw std::invalid_argument("hermite_analyze: basis grid mismatch");
  int K1 = basis->K() + 1;
  int n = g.n;
  // Quadrature matrix A[m][j] = h_m(x_j) dx.
  std::vector<double> A(static_cast<std::size_t>(K1) * n);
  for (int m = 0; m < K1; ++m)
    for (int j = 0; j < n; ++j)
      A[static_cast<std::size_t>(m) * n + j] = basis->h(m, j) * g.dx();

  std::vector<cplx> cur = f.values;
  std::array<int, 3> dims{n, n, n};
  for (int a = 0; a < g.d; ++a) {
    cur = contract_axis(cur, dims, g.d, a, A, K1, n);
    dims[a] = K1;
  }
  SpectrumH s;
  s.basis = basis;
  s.coeffs = std::move(cur);
  double l2 = l2_norm(f);
  double sum = 0.0;
  for (const auto& c : s.coeffs) sum += std::norm(c);
  s.tail = l2 * l2 - sum;
  return s;
}

Field hermite_synthesize(const SpectrumH& s) {
  const Grid& g = s.basis->grid();
  int K1 = s.basis->K() + 1;
  int n = g.n;
  std::vector<double> S(static_cast<std::size_t>(n) * K1);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < K1; ++m)
      S[static_cast<std::size_t>(j) * K1 + m] = s.basis->h(m, j);

  std::vector<cplx> cur = s.coeffs;
  std::array<int, 3> dims{K1, K1, K1};
  for (int a = 0; a < g.d; ++a) {
    cur = contract_axis(cur, dims, g.d, a, S, n, K1);
    dims[a] = n;
  }
  return Field(g, std::move(cur));
}

Field apply_spectral_multiplier_complex(const Field& f,
                                        const std::function<cplx(double)>& F,
                                        const BasisPtr& basis) {
  SpectrumH s = hermite_analyze(f, basis);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    double lambda = s.eigenvalue(i);
    cplx v = F(lambda);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("apply_spectral_multiplier: F not finite on spectrum");
    s.coeffs[i] *= v;
  }
  return hermite_synthesize(s);
}

Field apply_spectral_multiplier(const Field& f, const std::function<double(double)>& F,
                                const BasisPtr& basis) {
  return apply_spectral_multiplier_complex(
      f, [&F](double lambda) { return cplx(F(lambda), 0.0); }, basis);
}

Field heat_propagate(const Field& f, double t, const BasisPtr& basis) {
  if (t <= 0.0) throw std::invalid_argument("heat_propagate: t must be positive");
  return apply_spectral_multiplier(f, [t](double l) { return std::exp(-t * l); }, basis);
}

int lp_top_rung(const BasisPtr& basis) {
  double lambda_max = basis->K() * basis->grid().d + 0.5 * basis->grid().d;
  int N = 1;
  while (2 * N <= std::sqrt(lambda_max)) N *= 2;
  return N;
}

double lp_bump_multiplier(double lambda, int N, int top_rung) {
  double s = std::sqrt(lambda);
  if (N == 1 && N == top_rung) return 1.0;
  if (N == 1) return smooth_bump(s);
  if (N == top_rung) return 1.0 - smooth_bump(2.0 * s / N);
  return smooth_band(s / N);
}

Field littlewood_paley_project(const Field& f, int N, LPKind kind, LPBand band,
                               const BasisPtr& basis) {
  if (N < 1 || (N & (N - 1)) != 0)
    throw std::invalid_argument("littlewood_paley_project: N must be dyadic >= 1");
  double N2 = static_cast<double>(N) * N;
  std::function<double(double)> F;
  if (kind == LPKind::Heat) {
    if (band == LPBand::Le)
      F = [N2](double l) { return std::exp(-l / N2); };
    else
      F = [N2](double l) { return std::exp(-l / N2) - std::exp(-4.0 * l / N2); };
  } else {
    if (band == LPBand::Le)
      F = [N](double l) { return smooth_bump(std::sqrt(l) / N); };
    else {
      int top = lp_top_rung(basis);
      F = [N, top](double l) { return lp_bump_multiplier(l, N, top); };
    }
  }
  return apply_spectral_multiplier(f, F, basis);
}

double mehler_heat_kernel(double t, const std::array<double, 3>& x,
                          const std::array<double, 3>& y, int d) {
  double sh = std::sinh(t);
  double gt = (1.0 - std::cosh(t)) / (2.0 * sh);
  double x2 = 0.0, y2 = 0.0, dist2 = 0.0;
  for (int a = 0; a < d; ++a) {
    x2 += x[a] * x[a];
    y2 += y[a] * y[a];
    dist2 += (x[a] - y[a]) * (x[a] - y[a]);
  }
  return std::exp(gt * (x2 + y2)) * std::pow(2.0 * M_PI * sh, -0.5 * d) *
         std::exp(-dist2 / (2.0 * sh));
}

}  // namespace nlsh
