#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nlsh/fft.hpp"
#include "nlsh/field.hpp"
#include "nlsh/hermite.hpp"
#include "nlsh/norms.hpp"
#include "support/testfields.hpp"

using namespace nlsh;
using namespace nlsh::testing;

TEST_CASE("basis construction guards") {
  Grid g(1, 16.0, 256);
  CHECK_THROWS(make_basis(g, 200));          // K > n/2
  CHECK_THROWS(make_basis(Grid(1, 8.0, 64), 20));  // sqrt(41)+4 > 8
  CHECK(default_mode_cap(g) == 64);
  // K = 64 needs L >= sqrt(129)+4 ~ 15.36; fits in L = 16.
  auto b = make_basis(g, 64);
  CHECK(b->K() == 64);
}

TEST_CASE("discrete orthonormality of the sampled basis") {
  auto b = make_basis(Grid(1, 16.0, 256), 64);
  CHECK(b->orthonormality_defect() < 1e-10);
}

TEST_CASE("smooth cutoffs") {
  CHECK(smooth_bump(0.3) == 1.0);
  CHECK(smooth_bump(1.0) == 1.0);
  CHECK(smooth_bump(2.0) == 0.0);
  CHECK(smooth_bump(-0.5) == 1.0);
  double prev = 1.0;
  for (double s = 1.0; s <= 2.0; s += 0.01) {
    double v = smooth_bump(s);
    CHECK(v <= prev + 1e-14);
    prev = v;
  }
  // band + bump at half scale reassembles the bump.
  for (double s : {0.7, 1.3, 1.9, 2.5}) {
    CHECK(smooth_band(s) + smooth_bump(2.0 * s) == doctest::Approx(smooth_bump(s)).epsilon(1e-14));
  }
}

TEST_CASE("ground state has coefficient 1 on mode 0") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  SpectrumH s = hermite_analyze(gauss_h0(g), b);
  CHECK(std::abs(s.coeffs[0] - cplx(1.0, 0.0)) < 1e-12);
  double rest = 0.0;
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) rest += std::norm(s.coeffs[i]);
  CHECK(rest < 1e-20);
  CHECK(std::abs(s.tail) < 1e-12);
}

TEST_CASE("x h0 = h1 / sqrt(2)") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field xh0 = sample_function(g, [](const std::array<double, 3>& x) {
    return cplx(x[0] * std::pow(M_PI, -0.25) * std::exp(-0.5 * x[0] * x[0]), 0.0);
  });
  SpectrumH s = hermite_analyze(xh0, b);
  CHECK(std::abs(s.coeffs[1] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
  CHECK(std::abs(s.coeffs[0]) < 1e-12);
  CHECK(std::abs(s.coeffs[2]) < 1e-12);
}

TEST_CASE("analyze/synthesize round-trip on band-limited fields") {
  for (int d : {1, 2}) {
    Grid g(d, 16.0, d == 1 ? 256 : 128);
    auto b = make_basis(g, 24);
    Field f = random_sigma_field(g, 5, 12);
    Field back = hermite_synthesize(hermite_analyze(f, b));
    CHECK(l2_norm(back - f) < 1e-7);
  }
}

TEST_CASE("multiplier F == 1 is the identity on resolved modes") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field f = random_sigma_field(g, 9);
  Field out = apply_spectral_multiplier(f, [](double) { return 1.0; }, b);
  CHECK(l2_norm(out - f) < 1e-7);
}

TEST_CASE("F(lambda) = lambda acts as H: eigenvalue d/2 on the ground state") {
  Grid g1(1, 16.0, 256);
  auto b1 = make_basis(g1, 16);
  Field h0 = gauss_h0(g1);
  Field Hf = apply_spectral_multiplier(h0, [](double l) { return l; }, b1);
  CHECK(l2_norm(Hf - 0.5 * h0) < 1e-10);

  Grid g3(3, 12.0, 64);
  auto b3 = make_basis(g3, 8);
  Field h0_3 = gauss_h0(g3);
  Field Hf3 = apply_spectral_multiplier(h0_3, [](double l) { return l; }, b3);
  CHECK(l2_norm(Hf3 - 1.5 * h0_3) < 1e-8);
}

TEST_CASE("quadratic form: ||H^{1/2} f||^2 = (1/2) ||f||_Sigma^2") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field f = random_sigma_field(g, 13);
  Field hf = apply_spectral_multiplier(f, [](double l) { return std::sqrt(l); }, b);
  double lhs = l2_norm(hf);
  double sig = sigma_norm(f);
  CHECK(lhs * lhs == doctest::Approx(0.5 * sig * sig).epsilon(1e-8));
}

TEST_CASE("heat semigroup") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field h0 = gauss_h0(g);

  // Eigenfunction decay e^{-t/2}.
  Field u = heat_propagate(h0, 0.7, b);
  CHECK(l2_norm(u - std::exp(-0.35) * h0) < 1e-10);

  // Semigroup property on a generic field.
  Field f = random_sigma_field(g, 21);
  Field two_steps = heat_propagate(heat_propagate(f, 0.3, b), 0.5, b);
  Field one_step = heat_propagate(f, 0.8, b);
  CHECK(l2_norm(two_steps - one_step) < 1e-8);

  CHECK_THROWS(heat_propagate(f, 0.0, b));
  CHECK_THROWS(heat_propagate(f, -1.0, b));
}

TEST_CASE("heat propagation matches direct Mehler-kernel quadrature") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 64);
  Field f = random_sigma_field(g, 31, 20);
  double t = 0.4;
  Field spectral = heat_propagate(f, t, b);
  Field quad(g);
  for (int jx = 0; jx < g.n; ++jx) {
    std::array<double, 3> x{g.coord(jx), 0, 0};
    cplx acc(0, 0);
    for (int jy = 0; jy < g.n; ++jy) {
      std::array<double, 3> y{g.coord(jy), 0, 0};
      acc += mehler_heat_kernel(t, x, y, 1) * f[jy];
    }
    quad[jx] = acc * g.dx();
  }
  CHECK(l2_norm(spectral - quad) / l2_norm(f) < 1e-7);
}

TEST_CASE("heat kernel symmetry and positivity") {
  std::array<double, 3> x{1.3, -0.4, 0.0}, y{-2.1, 0.7, 0.0};
  for (double t : {0.1, 0.5, 2.0}) {
    double kxy = mehler_heat_kernel(t, x, y, 2);
    double kyx = mehler_heat_kernel(t, y, x, 2);
    CHECK(kxy > 0.0);
    CHECK(kxy == doctest::Approx(kyx).epsilon(1e-14));
  }
}

TEST_CASE("bump ladder telescopes to the identity on resolved modes") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 64);
  int top = lp_top_rung(b);
  CHECK(top >= 4);

  // Scalar partition of unity over the resolved spectrum.
  for (double l : {0.5, 1.7, 8.0, 33.0, 60.0}) {
    double sum = 0.0;
    for (int N = 1; N <= top; N *= 2) sum += lp_bump_multiplier(l, N, top);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Field-level ladder sum.
  Field f = random_sigma_field(g, 17, 40);
  Field sum(g);
  for (int N = 1; N <= top; N *= 2)
    sum += littlewood_paley_project(f, N, LPKind::Bump, LPBand::Eq, b);
  CHECK(l2_norm(sum - f) / l2_norm(f) < 1e-7);
}

TEST_CASE("heat bands telescope against the low-pass projector") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 48);
  Field f = random_sigma_field(g, 23);
  // P_{<=N} - P_{<=N/2} = band at N by construction.
  Field band = littlewood_paley_project(f, 4, LPKind::Heat, LPBand::Eq, b);
  Field le4 = littlewood_paley_project(f, 4, LPKind::Heat, LPBand::Le, b);
  Field le2 = littlewood_paley_project(f, 2, LPKind::Heat, LPBand::Le, b);
  CHECK(l2_norm(band - (le4 - le2)) < 1e-9);
}

TEST_CASE("frequency localization of bump bands") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 64);
  Field f = random_sigma_field(g, 41, 50);
  int top = lp_top_rung(b);
  for (int N = 2; N < top; N *= 2) {
    Field pf = littlewood_paley_project(f, N, LPKind::Bump, LPBand::Eq, b);
    double npf = l2_norm(pf);
    if (npf < 1e-12) continue;
    // sqrt(H) on the band lies in [N/2, 2N].
    Field hpf = apply_spectral_multiplier(pf, [](double l) { return std::sqrt(l); }, b);
    double ratio = l2_norm(hpf) / (N * npf);
    CHECK(ratio >= 0.5 - 1e-9);
    CHECK(ratio <= 2.0 + 1e-9);
  }
}

TEST_CASE("Bernstein-type bound on projected pieces") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 64);
  int top = lp_top_rung(b);
  for (unsigned seed : {3u, 5u}) {
    Field f = random_sigma_field(g, seed, 50);
    for (int N = 1; N <= top; N *= 2) {
      Field pf = littlewood_paley_project(f, N, LPKind::Bump, LPBand::Eq, b);
      double npf = l2_norm(pf);
      if (npf < 1e-10) continue;
      CHECK(h1dot_norm(pf) <= 2.5 * N * npf);
      CHECK(lp_norm(pf, kInfExponent) <= 2.5 * std::sqrt(double(N)) * npf);
    }
  }
}

TEST_CASE("square function is comparable to the L^2 norm") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 64);
  int top = lp_top_rung(b);
  Field f = random_sigma_field(g, 29, 40);
  double l2 = l2_norm(f);
  double sq = 0.0;
  for (int N = 1; N <= top; N *= 2) {
    double piece = l2_norm(littlewood_paley_project(f, N, LPKind::Bump, LPBand::Eq, b));
    sq += piece * piece;
  }
  CHECK(sq >= 0.3 * l2 * l2);
  CHECK(sq <= 2.0 * l2 * l2);
}

TEST_CASE("multiplier algebra: composition and self-adjointness") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field f = random_sigma_field(g, 2);
  Field fg = random_sigma_field(g, 4);

  auto F = [](double l) { return 1.0 / (1.0 + l); };
  auto G = [](double l) { return std::exp(-0.1 * l); };
  Field seq = apply_spectral_multiplier(apply_spectral_multiplier(f, F, b), G, b);
  Field prod = apply_spectral_multiplier(f, [&](double l) { return F(l) * G(l); }, b);
  CHECK(l2_norm(seq - prod) < 1e-9);

  cplx a = inner(apply_spectral_multiplier(f, F, b), fg);
  cplx c = inner(f, apply_spectral_multiplier(fg, F, b));
  CHECK(std::abs(a - c) < 1e-9);
}

TEST_CASE("projection guards") {
  Grid g(1, 16.0, 256);
  auto b = make_basis(g, 32);
  Field f = gauss_h0(g);
  CHECK_THROWS(littlewood_paley_project(f, 3, LPKind::Bump, LPBand::Eq, b));
  CHECK_THROWS(littlewood_paley_project(f, 0, LPKind::Heat, LPBand::Le, b));
  CHECK_THROWS(apply_spectral_multiplier(
      f, [](double l) { return 1.0 / (l - l); }, b));
}
