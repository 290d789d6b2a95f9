#include "nlsh/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace nlsh {

namespace {
std::mutex g_plan_mutex;  // fftw planner is not thread-safe

void run_fft(Field& f, int sign) {
  int dims[3] = {f.grid.n, f.grid.n, f.grid.n};
  fftw_complex* data = reinterpret_cast<fftw_complex*>(f.values.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    plan = fftw_plan_dft(f.grid.d, dims, data, data, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    fftw_destroy_plan(plan);
  }
}
}  // namespace

void fft_forward(Field& f) { run_fft(f, FFTW_FORWARD); }

void fft_inverse(Field& f) {
  run_fft(f, FFTW_BACKWARD);
  f *= 1.0 / static_cast<double>(f.size());
}

void apply_fourier_multiplier(
    Field& f, const std::function<cplx(const std::array<double, 3>&)>& m) {
  fft_forward(f);
  const Grid& g = f.grid;
  std::array<double, 3> k{0, 0, 0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto j = g.unflatten(i);
    for (int a = 0; a < g.d; ++a) k[a] = g.wavenumber(j[a]);
    f[i] *= m(k);
  }
  fft_inverse(f);
}

Field spectral_derivative(const Field& f, int axis) {
  Field out = f;
  apply_fourier_multiplier(out, [axis](const std::array<double, 3>& k) {
    return cplx(0.0, k[axis]);
  });
  return out;
}

std::vector<Field> gradient(const Field& f) {
  std::vector<Field> out;
  out.reserve(f.grid.d);
  for (int a = 0; a < f.grid.d; ++a) out.push_back(spectral_derivative(f, a));
  return out;
}

Field fourier_translate(const Field& f, const std::array<double, 3>& s) {
  Field out = f;
  apply_fourier_multiplier(out, [&](const std::array<double, 3>& k) {
    double phase = 0.0;
    for (int a = 0; a < f.grid.d; ++a) phase += k[a] * s[a];
    return std::polar(1.0, phase);
  });
  return out;
}

double spectral_tail_fraction(const Field& f) {
  Field hat = f;
  fft_forward(hat);
  const Grid& g = f.grid;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    auto j = g.unflatten(i);
    bool top = false;
    for (int a = 0; a < g.d; ++a)
      if (std::abs(g.freq_index(j[a])) >= g.n / 4) top = true;
    double e = std::norm(hat[i]);
    total += e;
    if (top) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace nlsh
