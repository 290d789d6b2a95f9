#pragma once

#include "nlsh/field.hpp"
#include "nlsh/hermite.hpp"

namespace nlsh {

// Chirp bookkeeping for the factorization
// e^{-itH} f = e^{i gamma(t)|x|^2} e^{i sin(t) Delta / 2} (e^{i gamma(t)|x|^2} f).
struct LensFactors {
  double t;
  double gamma;  // (cos t - 1)/(2 sin t) = -tan(t/2)/2
  double s;      // sin t
  explicit LensFactors(double t_)
      : t(t_), gamma(-0.5 * std::tan(0.5 * t_)), s(std::sin(t_)) {}
};

// e^{i t Delta / 2} via the periodic Fourier multiplier e^{-i t k^2 / 2}.
Field free_propagate(const Field& f, double t);

// e^{-itH} via the lens transform. Exact parity/phase maps at multiples of
// pi; other times are reduced to |t| <= pi/2 by the group law and split into
// substeps whenever the chirp would alias (|gamma| L dx >= pi/4).
Field harmonic_propagate(const Field& f, double t);

// Direct oscillatory quadrature of the Mehler kernel; reference
// implementation. Requires |sin t| > 0.1 and a small total problem size.
Field mehler_apply_oracle(const Field& f, double t);

// ||e^{-itH} f||_inf |sin t|^{d/2} / ||f||_1 at each sample time.
std::vector<double> dispersive_ratio(const Field& f, const std::vector<double>& ts);

struct ObservableReport {
  std::vector<Field> Pf;  // components of (i grad cos t + x sin t) f
  std::vector<Field> Xf;  // components of (x cos t - i grad sin t) f
  double defect;          // max relative L^2 gap, closed form vs conjugation
  double sigma_gap;       // ||Pf||^2 + ||Xf||^2 - ||f||_Sigma^2
};

// Evolved momentum/position observables, computed both by conjugation with
// the propagator and by the closed form.
ObservableReport heisenberg_observables(const Field& f, double t);

}  // namespace nlsh
