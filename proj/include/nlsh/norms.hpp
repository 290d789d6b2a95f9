#pragma once

#include <limits>
#include <vector>

#include "nlsh/field.hpp"

namespace nlsh {

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

struct NormReport {
  std::vector<double> ps;
  std::vector<double> lp;      // matching ps; sup norm for p = inf
  double h1dot = 0.0;          // ||grad f||_2
  double weight = 0.0;         // ||x f||_2
  double sigma = 0.0;          // sqrt(h1dot^2 + weight^2)
};

// Riemann-sum L^p norm with weight dx^d; p = inf gives max modulus.
double lp_norm(const Field& f, double p);
double l2_norm(const Field& f);

double h1dot_norm(const Field& f);
double weight_norm(const Field& f);
double sigma_norm(const Field& f);

NormReport norms(const Field& f, const std::vector<double>& ps);

// Largest |f| on the boundary faces of the box relative to the peak.
// Domain-size sanity: tests require this < 1e-8.
double boundary_to_peak_ratio(const Field& f);

}  // namespace nlsh
