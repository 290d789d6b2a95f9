#pragma once

#include <memory>

#include "nlsh/field.hpp"

namespace nlsh {

// Standard C^infty cutoff: 1 for |lambda| <= 1, 0 for |lambda| >= 2, built
// from a normalized integral of exp(-1/(s(1-s))).
double smooth_bump(double lambda);
// psi(lambda) = bump(lambda) - bump(2 lambda).
double smooth_band(double lambda);

// Tables of the 1D Hermite functions h_m(x_j), m <= K, built by the stable
// recurrence h_0 = pi^{-1/4} e^{-x^2/2},
// h_{m+1} = sqrt(2/(m+1)) x h_m - sqrt(m/(m+1)) h_{m-1}.
class HermiteBasis {
 public:
  HermiteBasis(const Grid& grid, int K);

  const Grid& grid() const { return grid_; }
  int K() const { return K_; }
  // h_m at 1D node j.
  double h(int m, int j) const { return table_[static_cast<std::size_t>(m) * grid_.n + j]; }

  // Max |<h_m, h_m'> - delta| over m, m' <= K (grid quadrature).
  double orthonormality_defect() const;

 private:
  Grid grid_;
  int K_;
  std::vector<double> table_;  // (K+1) x n
};

using BasisPtr = std::shared_ptr<const HermiteBasis>;

// Coefficients c_alpha over multi-indices alpha with alpha_i <= K.
struct SpectrumH {
  BasisPtr basis;
  std::vector<cplx> coeffs;  // (K+1)^d, row-major over axes
  double tail = 0.0;         // ||f||_2^2 - sum |c_alpha|^2

  int K() const { return basis->K(); }
  double eigenvalue(std::size_t flat_index) const;
};

BasisPtr make_basis(const Grid& grid, int K);
int default_mode_cap(const Grid& grid);  // n/4

SpectrumH hermite_analyze(const Field& f, const BasisPtr& basis);
Field hermite_synthesize(const SpectrumH& s);

// F(H) f realized by scaling Hermite coefficients with F(|alpha| + d/2).
Field apply_spectral_multiplier(const Field& f, const std::function<double(double)>& F,
                                const BasisPtr& basis);
Field apply_spectral_multiplier_complex(const Field& f,
                                        const std::function<cplx(double)>& F,
                                        const BasisPtr& basis);

// e^{-tH} f, t > 0, via the multiplier e^{-t lambda}.
Field heat_propagate(const Field& f, double t, const BasisPtr& basis);

enum class LPKind { Bump, Heat };
enum class LPBand { Le, Eq };

// Littlewood-Paley projection at dyadic N >= 1. The bump ladder folds the
// bottom of the spectrum into N = 1 and, when N is the top rung under the
// mode cap, the remainder of the spectrum into N, so that the dyadic sum is
// exactly the identity on the resolved modes.
Field littlewood_paley_project(const Field& f, int N, LPKind kind, LPBand band,
                               const BasisPtr& basis);

// Largest rung of the bump ladder under the basis mode cap.
int lp_top_rung(const BasisPtr& basis);

// Scalar bump-ladder multiplier value (exposed for ladder-sum tests).
double lp_bump_multiplier(double lambda, int N, int top_rung);

// Closed-form Mehler heat kernel e^{-tH}(x, y).
double mehler_heat_kernel(double t, const std::array<double, 3>& x,
                          const std::array<double, 3>& y, int d);

}  // namespace nlsh
