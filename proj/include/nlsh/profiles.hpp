#pragma once

#include <optional>

#include "nlsh/field.hpp"

namespace nlsh {

enum class FrameKind { Identity, Concentrating };

// A (single-index) frame: time center, spatial center, dyadic frequency N,
// and the auxiliary cutoff scale Nprime with sqrt(N) <= Nprime <= N, or
// Nprime = 1 in the far-center regime.
struct Frame {
  FrameKind kind = FrameKind::Identity;
  double t = 0.0;
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  int N = 1;
  int Nprime = 1;

  void validate(int d) const;
};

// Concentrating frame with Nprime chosen by the default rule: smallest dyadic
// >= sqrt(N), except Nprime = 1 when |x0| >= N/4 (far-center surrogate).
Frame concentrating_frame(double t, const std::array<double, 3>& x0, int N, int d);

struct ProfileItem {
  Frame frame;
  Field phi;           // profile in rescaled coordinates
  double eps;          // extraction level used
  double sigma_share;  // ||piece||_Sigma^2 / ||f||_Sigma^2 of the removed piece
};

// e^{itH} G S phi: cutoff chi((Nprime/N) y), dyadic rescale
// (G phi)(x) = N^{(d-2)/2} phi(N(x - x0)), translation, then the harmonic
// flow by the frame time. Rejects frames whose rescaled support overflows
// the grid.
Field frame_apply(const Frame& fr, const Field& phi);

// Exact inverse of the non-cutoff part of frame_apply: undo the propagation,
// the translation, and the rescale (trigonometric upsampling).
Field frame_unapply(const Frame& fr, const Field& f);

struct OrthogonalityReport {
  double score;      // N1/N2 + N2/N1 + N1 N2 |t1-t2| + sqrt(N1 N2) |x1-x2|
  bool orthogonal;   // score > threshold
};

OrthogonalityReport frames_orthogonal(const Frame& a, const Frame& b,
                                      double theta = 64.0);

// Scans dyadic N and times in [t0, t1] for the point maximizing the
// normalized concentration score N^{-(d-2)/2} |P~_N e^{-itH} f(x)| / ||f||_{H^1dot},
// with heat-kernel projectors P~_N; returns none below eps. The time scan
// uses 64 uniform samples plus golden-section refinement.
std::optional<ProfileItem> extract_bubble(const Field& f, double t0, double t1,
                                          double eps);

struct Decomposition {
  std::vector<ProfileItem> items;
  Field remainder;
};

// Iterates extract_bubble, subtracting frame_apply(frame, phi) each round,
// stopping at jmax levels or the first extraction below eps.
Decomposition profile_decompose(const Field& f, int jmax, double eps,
                                double t0 = 0.0, double t1 = 1.0);

struct DecouplingReport {
  double sigma_defect;  // |  ||f||_S^2 - sum ||p_j||_S^2 - ||r||_S^2 | / ||f||_S^2
  double lq_defect;     // same in L^q with the potential-energy exponent
  double lq_exponent;   // 2d/(d-2) at d = 3; 4 as the d < 3 stand-in
};

// Verifies items + remainder reconstruct f (exact bookkeeping, 1e-9), then
// reports the Pythagorean defects of the decomposition.
DecouplingReport decoupling_audit(const Field& f, const std::vector<ProfileItem>& items,
                                  const Field& remainder);

struct BubbleTrajectory {
  Frame frame;
  double T;    // window half-width in rescaled time; physical window T/N^2
  double dt;   // physical lattice spacing
  std::vector<double> times;
  std::vector<Field> states;
  std::size_t window_lo = 0, window_hi = 0;  // inclusive concentrated-branch range
};

// Three-piece concentrated approximate solution: inside |t| <= T/N^2 the
// modulated rescaled profile e^{-it|x0|^2/2} G[S P_{<=Ntilde'} v](N^2 t) with
// Ntilde' = sqrt(N/Nprime); outside, the linear harmonic flow glued at the
// (lattice-snapped) window edge. v supplies the potential-free solution in
// rescaled coordinates.
BubbleTrajectory build_bubble_approximation(const std::function<Field(double)>& v,
                                            const Frame& fr, double T,
                                            double t_extent, double dt_lattice);

struct ResidualReport {
  std::vector<double> times;     // interior lattice times
  std::vector<double> h_half_e;  // ||H^{1/2} e|| proxy per time
  double window_aggregate;       // L^2-in-time over the concentrated branch
  double outside_aggregate;      // L^2-in-time over the glued branches
};

// e = i d/dt v~ - H v~ - mu |v~|^p v~ estimated by centered time differences
// and spectral application of H; the H^{1/2} norm is proxied through the
// Hermite expansion. Requires dt <= N^{-2}/32.
ResidualReport approximation_residual(const BubbleTrajectory& traj, int mu, double p);

}  // namespace nlsh
